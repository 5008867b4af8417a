"""Classification groups for abelian structure groups.

A cellular representation into S¹ assigns to each cell e a character of I(e),
i.e. a class in Z^n / ann(e), such that the class on a face restricts to the
class on the cell.  The group of such families is computed exactly as a
sublattice quotient; it is presented on vertex weights since the classes on
higher cells are determined by any of their vertices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .complex import h2, natural_key, oriented_edges
from .groupoid import CellularGroupoid, GroupoidError, edge_characters, ensure_valid
from .intlat import (
    AbelianInvariants,
    IntMatrix,
    LatticeBasis,
    hnf,
    hnf_with_transform,
    integer_kernel,
    invariant_factors,
    lattice_coordinates,
    lattice_divide,
    lattice_member,
    reduce_mod,
    snf,
)

WeightFamily = Mapping[str, Sequence[int]]


class FamilyError(ValueError):
    pass


class GkmFailure(ValueError):
    def __init__(self, edges):
        super().__init__(f"GKM condition fails on edges {list(edges)}")
        self.edges = list(edges)


class NotMomentPolytope(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    family: dict[str, tuple[int, ...]]
    order: int = 0          # 0 means infinite order
    factor: str = "S1"


@dataclass(frozen=True)
class RepGroup:
    free_rank: int
    torsion: tuple[int, ...]
    generators: tuple[Generator, ...]
    vertices: tuple[str, ...] = ()
    # flattened vertex weights: families are `lattice`, modulo `relations`
    lattice: LatticeBasis | None = field(default=None, repr=False)
    relations: LatticeBasis | None = field(default=None, repr=False)

    @property
    def invariants(self) -> AbelianInvariants:
        return AbelianInvariants(self.free_rank, self.torsion)

    def flatten(self, fam: WeightFamily) -> tuple[int, ...]:
        return tuple(x for v in self.vertices for x in fam[v])

    def contains_family(self, fam: WeightFamily) -> bool:
        """Whether the vertex weights lift to a cellular representation."""
        if self.lattice is None:
            raise ValueError("membership is only defined for a single-factor group")
        return lattice_member(self.flatten(fam), self.lattice)

    def to_json(self) -> dict:
        out = {
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "generators": [{v: list(g.family[v]) for v in self.vertices} for g in self.generators],
            "generator_orders": [g.order for g in self.generators],
        }
        if any(g.factor != "S1" for g in self.generators):
            out["generator_factors"] = [g.factor for g in self.generators]
        return out


def _block_diag(blocks: Sequence[Sequence[Sequence[int]]], widths: Sequence[int]):
    """Row lists placed block-diagonally; returns the rows of the full matrix."""
    total = sum(widths)
    rows, off = [], 0
    for blk, w in zip(blocks, widths):
        for r in blk:
            rows.append([0] * off + list(r) + [0] * (total - off - w))
        off += w
    return rows


def _cellular_kernel(g: CellularGroupoid, source: Mapping[str, LatticeBasis],
                     factor: str = "S1") -> RepGroup:
    """Families (x_c ∈ source[c])_c with x_f ≡ x_e mod ann(e) for all faces f < e,
    modulo ⊕ ann(c), presented on vertex coordinates."""
    n = g.ambient_rank
    cells = list(g.complex.cells)
    verts = tuple(g.complex.vertices)
    pairs = list(g.complex.face_pairs())

    # unknowns: coefficients y_c in the basis of source[c], then z_(f,e) in the basis of ann(e)
    y_off, pos = {}, 0
    for c in cells:
        y_off[c] = pos
        pos += source[c].rank
    z_off = {}
    for p in pairs:
        z_off[p] = pos
        pos += g.ann(p[1]).rank
    nvars = pos

    # one block of n equations per face pair:  y_f B_f - y_e B_e - z A_e = 0
    eqs = []
    for (f, e) in pairs:
        block = [[0] * nvars for _ in range(n)]
        for sign, c in ((1, f), (-1, e)):
            for i, row in enumerate(source[c].basis):
                for k in range(n):
                    block[k][y_off[c] + i] += sign * row[k]
        for i, row in enumerate(g.ann(e).basis):
            for k in range(n):
                block[k][z_off[(f, e)] + i] -= row[k]
        eqs.extend(block)

    if eqs:
        sols = integer_kernel(IntMatrix.from_rows(eqs, nvars)).basis
    else:
        sols = IntMatrix.identity(nvars).entries

    # read off vertex weights of each solution
    flat = []
    for s in sols:
        w = []
        for v in verts:
            y = s[y_off[v]:y_off[v] + source[v].rank]
            w.extend(source[v].matrix().vecmul(y) if source[v].rank else (0,) * n)
        flat.append(w)
    dim = n * len(verts)
    lattice = hnf(flat, dim)
    relations = hnf(_block_diag([g.ann(v).basis for v in verts], [n] * len(verts)), dim)
    return _present(lattice, relations, verts, g, factor)


def _present(lattice: LatticeBasis, relations: LatticeBasis, verts, g, factor) -> RepGroup:
    """SNF presentation of lattice / relations with canonical generator lifts."""
    n = g.ambient_rank
    rl = lattice.rank
    coords = []
    for r in relations.basis:
        c = lattice_coordinates(r, lattice)
        if c is None:
            raise AssertionError("relation lattice escapes the solution lattice")
        coords.append(c)
    if coords:
        diag, _, right = snf(coords, rl)
        _, right_inv, _ = hnf_with_transform(right)
    else:
        diag, right_inv = [], IntMatrix.identity(rl)
    # generator i of the quotient is row i of right^{-1}, expressed in the lattice basis
    B = lattice.matrix()
    gens_tors, gens_free = [], []
    for i in range(rl):
        d = diag[i] if i < len(diag) else 0
        if d == 1:
            continue
        vec = B.vecmul(right_inv[i])
        fam = {}
        for j, v in enumerate(verts):
            fam[v] = reduce_mod(vec[j * n:(j + 1) * n], g.ann(v))
        (gens_tors if d else gens_free).append(Generator(fam, d, factor))
    torsion = tuple(d for d in diag if d > 1)
    return RepGroup(free_rank=len(gens_free), torsion=torsion,
                    generators=tuple(gens_tors + gens_free), vertices=tuple(verts),
                    lattice=lattice, relations=relations)


def rep_circle(g: CellularGroupoid) -> RepGroup:
    """Cellular representations of ``g`` into S¹."""
    ensure_valid(g)
    n = g.ambient_rank
    source = {c: LatticeBasis.full(n) for c in g.complex.cells}
    return _cellular_kernel(g, source)


def rep_finite_cyclic(g: CellularGroupoid, q: int) -> RepGroup:
    """Cellular representations into Z/q: q-torsion of each character group."""
    ensure_valid(g)
    if q < 1:
        raise ValueError("q must be positive")
    source = {c: lattice_divide(g.ann(c), q) for c in g.complex.cells}
    return _cellular_kernel(g, source, factor=f"Z/{q}")


def rep_abelian(g: CellularGroupoid, torus_rank: int, finite: Sequence[int] = ()) -> RepGroup:
    """Representations into T^m × Z/q_1 × ... × Z/q_s as a direct sum of factors."""
    parts = []
    if torus_rank:
        circle = rep_circle(g)
        for i in range(torus_rank):
            label = "S1" if torus_rank == 1 else f"S1[{i}]"
            parts.append(RepGroup(circle.free_rank, circle.torsion,
                                  tuple(Generator(x.family, x.order, label) for x in circle.generators),
                                  circle.vertices, circle.lattice, circle.relations))
    for q in finite:
        parts.append(rep_finite_cyclic(g, q))
    if len(parts) == 1:
        return parts[0]
    verts = tuple(g.complex.vertices)
    gens = tuple(x for p in parts for x in p.generators)
    return RepGroup(free_rank=sum(p.free_rank for p in parts),
                    torsion=invariant_factors(t for p in parts for t in p.torsion),
                    generators=gens, vertices=verts)


# -- weight families ----------------------------------------------------------

def _check_family(g: CellularGroupoid, fam: WeightFamily) -> dict[str, tuple[int, ...]]:
    verts = set(g.complex.vertices)
    keys = set(fam)
    if keys != verts:
        extra = sorted(keys - verts, key=natural_key)
        missing = sorted(verts - keys, key=natural_key)
        raise FamilyError(f"family keyed off the vertex set (missing {missing}, unknown {extra})")
    out = {}
    for v in g.complex.vertices:
        a = tuple(int(x) for x in fam[v])
        if len(a) != g.ambient_rank:
            raise FamilyError(f"weight at {v!r} has {len(a)} entries, expected {g.ambient_rank}")
        out[v] = a
    return out


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def gkm_check(g: CellularGroupoid, fam: WeightFamily) -> list[str]:
    """Ids of edges where a_{head} - a_{tail} is not a character vanishing on I(e).

    For one-toric groupoids this is the usual "difference is a multiple of χ_e".
    An empty list means the family passes.
    """
    fam = _check_family(g, fam)
    return [e.id for e in oriented_edges(g.complex)
            if not lattice_member(_sub(fam[e.head], fam[e.tail]), g.ann(e.id))]


def _multiple_of(diff, chi) -> int | None:
    j = next(i for i, x in enumerate(chi) if x)
    k, r = divmod(diff[j], chi[j])
    if r or any(d != k * c for d, c in zip(diff, chi)):
        return None
    return k


def euler_numbers(g: CellularGroupoid, fam: WeightFamily) -> dict[str, int]:
    """k_e with a_{head} - a_{tail} = k_e·χ_e, edges oriented by vertex id."""
    chars = edge_characters(g)
    if chars is None:
        raise GroupoidError("euler numbers need a one-toric groupoid")
    bad = gkm_check(g, fam)
    if bad:
        raise GkmFailure(bad)
    fam = _check_family(g, fam)
    return {e.id: _multiple_of(_sub(fam[e.head], fam[e.tail]), chars[e.id])
            for e in oriented_edges(g.complex)}


def gkm_equations(g: CellularGroupoid) -> dict[str, list[tuple[int, ...]]]:
    """Per edge, integer forms u with u·(a_{head} - a_{tail}) = 0 cutting out the
    GKM condition (the forms orthogonal to ann(e))."""
    n = g.ambient_rank
    out = {}
    for e in oriented_edges(g.complex):
        ann = g.ann(e.id)
        out[e.id] = list(integer_kernel(ann.matrix()).basis) if ann.rank else \
            list(LatticeBasis.full(n).basis)
    return out


@dataclass(frozen=True)
class BundleGroup:
    rep: RepGroup
    h2: AbelianInvariants

    @property
    def invariants(self) -> AbelianInvariants:
        return self.rep.invariants + self.h2

    def to_json(self) -> dict:
        return {"rep": self.rep.to_json(), "h2": self.h2.to_json(),
                "total": self.invariants.to_json()}


def bundle_group(g: CellularGroupoid, h2_override: AbelianInvariants | None = None) -> BundleGroup:
    """Equivariant S¹-bundles: representation part times H²(A; Z)."""
    rep = rep_circle(g)
    return BundleGroup(rep, h2(g.complex) if h2_override is None else h2_override)


# -- affine realisation -------------------------------------------------------

@dataclass(frozen=True)
class EdgeReport:
    edge: str
    tail: str
    head: str
    chi: tuple[int, ...]
    k: int
    direction: tuple[int, ...]
    length: int


@dataclass(frozen=True)
class AffineReport:
    edges: tuple[EdgeReport, ...]
    cells: dict[str, bool]

    @property
    def affine_consistent(self) -> bool:
        return all(self.cells.values())

    def to_json(self) -> dict:
        return {
            "affine_consistent": self.affine_consistent,
            "edges": [{"edge": r.edge, "tail": r.tail, "head": r.head, "chi": list(r.chi),
                       "k": r.k, "direction": list(r.direction), "length": r.length}
                      for r in self.edges],
            "cells": self.cells,
            "orientation": "tail = smaller vertex id; chi has first nonzero entry positive",
        }


def _affine_on(verts, coords, fam) -> bool:
    """Whether some affine map sends coords[v] to fam[v] for all v in ``verts``.

    Equivalent to: every affine dependency sum λ_v (x_v, 1) = 0 also kills the a_v.
    """
    if len(verts) <= 1:
        return True
    dim = len(coords[verts[0]])
    rows = [[coords[v][i] for v in verts] for i in range(dim)] + [[1] * len(verts)]
    for lam in integer_kernel(IntMatrix.from_rows(rows, len(verts))).basis:
        for k in range(len(fam[verts[0]])):
            if sum(l * fam[v][k] for l, v in zip(lam, verts)):
                return False
    return True


def affine_report(g: CellularGroupoid, fam: WeightFamily,
                  coords: Mapping[str, Sequence[int]] | None = None) -> AffineReport:
    """Edge-by-edge data of a weight family over a moment-polytope embedding,
    and whether it is affine on each 2-cell."""
    coords = coords if coords is not None else g.coordinates
    if coords is None:
        raise NotMomentPolytope("vertex coordinates are required")
    coords = {v: tuple(int(x) for x in c) for v, c in coords.items()}
    if set(coords) != set(g.complex.vertices):
        raise NotMomentPolytope("coordinates must be given for exactly the vertices")
    chars = edge_characters(g)
    if chars is None:
        raise GroupoidError("affine report needs a one-toric groupoid")
    edges = oriented_edges(g.complex)
    bad = []
    for e in edges:
        if _multiple_of(_sub(coords[e.head], coords[e.tail]), chars[e.id]) in (None, 0):
            bad.append(e.id)
    if bad:
        raise NotMomentPolytope(f"not a moment-polytope embedding: edges {bad} are not parallel "
                                f"to their characters")
    ks = euler_numbers(g, fam)
    fam = _check_family(g, fam)
    reports = tuple(EdgeReport(e.id, e.tail, e.head, chars[e.id], ks[e.id],
                               _sub(coords[e.head], coords[e.tail]),
                               abs(_multiple_of(_sub(coords[e.head], coords[e.tail]),
                                                chars[e.id])))
                    for e in edges)
    cells = {c.id: _affine_on(g.complex.vertex_faces(c.id), coords, fam)
             for c in g.complex.cells_of_dim(2)}
    return AffineReport(reports, cells)
