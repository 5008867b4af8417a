"""Cellular (T^n, A)-groupoids: a closed torus subgroup for every cell of A,
shrinking as cells grow.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .complex import Cell, CwComplex, natural_key, skeleton, validate_regular
from .intlat import LatticeBasis, hnf
from .torus import (
    TorusSubgroup,
    contains,
    generated_join,
    structure,
    subgroup_from_characters,
)


class GroupoidError(ValueError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


@dataclass(frozen=True)
class GroupoidViolation:
    face: str | None
    cell: str
    reason: str

    def __str__(self):
        where = self.cell if self.face is None else f"({self.face}, {self.cell})"
        return f"{where}: {self.reason}"

    def to_json(self) -> dict:
        return {"face": self.face, "cell": self.cell, "reason": self.reason}


@dataclass(frozen=True)
class CellularGroupoid:
    complex: CwComplex
    ambient_rank: int
    assign: Mapping[str, TorusSubgroup]
    coordinates: Mapping[str, tuple[int, ...]] | None = field(default=None, compare=False)

    def __getitem__(self, cid: str) -> TorusSubgroup:
        return self.assign[cid]

    def ann(self, cid: str) -> LatticeBasis:
        return self.assign[cid].ann

    def to_json(self) -> dict:
        ids = list(self.complex.cells)
        out = {
            "complex": self.complex.to_json(),
            "ambient_rank": self.ambient_rank,
            "groups": {cid: self.assign[cid].to_json() for cid in ids if cid in self.assign},
        }
        if self.coordinates is not None:
            out["coordinates"] = {v: list(self.coordinates[v])
                                  for v in sorted(self.coordinates, key=natural_key)}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CellularGroupoid":
        cx = CwComplex.from_json(data["complex"])
        n = int(data["ambient_rank"])
        assign = {}
        for cid, g in data.get("groups", {}).items():
            chars = g.get("characters", [])
            rows = [list(map(int, r)) for r in chars]
            # a wrong width is kept so that validation can report it
            width = len(rows[0]) if rows else n
            assign[str(cid)] = TorusSubgroup(width, hnf(rows, width))
        coords = data.get("coordinates")
        if coords is not None:
            coords = {str(v): tuple(int(x) for x in c) for v, c in coords.items()}
        return cls(cx, n, assign, coords)


def validate_groupoid(g: CellularGroupoid) -> list[GroupoidViolation]:
    """All monotonicity failures, plus any defect of the underlying complex."""
    out = [GroupoidViolation(None, v.cell, v.reason) for v in validate_regular(g.complex)]
    for cid in g.complex.cells:
        H = g.assign.get(cid)
        if H is None:
            out.append(GroupoidViolation(None, cid, "no subgroup assigned"))
        elif H.ambient_rank != g.ambient_rank:
            out.append(GroupoidViolation(None, cid, f"subgroup of T^{H.ambient_rank} in a "
                                                    f"T^{g.ambient_rank} groupoid"))
    for cid in g.assign:
        if cid not in g.complex.cells:
            out.append(GroupoidViolation(None, cid, "subgroup assigned to an unknown cell"))
    if out:
        return out
    for f, e in g.complex.face_pairs():
        if f in g.assign and not contains(g.assign[f], g.assign[e]):
            out.append(GroupoidViolation(f, e, f"group of {e!r} is not contained in the group "
                                               f"of its face {f!r}"))
    return out


def ensure_valid(g: CellularGroupoid) -> CellularGroupoid:
    bad = validate_groupoid(g)
    if bad:
        raise GroupoidError(f"invalid groupoid: {bad[0]}", bad)
    return g


def is_zero_toric(g: CellularGroupoid) -> bool:
    return all(g.assign[v].is_full for v in g.complex.vertices)


def edge_characters(g: CellularGroupoid) -> dict[str, tuple[int, ...]] | None:
    """Primitive χ_e with I(e) = ker χ_e (first nonzero entry positive) for a
    one-toric groupoid, else None."""
    if not is_zero_toric(g):
        return None
    chars = {}
    for e in g.complex.cells_of_dim(1):
        H = g.assign[e.id]
        if H.dim != g.ambient_rank - 1 or structure(H).pi0:
            return None
        # rank-one HNF: the single row has positive pivot and is primitive here
        chars[e.id] = H.ann.basis[0]
    return chars


def is_one_toric(g: CellularGroupoid) -> bool:
    return edge_characters(g) is not None


def restrict(g: CellularGroupoid, k: int) -> CellularGroupoid:
    """The groupoid over the k-skeleton."""
    sk = skeleton(g.complex, k)
    return CellularGroupoid(sk, g.ambient_rank, {c: g.assign[c] for c in sk.cells}, g.coordinates)


# -- builders -----------------------------------------------------------------

def _simplex(m: int) -> CwComplex:
    return CwComplex.from_simplices([list(range(m + 1))])


def simplex_sphere(chars: Sequence[Sequence[int]]) -> CellularGroupoid:
    """Δ^m with I(e) the common kernel of χ_j for j a vertex of e."""
    if not chars:
        raise GroupoidError("need at least one character")
    n = len(chars[0])
    cx = _simplex(len(chars) - 1)
    assign = {c.id: subgroup_from_characters(n, [chars[int(v)] for v in c.vertices])
              for c in cx.cells.values()}
    return ensure_valid(CellularGroupoid(cx, n, assign))


def quotient(g: CellularGroupoid, gamma0: TorusSubgroup) -> CellularGroupoid:
    """Replace every group I(e) by the subgroup generated by I(e) and Γ₀."""
    assign = {c: generated_join(H, gamma0) for c, H in g.assign.items()}
    return ensure_valid(CellularGroupoid(g.complex, g.ambient_rank, assign, g.coordinates))


def segment(h0: TorusSubgroup, h1: TorusSubgroup, h01: TorusSubgroup) -> CellularGroupoid:
    cx = _simplex(1)
    return ensure_valid(CellularGroupoid(cx, h01.ambient_rank, {"0": h0, "1": h1, "01": h01}))


def cp1(chi: Sequence[int]) -> CellularGroupoid:
    n = len(chi)
    if not any(chi):
        raise GroupoidError("χ must be nontrivial")
    full = TorusSubgroup.full(n)
    return segment(full, full, subgroup_from_characters(n, [chi]))


def cp2_kappanotonto() -> CellularGroupoid:
    """CP^2 with the T^2 action over the triangle: edge groups 1×S¹, S¹×1 and the diagonal."""
    cx = _simplex(2)
    ker = lambda *rows: subgroup_from_characters(2, rows)
    assign = {
        "0": ker(), "1": ker(), "2": ker(),
        "01": ker((1, 0)),
        "02": ker((0, 1)),
        "12": ker((1, -1)),
        "012": TorusSubgroup.trivial(2),
    }
    return ensure_valid(CellularGroupoid(cx, 2, assign))


HIRZEBRUCH_COORDINATES = {"v1": (0, 0), "v2": (2, 0), "v3": (1, 1), "v4": (0, 1)}


def hirzebruch() -> CellularGroupoid:
    """The square moment polytope with vertices (0,0), (2,0), (1,1), (0,1).

    Edge groups: v1v2 and v3v4 are 1×S¹, v1v4 is S¹×1, v2v3 is the diagonal;
    the 2-cell ``A`` has trivial group.  Any lattice-equivalent polytope
    would do equally well.
    """
    V = list(HIRZEBRUCH_COORDINATES)
    edges = {"v1v2": ("v1", "v2"), "v2v3": ("v2", "v3"), "v3v4": ("v3", "v4"), "v1v4": ("v1", "v4")}
    cells = [Cell(v, 0) for v in V]
    cells += [Cell(e, 1, frozenset(vs)) for e, vs in edges.items()]
    cells.append(Cell("A", 2, frozenset(V) | frozenset(edges)))
    cx = CwComplex.from_cells(cells)
    ker = lambda *rows: subgroup_from_characters(2, rows)
    assign = {v: ker() for v in V}
    assign.update({"v1v2": ker((1, 0)), "v3v4": ker((1, 0)), "v1v4": ker((0, 1)),
                   "v2v3": ker((1, -1)), "A": TorusSubgroup.trivial(2)})
    return ensure_valid(CellularGroupoid(cx, 2, assign, dict(HIRZEBRUCH_COORDINATES)))


EXAMPLES = ("simplex_sphere", "quotient", "cp1", "hirzebruch", "segment", "cp2_kappanotonto")


def build_example(name: str, params: dict | None = None) -> CellularGroupoid:
    """Build one of the named example groupoids.

    ``params`` keys: ``chars`` (simplex_sphere, quotient), ``gamma0`` (quotient;
    characters cutting out Γ₀), ``chi`` (cp1), ``rank`` plus ``h0``/``h1``/``h01``
    character lists (segment).
    """
    p = dict(params or {})
    if name == "simplex_sphere":
        return simplex_sphere(p["chars"])
    if name == "quotient":
        chars = p["chars"]
        base = simplex_sphere(chars)
        return quotient(base, subgroup_from_characters(len(chars[0]), p["gamma0"]))
    if name == "cp1":
        return cp1(p["chi"])
    if name == "segment":
        n = int(p["rank"])
        H = lambda key: subgroup_from_characters(n, p.get(key, []))
        return segment(H("h0"), H("h1"), H("h01"))
    if name == "hirzebruch":
        return hirzebruch()
    if name == "cp2_kappanotonto":
        return cp2_kappanotonto()
    raise GroupoidError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
