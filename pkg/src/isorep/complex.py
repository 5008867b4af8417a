"""Regular CW-complexes as face posets, with a simplicial fast path.

Cells carry the full (transitively closed) set of their proper faces.  Only
the combinatorics is stored; incidence numbers are available for simplicial
complexes, where they come from the vertex order.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .intlat import AbelianInvariants, rank, snf


class ComplexError(ValueError):
    pass


def natural_key(s: str):
    """Sort key treating digit runs as numbers, so "v2" < "v10"."""
    return tuple((0, int(t), "") if t.isdigit() else (1, 0, t)
                 for t in re.split(r"(\d+)", s) if t)


@dataclass(frozen=True)
class Cell:
    id: str
    dim: int
    faces: frozenset[str] = frozenset()
    vertices: tuple[str, ...] | None = None


@dataclass(frozen=True)
class Violation:
    cell: str
    reason: str

    def __str__(self):
        return f"{self.cell}: {self.reason}"


@dataclass(frozen=True)
class OrientedEdge:
    id: str
    tail: str
    head: str


def _cell_order(c: Cell):
    return (c.dim, natural_key(c.id))


@dataclass(frozen=True)
class CwComplex:
    cells: Mapping[str, Cell] = field(default_factory=dict)
    simplicial: bool = False

    @classmethod
    def from_cells(cls, cells: Iterable[Cell], simplicial: bool = False, close: bool = True):
        cells = list(cells)
        ids = [c.id for c in cells]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1}, key=natural_key)
            raise ComplexError(f"duplicate cell ids: {dup}")
        out = cls({c.id: c for c in sorted(cells, key=_cell_order)}, simplicial)
        return out.closed() if close else out

    @classmethod
    def from_simplices(cls, simplices: Iterable[Iterable]) -> "CwComplex":
        """Simplicial complex generated by the given vertex sets (all faces added)."""
        simp = set()
        for s in simplices:
            verts = tuple(sorted({str(v) for v in s}, key=natural_key))
            if not verts:
                continue
            for k in range(1, len(verts) + 1):
                simp.update(itertools.combinations(verts, k))
        sep = "" if all(len(v) == 1 for s in simp for v in s) else "-"
        name = {s: sep.join(s) for s in simp}
        cells = []
        for s in simp:
            faces = frozenset(name[t] for k in range(1, len(s))
                              for t in itertools.combinations(s, k))
            cells.append(Cell(name[s], len(s) - 1, faces, s))
        return cls.from_cells(cells, simplicial=True, close=False)

    def closed(self) -> "CwComplex":
        """Copy with every face set transitively closed.  Unknown ids are kept."""
        memo: dict[str, frozenset[str]] = {}

        def closure(cid, stack=()):
            if cid in memo:
                return memo[cid]
            if cid in stack:
                raise ComplexError(f"face relation has a cycle through {cid}")
            out = set(self.cells[cid].faces)
            for f in self.cells[cid].faces:
                if f in self.cells:
                    out |= closure(f, stack + (cid,))
            memo[cid] = frozenset(out)
            return memo[cid]

        cells = {cid: Cell(c.id, c.dim, closure(cid), c.vertices) for cid, c in self.cells.items()}
        return CwComplex(cells, self.simplicial)

    # -- queries -------------------------------------------------------------

    def __len__(self):
        return len(self.cells)

    def __getitem__(self, cid: str) -> Cell:
        return self.cells[cid]

    @property
    def dim(self) -> int:
        return max((c.dim for c in self.cells.values()), default=-1)

    def cells_of_dim(self, k: int) -> list[Cell]:
        return [c for c in self.cells.values() if c.dim == k]

    @property
    def vertices(self) -> list[str]:
        return [c.id for c in self.cells_of_dim(0)]

    def vertex_faces(self, cid: str) -> list[str]:
        c = self.cells[cid]
        if c.dim == 0:
            return [cid]
        return sorted((f for f in c.faces if f in self.cells and self.cells[f].dim == 0),
                      key=natural_key)

    def is_face(self, f: str, e: str) -> bool:
        """f ≤ e in the face poset."""
        return f == e or f in self.cells[e].faces

    def face_pairs(self):
        """All (f, e) with f a proper face of e, in deterministic order."""
        for e in self.cells.values():
            for f in sorted(e.faces, key=lambda i: _cell_order(self.cells[i])):
                yield f, e.id

    def connected_components(self) -> list[list[str]]:
        """Vertex sets of the connected components (via edges)."""
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for e in self.cells_of_dim(1):
            vs = self.vertex_faces(e.id)
            for w in vs[1:]:
                a, b = find(vs[0]), find(w)
                if a != b:
                    parent[max(a, b, key=natural_key)] = min(a, b, key=natural_key)
        comps: dict[str, list[str]] = {}
        for v in self.vertices:
            comps.setdefault(find(v), []).append(v)
        return sorted(comps.values(), key=lambda c: natural_key(c[0]))

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        out = []
        for c in self.cells.values():
            d = {"id": c.id, "dim": c.dim,
                 "faces": sorted(c.faces, key=lambda i: (self.cells[i].dim, natural_key(i))
                                 if i in self.cells else (-1, natural_key(i)))}
            if c.vertices is not None:
                d["vertices"] = list(c.vertices)
            out.append(d)
        return {"cells": out, "simplicial": self.simplicial}

    @classmethod
    def from_json(cls, data: dict, close: bool = True) -> "CwComplex":
        if "simplices" in data:
            return cls.from_simplices(data["simplices"])
        cells = []
        for d in data["cells"]:
            verts = d.get("vertices")
            cells.append(Cell(str(d["id"]), int(d["dim"]),
                              frozenset(str(f) for f in d.get("faces", [])),
                              tuple(str(v) for v in verts) if verts is not None else None))
        return cls.from_cells(cells, simplicial=bool(data.get("simplicial", False)), close=close)


def validate_regular(c: CwComplex) -> list[Violation]:
    """Combinatorial sanity checks; an empty list means the complex is usable."""
    out = []
    cells = c.cells
    for cell in cells.values():
        for f in sorted(cell.faces, key=natural_key):
            if f not in cells:
                out.append(Violation(cell.id, f"unknown face {f!r}"))
            elif cells[f].dim >= cell.dim:
                out.append(Violation(cell.id, f"face {f!r} does not have smaller dimension"))
            else:
                missing = cells[f].faces - cell.faces
                if missing:
                    out.append(Violation(cell.id, f"not transitively closed: face {f!r} has faces "
                                                  f"{sorted(missing, key=natural_key)} not listed"))
        if cell.dim >= 1 and not any(f in cells and cells[f].dim == 0 for f in cell.faces):
            out.append(Violation(cell.id, "no vertex face"))
        if c.simplicial:
            out.extend(_simplicial_violations(c, cell))
    return out


def _simplicial_violations(c: CwComplex, cell: Cell) -> list[Violation]:
    if cell.vertices is None:
        return [Violation(cell.id, "simplicial cell without vertex list")]
    verts = set(cell.vertices)
    if len(verts) != cell.dim + 1:
        return [Violation(cell.id, f"{len(verts)} vertices for a {cell.dim}-simplex")]
    by_verts = {frozenset(x.vertices): x.id for x in c.cells.values() if x.vertices is not None}
    out = []
    for k in range(1, len(verts)):
        for sub in itertools.combinations(sorted(verts, key=natural_key), k):
            fid = by_verts.get(frozenset(sub))
            if fid is None:
                out.append(Violation(cell.id, f"missing face on vertices {list(sub)}"))
            elif fid not in cell.faces:
                out.append(Violation(cell.id, f"face {fid!r} not listed"))
    return out


def oriented_edges(c: CwComplex) -> list[OrientedEdge]:
    """Edges oriented from the smaller vertex id to the larger one, sorted by edge id."""
    out = []
    for e in sorted(c.cells_of_dim(1), key=lambda x: natural_key(x.id)):
        vs = c.vertex_faces(e.id)
        if len(vs) == 1:
            raise ComplexError(f"edge {e.id!r}: loop not regular")
        if len(vs) != 2:
            raise ComplexError(f"edge {e.id!r} has {len(vs)} vertex faces")
        out.append(OrientedEdge(e.id, vs[0], vs[1]))
    return out


def skeleton(c: CwComplex, k: int) -> CwComplex:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return CwComplex({cid: x for cid, x in c.cells.items() if x.dim <= k}, c.simplicial)


def _simplex_vertices(cell: Cell) -> tuple[str, ...]:
    return tuple(sorted(cell.vertices, key=natural_key))


def coboundary_matrix(c: CwComplex, k: int) -> list[list[int]]:
    """Simplicial coboundary C^k -> C^{k+1}; rows index (k+1)-simplices, columns k-simplices."""
    lo = sorted(c.cells_of_dim(k), key=lambda x: natural_key(x.id))
    hi = sorted(c.cells_of_dim(k + 1), key=lambda x: natural_key(x.id))
    index = {_simplex_vertices(s): j for j, s in enumerate(lo)}
    rows = []
    for s in hi:
        verts = _simplex_vertices(s)
        row = [0] * len(lo)
        for i in range(len(verts)):
            row[index[verts[:i] + verts[i + 1:]]] += (-1) ** i
        rows.append(row)
    return rows


def h2_simplicial(c: CwComplex) -> AbelianInvariants:
    """H^2(A; Z) of a simplicial complex."""
    if not c.simplicial:
        raise ComplexError("H2 is only computed for simplicial complexes; supply H2 manually")
    n1, n2, n3 = (len(c.cells_of_dim(k)) for k in (1, 2, 3))
    if n2 == 0:
        return AbelianInvariants(0)
    d1 = coboundary_matrix(c, 1)
    d2 = coboundary_matrix(c, 2)
    r1 = rank(d1, n1)
    r2 = rank(d2, n2) if n3 else 0
    diag, _, _ = snf(d1, n1)
    return AbelianInvariants(n2 - r2 - r1, tuple(d for d in diag if d > 1))


def disjoint_union(a: CwComplex, b: CwComplex, prefixes=("a:", "b:")) -> CwComplex:
    cells = []
    for pre, c in zip(prefixes, (a, b)):
        for x in c.cells.values():
            cells.append(Cell(pre + x.id, x.dim, frozenset(pre + f for f in x.faces),
                              None if x.vertices is None else tuple(pre + v for v in x.vertices)))
    return CwComplex.from_cells(cells, simplicial=a.simplicial and b.simplicial, close=False)


def barycentric_subdivision(c: CwComplex) -> CwComplex:
    """Order complex of the face poset; a triangulation of A when A is regular.

    Vertices of the subdivision are numbered by the position of the cell in
    id order, so that arbitrary cell ids cannot collide when joined.
    """
    order = sorted(c.cells, key=natural_key)
    index = {cid: i for i, cid in enumerate(order)}
    chains = []

    def extend(chain):
        faces = c.cells[chain[-1]].faces
        # faces covered by the top of the chain
        nxt = [f for f in faces if not any(f in c.cells[g].faces for g in faces)]
        if not nxt:
            chains.append([index[x] for x in chain])
        for f in sorted(nxt, key=natural_key):
            extend(chain + [f])

    for cid in order:
        if not any(cid in x.faces for x in c.cells.values()):
            extend([cid])
    return CwComplex.from_simplices(chains)


def h2(c: CwComplex) -> AbelianInvariants:
    """H^2(A; Z), through the barycentric subdivision when A is not simplicial."""
    if c.simplicial:
        return h2_simplicial(c)
    bad = validate_regular(c)
    if bad:
        raise ComplexError(f"cannot compute H2 of an irregular complex: {bad[0]}")
    if any(len(c.vertex_faces(e.id)) != 2 for e in c.cells_of_dim(1)):
        raise ComplexError("cannot compute H2 with loop edges; supply H2 manually")
    return h2_simplicial(barycentric_subdivision(c))
