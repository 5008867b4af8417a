"""Finite-level corrections for nonabelian structure groups.

* double cosets Y⁰\\X/Y¹ built from component groups over the half-edges of a graph,
* the sign search deciding whether rank-one conjugacy classes lift coherently,
* canonical forms for the Weyl groups of SO(2k+1) and SO(2k) acting on Z^k.

Component groups are given as multiplication tables; computing them from Lie
theory is left to the caller.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .complex import CwComplex, oriented_edges
from .groupoid import CellularGroupoid, GroupoidError, is_zero_toric, restrict
from .rep_ab import gkm_check
from .torus import structure

DEFAULT_STATE_CAP = 10 ** 6
DEFAULT_VERTEX_CAP = 24


class GroupError(ValueError):
    pass


class CapExceeded(RuntimeError):
    pass


def state_cap(default: int = DEFAULT_STATE_CAP) -> int:
    env = os.environ.get("ISOREP_STATE_CAP")
    return int(env) if env else default


@dataclass(frozen=True)
class FinGroup:
    """Finite group on {0, ..., N-1} with 0 the identity."""

    table: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        N = len(self.table)
        if N == 0:
            raise GroupError("a group has at least one element")
        for row in self.table:
            if len(row) != N or any(not 0 <= x < N for x in row):
                raise GroupError("multiplication table is not N×N over 0..N-1")
        t = self.table
        if any(t[0][x] != x or t[x][0] != x for x in range(N)):
            raise GroupError("0 is not the identity")
        if any(sorted(row) != list(range(N)) for row in t):
            raise GroupError("some element has no inverse")
        for a in range(N):
            ta = t[a]
            for b in range(N):
                tab = t[ta[b]]
                tb = t[b]
                if any(tab[c] != ta[tb[c]] for c in range(N)):
                    raise GroupError(f"multiplication is not associative at ({a}, {b}, ·)")
        object.__setattr__(self, "_inv", tuple(t[a].index(0) for a in range(N)))

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    @property
    def inverse_table(self) -> tuple[int, ...]:
        return self._inv

    def generators(self) -> list[int]:
        """A small generating set, chosen greedily in element order."""
        gens, span = [], {0}
        for a in range(self.order):
            if a not in span:
                gens.append(a)
                span = self.closure(gens)
        return gens

    def closure(self, elems) -> set[int]:
        span = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for g in elems:
                y = self.table[x][g]
                if y not in span:
                    span.add(y)
                    frontier.append(y)
        return span

    def to_json(self) -> dict:
        return {"order": self.order, "table": [list(r) for r in self.table]}

    @classmethod
    def from_json(cls, data) -> "FinGroup":
        if isinstance(data, str):
            return catalog(data)
        table = data["table"]
        if "order" in data and int(data["order"]) != len(table):
            raise GroupError("order does not match the table size")
        return cls(tuple(tuple(int(x) for x in r) for r in table), data.get("name", ""))


def cyclic(n: int) -> FinGroup:
    return FinGroup(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), f"Z{n}")


def trivial() -> FinGroup:
    return FinGroup(((0,),), "trivial")


def from_permutations(gens: Sequence[Sequence[int]], name: str = "") -> FinGroup:
    """Permutation group generated by ``gens`` (images of 0..d-1); the
    identity becomes element 0, the rest follow in discovery order."""
    gens = [tuple(g) for g in gens]
    d = len(gens[0]) if gens else 0
    ident = tuple(range(d))
    elems, index = [ident], {ident: 0}
    i = 0
    while i < len(elems):
        x = elems[i]
        for g in gens:
            y = tuple(x[g[k]] for k in range(d))
            if y not in index:
                index[y] = len(elems)
                elems.append(y)
        i += 1
    table = tuple(tuple(index[tuple(x[y[k]] for k in range(d))] for y in elems) for x in elems)
    return FinGroup(table, name)


def direct_product(G: FinGroup, H: FinGroup) -> FinGroup:
    m = H.order
    N = G.order * m
    table = tuple(tuple(G.mul(a // m, b // m) * m + H.mul(a % m, b % m) for b in range(N))
                  for a in range(N))
    return FinGroup(table, f"{G.name}x{H.name}")


def symmetric3() -> FinGroup:
    return from_permutations([(1, 0, 2), (1, 2, 0)], "S3")


def dihedral(n: int) -> FinGroup:
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return from_permutations([rot, ref], f"D{n}")


def quaternion() -> FinGroup:
    # regular representation of Q8 on {±1, ±i, ±j, ±k} = 0..7
    i = (2, 3, 1, 0, 6, 7, 5, 4)
    j = (4, 5, 7, 6, 1, 0, 2, 3)
    return from_permutations([i, j], "Q8")


def catalog(name: str) -> FinGroup:
    key = name.strip()
    if key in ("trivial", "1", "Z1"):
        return trivial()
    if key == "S3":
        return symmetric3()
    if key == "Q8":
        return quaternion()
    if key.startswith("D") and key[1:].isdigit():
        return dihedral(int(key[1:]))
    parts = key.split("x")
    if len(parts) > 1:
        out = catalog(parts[0])
        for p in parts[1:]:
            out = direct_product(out, catalog(p))
        return FinGroup(out.table, key)
    if key.startswith("Z") and key[1:].isdigit():
        return cyclic(int(key[1:]))
    raise GroupError(f"unknown group {name!r}")


@dataclass(frozen=True)
class GroupHom:
    source: FinGroup
    target: FinGroup
    images: tuple[int, ...]

    def __post_init__(self):
        S, T, f = self.source, self.target, self.images
        if len(f) != S.order or any(not 0 <= y < T.order for y in f):
            raise GroupError("hom image table has the wrong shape")
        for a in range(S.order):
            for b in range(S.order):
                if f[S.mul(a, b)] != T.mul(f[a], f[b]):
                    raise GroupError(f"not a homomorphism: f({a}·{b}) != f({a})·f({b})")

    def __call__(self, a: int) -> int:
        return self.images[a]

    def image(self) -> set[int]:
        return set(self.images)

    @classmethod
    def identity(cls, G: FinGroup) -> "GroupHom":
        return cls(G, G, tuple(range(G.order)))

    @classmethod
    def trivial(cls, S: FinGroup, T: FinGroup) -> "GroupHom":
        return cls(S, T, (0,) * S.order)

    @classmethod
    def inclusion(cls, S: FinGroup, T: FinGroup, images: Sequence[int]) -> "GroupHom":
        return cls(S, T, tuple(images))


def all_homs(S: FinGroup, T: FinGroup) -> list[GroupHom]:
    """Every homomorphism S -> T, by extending assignments on generators."""
    gens = S.generators()
    out = []
    for imgs in itertools.product(range(T.order), repeat=len(gens)):
        f = {0: 0}
        frontier = [0]
        ok = True
        while frontier and ok:
            x = frontier.pop()
            for g, tg in zip(gens, imgs):
                y = S.mul(x, g)
                fy = T.mul(f[x], tg)
                if y in f:
                    if f[y] != fy:
                        ok = False
                        break
                else:
                    f[y] = fy
                    frontier.append(y)
        if ok:
            try:
                out.append(GroupHom(S, T, tuple(f[a] for a in range(S.order))))
            except GroupError:
                pass
    return out


# -- double cosets -------------------------------------------------------------

@dataclass(frozen=True)
class DoubleCosetInstance:
    """Component groups over a graph.

    ``homs[(v, e)]`` maps the vertex group of v to the edge group of e for
    every half-edge (v a vertex of e).
    """

    complex: CwComplex
    edge_groups: Mapping[str, FinGroup]
    vertex_groups: Mapping[str, FinGroup]
    homs: Mapping[tuple[str, str], GroupHom]

    def half_edges(self) -> list[tuple[str, str]]:
        out = []
        for e in oriented_edges(self.complex):
            out += [(e.tail, e.id), (e.head, e.id)]
        return out

    def validate(self) -> None:
        for v in self.complex.vertices:
            if v not in self.vertex_groups:
                raise GroupError(f"vertex {v!r} has no component group")
        for e in oriented_edges(self.complex):
            if e.id not in self.edge_groups:
                raise GroupError(f"edge {e.id!r} has no component group")
        for v, e in self.half_edges():
            h = self.homs.get((v, e))
            if h is None:
                raise GroupError(f"half-edge ({v}, {e}) has no homomorphism")
            if (h.source.table != self.vertex_groups[v].table
                    or h.target.table != self.edge_groups[e].table):
                raise GroupError(f"homomorphism on ({v}, {e}) has the wrong source or target")


@dataclass(frozen=True)
class DoubleCosets:
    count: int
    representatives: tuple[tuple[int, ...], ...]
    orbit_sizes: tuple[int, ...]
    size: int     # |X|


def _orbits(size: int, perms: list[np.ndarray]) -> tuple[int, np.ndarray]:
    if not perms:
        return size, np.arange(size)
    src = np.concatenate([np.arange(size)] * len(perms))
    dst = np.concatenate(perms)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(size, size))
    return connected_components(graph, directed=True, connection="weak")


def _collect(labels: np.ndarray, count: int, decode) -> DoubleCosets:
    size = len(labels)
    sizes = np.bincount(labels, minlength=count)
    first = np.full(count, size, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(size))
    order = np.argsort(first)
    return DoubleCosets(count=int(count),
                        representatives=tuple(decode(int(first[c])) for c in order),
                        orbit_sizes=tuple(int(sizes[c]) for c in order),
                        size=size)


def double_cosets(inst: DoubleCosetInstance, cap: int | None = None) -> DoubleCosets:
    """Orbits of Y⁰ × Y¹ on X = ∏_{half-edges (v,e)} P_e acting by y⁰ x (y¹)⁻¹.

    Representatives are the smallest points of each orbit in mixed-radix order
    (half-edges in edge-id order, tail before head); they are tied to that
    enumeration order and carry no further meaning.
    """
    inst.validate()
    cap = state_cap() if cap is None else cap
    halves = inst.half_edges()
    radix = [inst.edge_groups[e].order for _, e in halves]
    size = 1
    for r in radix:
        size *= r
        if size > cap:
            raise CapExceeded(f"|X| exceeds the state cap {cap}")
    idx = np.arange(size, dtype=np.int64)
    digits = []
    stride = []
    s = 1
    for r in reversed(radix):
        stride.append(s)
        s *= r
    stride = stride[::-1]
    for r, st in zip(radix, stride):
        digits.append((idx // st) % r)

    def act(changes):
        # changes: {position: lookup table applied to that digit}
        out = idx.copy()
        for pos, lut in changes.items():
            d = digits[pos]
            out += (np.asarray(lut, dtype=np.int64)[d] - d) * stride[pos]
        return out

    perms = []
    for v in inst.complex.vertices:
        P = inst.vertex_groups[v]
        at_v = [i for i, (w, _) in enumerate(halves) if w == v]
        for g in P.generators():
            changes = {}
            for i in at_v:
                e = halves[i][1]
                Pe = inst.edge_groups[e]
                h = inst.homs[(v, e)](g)
                changes[i] = [Pe.mul(h, x) for x in range(Pe.order)]
            if changes:
                perms.append(act(changes))
    for e in oriented_edges(inst.complex):
        Pe = inst.edge_groups[e.id]
        at_e = [i for i, (_, f) in enumerate(halves) if f == e.id]
        for g in Pe.generators():
            gi = Pe.inv(g)
            lut = [Pe.mul(x, gi) for x in range(Pe.order)]
            perms.append(act({i: lut for i in at_e}))

    count, labels = _orbits(size, perms)

    def decode(k):
        return tuple(int(k // st % r) for r, st in zip(radix, stride))

    return _collect(labels, count, decode)


def segment_double_cosets(P0: FinGroup, P01: FinGroup, P1: FinGroup,
                          j0: GroupHom, j1: GroupHom) -> DoubleCosets:
    """im(j0) \\ P01 / im(j1), computed directly."""
    for j, S in ((j0, P0), (j1, P1)):
        if j.source.table != S.table or j.target.table != P01.table:
            raise GroupError("homomorphism has the wrong source or target")
    left, right = sorted(j0.image()), sorted(j1.image())
    seen = [False] * P01.order
    reps, sizes = [], []
    for z in range(P01.order):
        if seen[z]:
            continue
        orbit = {P01.mul(P01.mul(h, z), P01.inv(k)) for h in left for k in right}
        for y in orbit:
            seen[y] = True
        reps.append((z,))
        sizes.append(len(orbit))
    return DoubleCosets(len(reps), tuple(reps), tuple(sizes), P01.order)


def segment_instance(P0, P01, P1, j0, j1) -> DoubleCosetInstance:
    cx = CwComplex.from_simplices([[0, 1]])
    return DoubleCosetInstance(cx, {"01": P01}, {"0": P0, "1": P1},
                               {("0", "01"): j0, ("1", "01"): j1})


def toral_edge_shortcut(g: CellularGroupoid) -> bool:
    """True when every edge group is connected, so each fiber Z(α) is a single point
    for connected structure groups and no component data is needed."""
    return all(not structure(g.assign[e.id]).pi0 for e in g.complex.cells_of_dim(1))


# -- kappa lifts ---------------------------------------------------------------

@dataclass(frozen=True)
class KappaLift:
    witness: dict[str, tuple[int, ...]] | None
    signs: dict[str, int] | None
    checked: int
    total: int

    @property
    def found(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        return {
            "lift": self.found,
            "witness": self.witness,
            "signs": self.signs,
            "assignments_checked": self.checked,
            "assignments_total": self.total,
        }


def kappa_lift_rank1(g: CellularGroupoid, classes: Mapping[str, Sequence[int]],
                     fix_components: bool = False,
                     max_vertices: int = DEFAULT_VERTEX_CAP) -> KappaLift:
    """Search signs σ_v = ±1 making (σ_v a_v) satisfy the edge conditions.

    Sign patterns are tried in lexicographic order over the vertices (+ before
    -), so the witness is deterministic.  With ``fix_components`` the first
    vertex of each connected component keeps sign +, which loses nothing since
    a global sign flip on a component preserves the conditions.
    """
    if not is_zero_toric(g):
        raise GroupoidError("kappa lift search needs a zero-toric groupoid")
    graph = restrict(g, 1)
    verts = list(graph.complex.vertices)
    if len(verts) > max_vertices:
        raise CapExceeded(f"{len(verts)} vertices exceed the cap {max_vertices}")
    classes = {v: tuple(int(x) for x in classes[v]) for v in verts} \
        if set(classes) >= set(verts) else None
    if classes is None:
        raise GroupoidError("a class is needed at every vertex")
    fixed = {comp[0] for comp in graph.complex.connected_components()} if fix_components else set()
    free = [v for v in verts if v not in fixed]
    total = 2 ** len(free)
    env = os.environ.get("ISOREP_STATE_CAP")
    if env and total > int(env):
        raise CapExceeded(f"{total} sign assignments exceed the state cap {env}")
    checked = 0
    for pattern in itertools.product((1, -1), repeat=len(free)):
        checked += 1
        signs = dict.fromkeys(fixed, 1)
        signs.update(zip(free, pattern))
        fam = {v: tuple(signs[v] * x for x in classes[v]) for v in verts}
        if not gkm_check(graph, fam):
            return KappaLift(fam, {v: signs[v] for v in verts}, checked, total)
    return KappaLift(None, None, checked, total)


# -- Weyl canonical forms ------------------------------------------------------

def weyl_canonical(series: str, v: Sequence[int]) -> tuple[int, ...]:
    """Representative of the Weyl orbit of v in Z^k.

    B (SO(2k+1)): permutations and all sign changes; result 0 ≤ r_1 ≤ ... ≤ r_k.
    D (SO(2k)): permutations and even sign changes; result
    0 ≤ r_1 ≤ ... ≤ r_{k-1} ≤ |r_k|, with r_k < 0 only when v has an odd number
    of negative entries and no zero entry.
    """
    s = series.upper()
    if s not in ("B", "D"):
        raise ValueError(f"series must be B or D, not {series!r}")
    out = sorted(abs(int(x)) for x in v)
    if s == "D" and out and 0 not in out and sum(1 for x in v if x < 0) % 2:
        out[-1] = -out[-1]
    return tuple(out)


def in_fundamental_domain(series: str, r: Sequence[int]) -> bool:
    r = list(r)
    if not r:
        return True
    if series.upper() == "B":
        return 0 <= r[0] and all(a <= b for a, b in zip(r, r[1:]))
    head = r[:-1]
    return (all(x >= 0 for x in head) and all(a <= b for a, b in zip(head, head[1:]))
            and (not head or head[-1] <= abs(r[-1])))
