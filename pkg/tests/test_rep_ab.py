import itertools
import random
from math import gcd, prod

import numpy as np
import pytest

from isorep.complex import CwComplex, oriented_edges
from isorep.groupoid import (
    HIRZEBRUCH_COORDINATES,
    CellularGroupoid,
    cp1,
    cp2_kappanotonto,
    edge_characters,
    hirzebruch,
    restrict,
    segment,
)
from isorep.intlat import AbelianInvariants, contains_lattice, hnf
from isorep.rep_ab import (
    FamilyError,
    GkmFailure,
    NotMomentPolytope,
    affine_report,
    bundle_group,
    euler_numbers,
    gkm_check,
    gkm_equations,
    rep_abelian,
    rep_circle,
)
from isorep.torus import TorusSubgroup, subgroup_from_characters

from oracles import (
    box,
    gkm_box_solutions,
    members,
    random_groupoid_with_2cells,
    random_one_toric,
)

HIRZ = dict(HIRZEBRUCH_COORDINATES)


def ker(*rows, n=2):
    return subgroup_from_characters(n, rows)


# -- rep_circle ------------------------------------------------------------------

def test_cp2_rank_and_equations():
    g = cp2_kappanotonto()
    rep = rep_circle(g)
    assert (rep.free_rank, rep.torsion) == (3, ())
    pts = np.array(list(box(6, 2)), dtype=np.int64)
    p0, q0, p1, q1, p2, q2 = pts.T
    by_equations = (p0 == p2) & (q0 == q1) & (p1 + q1 == p2 + q2)
    assert np.array_equal(members(pts, rep.lattice), by_equations)


def test_cp2_gkm_forms():
    eqs = gkm_equations(cp2_kappanotonto())
    assert eqs == {"01": [(0, 1)], "02": [(1, 0)], "12": [(1, 1)]}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_full_segment(n):
    full = TorusSubgroup.full(n)
    rep = rep_circle(segment(full, full, full))
    assert (rep.free_rank, rep.torsion) == (n, ())
    for g in rep.generators:
        assert g.family["0"] == g.family["1"]


def test_torsion_segment():
    two = ker((2,), n=1)
    rep = rep_circle(segment(two, two, TorusSubgroup.trivial(1)))
    assert (rep.free_rank, rep.torsion) == (0, (2, 2))
    # brute force: pairs of characters of Z/2 with no edge condition
    pairs = {(a, b) for a in range(2) for b in range(2)}
    assert len(pairs) == prod(rep.torsion)
    assert all(g.order == 2 for g in rep.generators)


def test_cp1_two():
    rep = rep_circle(cp1((2,)))
    assert (rep.free_rank, rep.torsion) == (2, ())
    assert [g.family for g in rep.generators] == [{"0": (1,), "1": (1,)}, {"0": (0,), "1": (2,)}]
    pts = np.array(list(box(2, 6)), dtype=np.int64)
    assert np.array_equal(members(pts, rep.lattice), (pts[:, 0] - pts[:, 1]) % 2 == 0)


def _finite_groupoid(rng, n):
    """Random groupoid over a small simplicial complex with finite vertex groups d·Z^n."""
    nv = rng.randint(2, 4)
    simplices = [[v] for v in range(nv)]
    for e in itertools.combinations(range(nv), 2):
        if rng.random() < 0.6:
            simplices.append(list(e))
    for t in itertools.combinations(range(nv), 3):
        if rng.random() < 0.3:
            simplices.append(list(t))
    cx = CwComplex.from_simplices(simplices)
    rows = {}
    for c in sorted(cx.cells.values(), key=lambda c: c.dim):
        own = [r for f in c.faces for r in rows[f]]
        if c.dim == 0:
            d = rng.randint(1, 4)
            own = [[d * (i == j) for j in range(n)] for i in range(n)]
        elif rng.random() < 0.5:
            own.append([rng.randint(-2, 2) for _ in range(n)])
        rows[c.id] = own
    return CellularGroupoid(cx, n, {c: TorusSubgroup(n, hnf(r, n)) for c, r in rows.items()})


def _brute_finite(g):
    """Order of the classification group, by enumeration of vertex classes."""
    n = g.ambient_rank
    verts = g.complex.vertices
    reps = {}
    for v in verts:
        d = g.ann(v).basis[0][0]
        reps[v] = list(itertools.product(range(d), repeat=n))
    count = 0
    for choice in itertools.product(*(reps[v] for v in verts)):
        a = dict(zip(verts, choice))
        ok = True
        for c in g.complex.cells.values():
            vs = g.complex.vertex_faces(c.id)
            L = g.ann(c.id)
            ok = all(_in(tuple(x - y for x, y in zip(a[w], a[vs[0]])), L) for w in vs[1:])
            if not ok:
                break
        count += ok
    return count


def _in(v, L):
    return bool(members(np.array([v], dtype=np.int64), L)[0])


def _element_counts(torsion, ks=range(1, 13)):
    return [prod(gcd(k, d) for d in torsion) for k in ks]


@pytest.mark.parametrize("seed", range(25))
def test_finite_vertex_groups_against_enumeration(seed):
    rng = random.Random(seed)
    g = _finite_groupoid(rng, rng.randint(1, 2))
    rep = rep_circle(g)
    assert rep.free_rank == 0
    assert prod(rep.torsion) == _brute_finite(g)
    for gen in rep.generators:
        assert rep.contains_family(gen.family)


@pytest.mark.parametrize("d0,d1,e,q", [(4, 4, 2, 2), (6, 4, 2, 2), (6, 9, 3, 3), (8, 4, 4, 4),
                                        (4, 6, 1, 2), (12, 8, 4, 6)])
def test_finite_target_segment(d0, d1, e, q):
    g = segment(ker((d0,), n=1), ker((d1,), n=1), ker((e,), n=1))
    rep = rep_abelian(g, 0, [q])
    # (a0, a1) with q·a_i ≡ 0 mod d_i and a0 ≡ a1 mod e
    sols = [(a0, a1) for a0 in range(d0) for a1 in range(d1)
            if (q * a0) % d0 == 0 and (q * a1) % d1 == 0 and (a0 - a1) % e == 0]
    # the group is determined by how many elements each k kills
    assert _element_counts(rep.torsion) == [
        sum(1 for a0, a1 in sols if (k * a0) % d0 == 0 and (k * a1) % d1 == 0) for k in range(1, 13)]


def test_rep_abelian_examples():
    g = segment(ker((4,), n=1), ker((4,), n=1), ker((2,), n=1))
    rep = rep_abelian(g, 0, [2])
    assert (rep.free_rank, rep.torsion) == (0, (2, 2))
    assert rep_abelian(g, 1) == rep_circle(g)
    full = TorusSubgroup.full(2)
    for q in (2, 3, 5):
        r = rep_abelian(segment(full, full, full), 0, [q])
        assert r.invariants.is_zero


@pytest.mark.parametrize("seed", range(10))
def test_rep_abelian_direct_sum(seed):
    g = random_groupoid_with_2cells(random.Random(seed))
    circle = rep_circle(g)
    for m in (2, 3):
        r = rep_abelian(g, m)
        assert r.free_rank == m * circle.free_rank
        assert prod(r.torsion) == prod(circle.torsion) ** m
        assert len(r.generators) == m * len(circle.generators)


@pytest.mark.parametrize("seed", range(40))
def test_one_toric_box_equivalence(seed):
    rng = random.Random(seed)
    g, chis = random_one_toric(rng, max_vertices=5)
    n = g.ambient_rank
    verts = g.complex.vertices
    edges = [tuple(int(x) for x in e[1:].split("-")) for e in chis]
    brute = gkm_box_solutions(verts, edges, chis, n, r=2)
    rep = rep_circle(g)
    assert members(brute, rep.lattice).all()
    for gen in rep.generators:
        assert gkm_check(g, gen.family) == []
    # every lattice point in the box was found by the enumeration
    grid = np.array(list(box(n * len(verts), 2)), dtype=np.int64) if n * len(verts) <= 8 else None
    if grid is not None:
        assert int(members(grid, rep.lattice).sum()) == len(brute)


@pytest.mark.parametrize("seed", range(40))
def test_skeleton_invariance(seed):
    g = random_groupoid_with_2cells(random.Random(seed))
    assert rep_circle(g) == rep_circle(restrict(g, 1))


def test_enlarging_a_group_shrinks_solutions():
    rng = random.Random(11)
    for _ in range(20):
        g, chis = random_one_toric(rng)
        e = rng.choice(sorted(chis))
        assign = dict(g.assign)
        assign[e] = TorusSubgroup.full(g.ambient_rank)
        bigger = CellularGroupoid(g.complex, g.ambient_rank, assign)
        assert contains_lattice(rep_circle(g).lattice, rep_circle(bigger).lattice)


# -- GKM, Euler numbers ------------------------------------------------------------

def test_gkm_examples():
    h = hirzebruch()
    assert gkm_check(h, HIRZ) == []
    assert gkm_check(h, {v: (0, 0) for v in HIRZ}) == []
    bad = dict(HIRZ, v2=(2, 1))
    assert "v1v2" in gkm_check(h, bad)
    with pytest.raises(FamilyError):
        gkm_check(h, {"v1": (0, 0)})


def test_gkm_general_edge_groups():
    g = segment(TorusSubgroup.full(1), TorusSubgroup.full(1), ker((3,), n=1))
    assert gkm_check(g, {"0": (1,), "1": (4,)}) == []
    assert gkm_check(g, {"0": (1,), "1": (3,)}) == ["01"]


def test_euler_examples():
    assert euler_numbers(cp1((1,)), {"0": (3,), "1": (1,)}) == {"01": -2}
    assert set(euler_numbers(hirzebruch(), {v: (0, 0) for v in HIRZ}).values()) == {0}
    ks = euler_numbers(hirzebruch(), HIRZ)
    assert ks == {"v1v2": 2, "v1v4": 1, "v2v3": -1, "v3v4": -1}
    assert [abs(k) for k in ks.values()] == [2, 1, 1, 1]


def test_euler_rejects_non_gkm():
    with pytest.raises(GkmFailure) as err:
        euler_numbers(hirzebruch(), dict(HIRZ, v2=(2, 1)))
    assert "v1v2" in err.value.edges


@pytest.mark.parametrize("seed", range(30))
def test_euler_reconstructs_generators(seed):
    g, _ = random_one_toric(random.Random(seed))
    chars = edge_characters(g)
    edges = {e.id: e for e in oriented_edges(g.complex)}
    for gen in rep_circle(g).generators:
        ks = euler_numbers(g, gen.family)
        for eid, k in ks.items():
            e = edges[eid]
            diff = tuple(a - b for a, b in zip(gen.family[e.head], gen.family[e.tail]))
            assert diff == tuple(k * c for c in chars[eid])


# -- affine report ---------------------------------------------------------------

def _affine_oracle(a):
    # the one affine relation among (0,0), (2,0), (1,1), (0,1): -x1 + x2 - 2x3 + 2x4 = 0
    return all(-a["v1"][i] + a["v2"][i] - 2 * a["v3"][i] + 2 * a["v4"][i] == 0 for i in range(2))


def test_hirzebruch_affine():
    r = affine_report(hirzebruch(), HIRZ)
    assert r.affine_consistent
    assert [(e.edge, e.chi, e.k, e.direction, e.length) for e in r.edges] == [
        ("v1v2", (1, 0), 2, (2, 0), 2),
        ("v1v4", (0, 1), 1, (0, 1), 1),
        ("v2v3", (1, -1), -1, (-1, 1), 1),
        ("v3v4", (1, 0), -1, (-1, 0), 1),
    ]
    assert affine_report(hirzebruch(), {v: (0, 0) for v in HIRZ}).affine_consistent


def test_non_affine_family_is_flagged():
    h = hirzebruch()
    rep = rep_circle(h)
    found = None
    for cs in itertools.product(range(-1, 2), repeat=len(rep.generators)):
        fam = {v: tuple(sum(c * g.family[v][i] for c, g in zip(cs, rep.generators)) for i in range(2))
               for v in HIRZ}
        report = affine_report(h, fam)
        assert report.affine_consistent == _affine_oracle(fam)
        if not _affine_oracle(fam) and found is None:
            found = fam
    assert found is not None
    assert not affine_report(h, found).cells["A"]


def test_affine_needs_parallel_edges():
    with pytest.raises(NotMomentPolytope, match="not a moment-polytope embedding"):
        affine_report(hirzebruch(), HIRZ, dict(HIRZ, v3=(1, 2)))


# -- bundle group ------------------------------------------------------------------

def test_bundle_group_examples():
    b = bundle_group(hirzebruch())
    assert b.h2.is_zero and b.invariants == b.rep.invariants
    sphere = CwComplex.from_simplices(list(itertools.combinations(range(4), 3)))
    triv = CellularGroupoid(sphere, 2, {c: TorusSubgroup.trivial(2) for c in sphere.cells})
    b = bundle_group(triv)
    assert b.rep.invariants.is_zero
    assert (b.h2.free_rank, b.h2.torsion) == (1, ())
    assert (b.invariants.free_rank, b.invariants.torsion) == (1, ())
    point = CwComplex.from_simplices([[0]])
    g = CellularGroupoid(point, 2, {"0": ker((2, 0), (0, 3))})
    b = bundle_group(g)
    assert (b.rep.free_rank, b.rep.torsion) == (0, (6,)) and b.h2.is_zero


def test_bundle_group_override():
    b = bundle_group(hirzebruch(), AbelianInvariants(0, (2,)))
    assert b.invariants.torsion == (2,)
