import itertools
import random
from fractions import Fraction

import pytest

from isorep.intlat import hnf
from isorep.torus import (
    RankMismatch,
    TorusSubgroup,
    contains,
    generated_join,
    intersect,
    structure,
    subgroup_from_characters,
)

DIAG = subgroup_from_characters(2, [[1, -1]])
CIRCLE_2 = subgroup_from_characters(2, [[1, 0]])      # 1 × S¹
CIRCLE_1 = subgroup_from_characters(2, [[0, 1]])      # S¹ × 1


def torsion_points(n, max_order=12):
    """Points of T^n = R^n/Z^n of order at most max_order, as tuples of fractions in [0, 1)."""
    pts = set()
    for d in range(1, max_order + 1):
        for a in itertools.product(range(d), repeat=n):
            pts.add(tuple(Fraction(x, d) for x in a))
    return sorted(pts)


def in_subgroup(t, H):
    return all(sum(c * x for c, x in zip(row, t)).denominator == 1 for row in H.ann.basis)


def random_subgroup(rng, n):
    rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(rng.randint(0, n + 1))]
    return subgroup_from_characters(n, rows)


def test_from_characters_examples():
    assert DIAG.dim == 1 and structure(DIAG).pi0 == ()
    # the diagonal circle: exactly the points (x, x)
    for t in torsion_points(2, 6):
        assert in_subgroup(t, DIAG) == (t[0] == t[1])
    assert subgroup_from_characters(2, []) == TorusSubgroup.full(2)
    two = subgroup_from_characters(1, [[2]])
    assert [t for t in torsion_points(1, 8) if in_subgroup(t, two)] == [(0,), (Fraction(1, 2),)]


def test_from_characters_rejects_wrong_width():
    with pytest.raises(RankMismatch):
        subgroup_from_characters(2, [[1, 0, 0]])


def test_contains_examples():
    assert contains(TorusSubgroup.full(2), DIAG)
    assert contains(DIAG, subgroup_from_characters(2, [[1, -1], [1, 0]]))
    assert not contains(DIAG, CIRCLE_2)
    with pytest.raises(RankMismatch):
        contains(DIAG, TorusSubgroup.full(3))


def test_intersect_join_examples():
    assert generated_join(DIAG, CIRCLE_2) == TorusSubgroup.full(2)
    assert intersect(DIAG, TorusSubgroup.full(2)) == DIAG
    assert intersect(CIRCLE_2, CIRCLE_1).is_trivial
    with pytest.raises(RankMismatch):
        intersect(DIAG, TorusSubgroup.full(1))


def test_structure_examples():
    s = structure(subgroup_from_characters(2, [[2, 0], [0, 3]]))
    assert (s.dim, s.pi0) == (0, (6,))
    s = structure(TorusSubgroup.full(3))
    assert (s.dim, s.pi0) == (3, ())
    s = structure(CIRCLE_2)
    assert (s.dim, s.pi0) == (1, ())
    assert s.character_group.free_rank == 1


@pytest.mark.parametrize("seed", range(60))
def test_containment_against_torsion_points(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 2)
    H, K = random_subgroup(rng, n), random_subgroup(rng, n)
    pts = torsion_points(n)
    brute = all(in_subgroup(t, H) for t in pts if in_subgroup(t, K))
    assert contains(H, K) == brute
    # intersection is the pointwise intersection
    I = intersect(H, K)
    assert all(in_subgroup(t, I) == (in_subgroup(t, H) and in_subgroup(t, K)) for t in pts)


@pytest.mark.parametrize("seed", range(60))
def test_lattice_order_properties(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    H, K = random_subgroup(rng, n), random_subgroup(rng, n)
    J, I = generated_join(H, K), intersect(H, K)
    assert contains(J, H) and contains(J, K)
    assert contains(H, I) and contains(K, I)
    assert contains(H, H)
    assert contains(H, K) == (generated_join(H, K) == H) == (intersect(H, K) == K)
    s = structure(H)
    assert s.dim + H.ann.rank == n
    assert s.character_group.invariant_factors == s.pi0


def test_canonical_equality():
    a = subgroup_from_characters(2, [[2, 4], [4, 6]])
    b = TorusSubgroup(2, hnf([[2, 0], [0, 2]]))
    assert a == b
    assert a.to_json() == {"characters": [[2, 0], [0, 2]]}
