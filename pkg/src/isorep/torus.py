"""Closed subgroups of the torus T^n, stored by their annihilator character lattice.

A character of T^n is a vector w in Z^n.  A closed subgroup H is determined by
the lattice of characters that are trivial on H, and H ⊆ K exactly when
ann(K) ⊆ ann(H).  Intersection of subgroups is the sum of annihilators; the
subgroup generated by H ∪ K has annihilator ann(H) ∩ ann(K).
"""
from __future__ import annotations

from dataclasses import dataclass

from .intlat import (
    LatticeBasis,
    QuotientStructure,
    contains_lattice,
    hnf,
    lattice_intersect,
    lattice_sum,
    quotient_structure,
)


class RankMismatch(ValueError):
    pass


@dataclass(frozen=True)
class TorusSubgroup:
    ambient_rank: int
    ann: LatticeBasis

    def __post_init__(self):
        if self.ann.ambient_dim != self.ambient_rank:
            raise RankMismatch("annihilator lattice lives in the wrong rank")

    @classmethod
    def full(cls, n: int) -> "TorusSubgroup":
        return cls(n, LatticeBasis.zero(n))

    @classmethod
    def trivial(cls, n: int) -> "TorusSubgroup":
        return cls(n, LatticeBasis.full(n))

    @property
    def is_full(self) -> bool:
        return self.ann.rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.ann == LatticeBasis.full(self.ambient_rank)

    @property
    def dim(self) -> int:
        return self.ambient_rank - self.ann.rank

    def to_json(self) -> dict:
        return {"characters": self.ann.tolist()}


def subgroup_from_characters(n: int, chars) -> TorusSubgroup:
    """The subgroup on which every row of ``chars`` is trivial."""
    chars = [list(r) for r in chars]
    for r in chars:
        if len(r) != n:
            raise RankMismatch(f"character {r} does not have {n} entries")
    return TorusSubgroup(n, hnf(chars, n))


def _check(H: TorusSubgroup, K: TorusSubgroup):
    if H.ambient_rank != K.ambient_rank:
        raise RankMismatch(f"torus ranks differ: {H.ambient_rank} vs {K.ambient_rank}")


def contains(H: TorusSubgroup, K: TorusSubgroup) -> bool:
    """True iff K ⊆ H."""
    _check(H, K)
    return contains_lattice(K.ann, H.ann)


def intersect(H: TorusSubgroup, K: TorusSubgroup) -> TorusSubgroup:
    _check(H, K)
    return TorusSubgroup(H.ambient_rank, lattice_sum(H.ann, K.ann))


def generated_join(H: TorusSubgroup, K: TorusSubgroup) -> TorusSubgroup:
    """Closed subgroup generated by H ∪ K."""
    _check(H, K)
    return TorusSubgroup(H.ambient_rank, lattice_intersect(H.ann, K.ann))


@dataclass(frozen=True)
class SubgroupStructure:
    dim: int
    pi0: tuple[int, ...]
    character_group: QuotientStructure


def structure(H: TorusSubgroup) -> SubgroupStructure:
    """Dimension, component group and character group Z^n/ann of H.

    H ≅ T^dim × π₀(H) with π₀(H) the torsion of Z^n/ann.
    """
    q = quotient_structure(H.ann)
    return SubgroupStructure(dim=H.dim, pi0=q.invariant_factors, character_group=q)
