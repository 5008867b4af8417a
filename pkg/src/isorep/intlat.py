"""Exact integer linear algebra: Hermite/Smith normal forms and sublattices of Z^n.

Everything here works on Python ints, so entries never overflow.  Matrices are
row-major; a lattice is always the row span of its basis.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

Vector = tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix.  ``rows`` or ``cols`` may be zero."""

    nrows: int
    ncols: int
    entries: tuple[Vector, ...]

    def __post_init__(self):
        if len(self.entries) != self.nrows:
            raise ValueError("row count mismatch")
        for row in self.entries:
            if len(row) != self.ncols:
                raise ValueError(f"row {row} does not have {self.ncols} entries")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], ncols: int | None = None) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(rows[0])
        return cls(len(rows), ncols, rows)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls(nrows, ncols, tuple((0,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.ncols, self.nrows,
                         tuple(tuple(self.entries[i][j] for i in range(self.nrows))
                               for j in range(self.ncols)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in product")
        cols = other.T.entries
        return IntMatrix(self.nrows, other.ncols,
                         tuple(tuple(_dot(r, c) for c in cols) for r in self.entries))

    def __getitem__(self, i: int) -> Vector:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def vecmul(self, v: Sequence[int]) -> Vector:
        """Row vector times matrix."""
        if len(v) != self.nrows:
            raise ValueError("dimension mismatch")
        return tuple(sum(v[i] * self.entries[i][j] for i in range(self.nrows) if v[i])
                     for j in range(self.ncols))


def as_matrix(m, ncols: int | None = None) -> IntMatrix:
    if isinstance(m, IntMatrix):
        if ncols is not None and m.ncols != ncols:
            raise ValueError(f"expected {ncols} columns, got {m.ncols}")
        return m
    return IntMatrix.from_rows(m, ncols)


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class LatticeBasis:
    """A sublattice of Z^n given by its canonical row Hermite normal form.

    Build these with :func:`hnf`; two values describe the same lattice iff they
    compare equal.
    """

    ambient_dim: int
    basis: tuple[Vector, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(r) if x) for r in self.basis)

    def matrix(self) -> IntMatrix:
        return IntMatrix(self.rank, self.ambient_dim, self.basis)

    def __contains__(self, v) -> bool:
        return lattice_member(v, self)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.basis]

    @classmethod
    def full(cls, n: int) -> "LatticeBasis":
        return cls(n, IntMatrix.identity(n).entries)

    @classmethod
    def zero(cls, n: int) -> "LatticeBasis":
        return cls(n, ())


def _echelon(rows: list[list[int]], ncols: int, track: bool = False):
    """Row-reduce to canonical HNF in place.

    Returns (rank, U) where U·A = H when ``track`` is set (else U is None).
    Rows below ``rank`` end up zero.
    """
    m = len(rows)
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None

    def swap(i, j):
        rows[i], rows[j] = rows[j], rows[i]
        if track:
            U[i], U[j] = U[j], U[i]

    def axpy(i, q, j):
        # row_i -= q * row_j
        ri, rj = rows[i], rows[j]
        for k in range(ncols):
            if rj[k]:
                ri[k] -= q * rj[k]
        if track:
            ui, uj = U[i], U[j]
            for k in range(m):
                if uj[k]:
                    ui[k] -= q * uj[k]

    r = 0
    for c in range(ncols):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if rows[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(rows[i][c]))
            swap(p, r)
            clean = True
            for i in range(r + 1, m):
                if rows[i][c]:
                    axpy(i, rows[i][c] // rows[r][c], r)
                    if rows[i][c]:
                        clean = False
            if clean:
                break
        if not rows[r][c]:
            continue
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
            if track:
                U[r] = [-x for x in U[r]]
        piv = rows[r][c]
        for i in range(r):
            q = rows[i][c] // piv
            if q:
                axpy(i, q, r)
        r += 1
    return r, U


def hnf(m, ncols: int | None = None) -> LatticeBasis:
    """Canonical HNF basis of the row lattice of ``m``; zero rows are dropped.

    >>> hnf([[2, 4], [4, 6]]).basis
    ((2, 0), (0, 2))
    """
    m = as_matrix(m, ncols)
    rows = [list(r) for r in m.entries]
    rank, _ = _echelon(rows, m.ncols)
    return LatticeBasis(m.ncols, tuple(tuple(r) for r in rows[:rank]))


def hnf_with_transform(m, ncols: int | None = None) -> tuple[IntMatrix, IntMatrix, int]:
    """Return (H, U, rank) with U unimodular and U·m = H in canonical HNF."""
    m = as_matrix(m, ncols)
    rows = [list(r) for r in m.entries]
    rank, U = _echelon(rows, m.ncols, track=True)
    return (IntMatrix.from_rows(rows, m.ncols), IntMatrix.from_rows(U, m.nrows), rank)


def rank(m, ncols: int | None = None) -> int:
    return hnf(m, ncols).rank


def snf(m, ncols: int | None = None) -> tuple[list[int], IntMatrix, IntMatrix]:
    """Smith normal form.

    Returns ``(diag, left, right)`` with ``left·m·right`` diagonal, entries
    nonnegative, each dividing the next, zeros last.  ``left`` and ``right``
    are unimodular.
    """
    m = as_matrix(m, ncols)
    nr, nc = m.nrows, m.ncols
    A = [list(r) for r in m.entries]
    L = [[int(i == j) for j in range(nr)] for i in range(nr)]
    R = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_axpy(i, q, j):
        A[i] = [a - q * b for a, b in zip(A[i], A[j])]
        L[i] = [a - q * b for a, b in zip(L[i], L[j])]

    def col_axpy(i, q, j):
        for row in A:
            row[i] -= q * row[j]
        for row in R:
            row[i] -= q * row[j]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        L[i], L[j] = L[j], L[i]

    def col_swap(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in R:
            row[i], row[j] = row[j], row[i]

    for t in range(min(nr, nc)):
        nz = [(abs(A[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        row_swap(t, i)
        col_swap(t, j)
        while True:
            for i in range(t + 1, nr):
                if A[i][t]:
                    row_axpy(i, A[i][t] // A[t][t], t)
            for j in range(t + 1, nc):
                if A[t][j]:
                    col_axpy(j, A[t][j] // A[t][t], t)
            rest = [(abs(A[i][t]), i, 'r') for i in range(t + 1, nr) if A[i][t]]
            rest += [(abs(A[t][j]), j, 'c') for j in range(t + 1, nc) if A[t][j]]
            if rest:
                _, k, kind = min(rest)
                if kind == 'r':
                    row_swap(t, k)
                else:
                    col_swap(t, k)
                continue
            bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                        if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            # pull the offending row up so the next pass lowers the pivot
            row_axpy(t, -1, bad[0])
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            L[t] = [-x for x in L[t]]

    diag = [A[i][i] for i in range(min(nr, nc))]
    return diag, IntMatrix.from_rows(L, nr), IntMatrix.from_rows(R, nc)


def integer_kernel(m, ncols: int | None = None) -> LatticeBasis:
    """Canonical basis of {x in Z^cols : m·x = 0}."""
    m = as_matrix(m, ncols)
    _, U, r = hnf_with_transform(m.T)
    return hnf(U.entries[r:], m.ncols)


def _check_dim(v, L: LatticeBasis):
    if len(v) != L.ambient_dim:
        raise ValueError(f"vector of length {len(v)} in a lattice of ambient dimension {L.ambient_dim}")


def lattice_coordinates(v: Sequence[int], L: LatticeBasis) -> Vector | None:
    """Integer coefficients c with c·basis = v, or None if v is not in L."""
    _check_dim(v, L)
    w = list(v)
    coeffs = []
    start = 0
    for row, p in zip(L.basis, L.pivots):
        if any(w[start:p]):
            return None
        q, rem = divmod(w[p], row[p])
        if rem:
            return None
        if q:
            for k in range(p, L.ambient_dim):
                w[k] -= q * row[k]
        coeffs.append(q)
        start = p + 1
    if any(w[start:]):
        return None
    return tuple(coeffs)


def lattice_member(v: Sequence[int], L: LatticeBasis) -> bool:
    return lattice_coordinates(v, L) is not None


def reduce_mod(v: Sequence[int], L: LatticeBasis) -> Vector:
    """Canonical representative of v + L: pivot entries brought into [0, pivot)."""
    _check_dim(v, L)
    w = list(v)
    for row, p in zip(L.basis, L.pivots):
        q = w[p] // row[p]
        if q:
            for k in range(p, L.ambient_dim):
                w[k] -= q * row[k]
    return tuple(w)


def _same_dim(L1: LatticeBasis, L2: LatticeBasis):
    if L1.ambient_dim != L2.ambient_dim:
        raise ValueError(f"ambient dimensions differ: {L1.ambient_dim} vs {L2.ambient_dim}")


def lattice_sum(L1: LatticeBasis, L2: LatticeBasis) -> LatticeBasis:
    _same_dim(L1, L2)
    return hnf(L1.basis + L2.basis, L1.ambient_dim)


def lattice_intersect(L1: LatticeBasis, L2: LatticeBasis) -> LatticeBasis:
    _same_dim(L1, L2)
    n = L1.ambient_dim
    if not L1.rank or not L2.rank:
        return LatticeBasis.zero(n)
    # x·B1 = y·B2  <=>  (x, y) in the left kernel of [B1; -B2]
    stacked = IntMatrix.from_rows(L1.basis + tuple(tuple(-a for a in r) for r in L2.basis), n)
    ker = integer_kernel(stacked.T)
    return hnf([L1.matrix().vecmul(k[:L1.rank]) for k in ker.basis], n)


def lattice_scale(L: LatticeBasis, q: int) -> LatticeBasis:
    return hnf([[q * x for x in r] for r in L.basis], L.ambient_dim)


def lattice_divide(L: LatticeBasis, q: int) -> LatticeBasis:
    """The lattice {x in Z^n : q·x in L}."""
    if q <= 0:
        raise ValueError("q must be positive")
    n = L.ambient_dim
    meet = lattice_intersect(L, lattice_scale(LatticeBasis.full(n), q))
    return hnf([[x // q for x in r] for r in meet.basis], n)


def contains_lattice(big: LatticeBasis, small: LatticeBasis) -> bool:
    """True iff ``small`` is a sublattice of ``big``."""
    _same_dim(big, small)
    return all(lattice_member(r, big) for r in small.basis)


@dataclass(frozen=True)
class QuotientStructure:
    """Z^n / L written as Z^free_rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k with d_i | d_{i+1}.

    ``project`` evaluates the quotient map in those coordinates.
    """

    ambient_dim: int
    free_rank: int
    invariant_factors: tuple[int, ...]
    _right: IntMatrix
    _diag: tuple[int, ...]

    def project(self, v: Sequence[int]) -> Vector:
        if len(v) != self.ambient_dim:
            raise ValueError("dimension mismatch")
        w = self._right.vecmul(v)
        r = len(self._diag)
        free = w[r:]
        tors = tuple(w[i] % d for i, d in enumerate(self._diag) if d > 1)
        return tuple(free) + tors

    @property
    def order(self) -> int | None:
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out


def quotient_structure(L: LatticeBasis) -> QuotientStructure:
    diag, _, right = snf(L.matrix())
    diag = tuple(diag)
    return QuotientStructure(
        ambient_dim=L.ambient_dim,
        free_rank=L.ambient_dim - L.rank,
        invariant_factors=tuple(d for d in diag if d > 1),
        _right=right,
        _diag=diag,
    )


def invariant_factors(orders: Iterable[int]) -> tuple[int, ...]:
    """Canonical invariant factors (> 1) of a direct sum of cyclic groups Z/o."""
    orders = [o for o in orders if o != 1]
    if not orders:
        return ()
    diag, _, _ = snf([[o if i == j else 0 for j in range(len(orders))]
                      for i, o in enumerate(orders)])
    return tuple(d for d in diag if d > 1)


@dataclass(frozen=True)
class AbelianInvariants:
    """Isomorphism type Z^free_rank ⊕ Z/d_1 ⊕ ... of a f.g. abelian group."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __add__(self, other: "AbelianInvariants") -> "AbelianInvariants":
        return AbelianInvariants(self.free_rank + other.free_rank,
                                 invariant_factors(self.torsion + other.torsion))

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}
