"""Index sets, exact principal minors, closed small-minor forms, and the
two singularity-preserving reductions (translation and complementation).

`det_exact` works over arbitrary ring elements (memoized Laplace expansion,
no division).  Singularity tests on w-power submatrices take the fast
int64 kernel when it applies and fall back to `det_exact` otherwise; both
paths are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .cyclotomic import CycElem, CycRing
from .errors import PreconditionError
from . import powerdet

DET_MAX_DIM = 28


@dataclass(frozen=True)
class IndexSet:
    """A subset of {0, ..., N-1}: strictly increasing members, fixed modulus."""

    modulus: int
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        prev = -1
        for k in self.members:
            if not isinstance(k, int) or not 0 <= k < self.modulus:
                raise ValueError(f"member {k!r} outside 0..{self.modulus - 1}")
            if k <= prev:
                raise ValueError("members must be strictly increasing")
            prev = k

    @classmethod
    def of(cls, modulus: int, members) -> IndexSet:
        members = sorted(int(k) for k in members)
        if len(set(members)) != len(members):
            raise ValueError("duplicate indices")
        return cls(modulus, tuple(members))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, k: int) -> bool:
        return k in self.members

    @property
    def bitmask(self) -> int:
        if self.modulus > 64:
            raise ValueError("bitmask form is only kept for modulus <= 64")
        mask = 0
        for k in self.members:
            mask |= 1 << k
        return mask


@dataclass(frozen=True)
class MinorRecord:
    """One decided principal minor.

    When `determinant` is present, `singular` equals `determinant.is_zero()`.
    """

    index_set: IndexSet
    size: int
    singular: bool
    determinant: CycElem | None


def complement(k: IndexSet) -> IndexSet:
    present = set(k.members)
    return IndexSet(k.modulus, tuple(i for i in range(k.modulus) if i not in present))


def index_reduce(k: IndexSet) -> IndexSet:
    """Translate so the smallest member becomes 0 (differences mod N)."""
    if len(k) == 0:
        raise PreconditionError("cannot reduce an empty index set")
    base = k.members[0]
    return IndexSet.of(k.modulus, ((x - base) % k.modulus for x in k.members))


def shift(k: IndexSet, c: int) -> IndexSet:
    return IndexSet.of(k.modulus, ((x + c) % k.modulus for x in k.members))


def exponent_matrix(rows: IndexSet, cols: IndexSet) -> np.ndarray:
    r = np.array(rows.members, dtype=np.int64)
    c = np.array(cols.members, dtype=np.int64)
    return (r[:, None] * c[None, :]) % rows.modulus


def submatrix(ring: CycRing, rows: IndexSet, cols: IndexSet) -> list[list[CycElem]]:
    """The matrix (w^(k*l)) for k in rows, l in cols."""
    if rows.modulus != ring.modulus or cols.modulus != ring.modulus:
        raise ValueError("index set modulus does not match the ring")
    if len(rows) != len(cols):
        raise ValueError("row and column sets must have equal cardinality")
    return [[ring.root_power(k * l) for l in cols.members] for k in rows.members]


def det_exact(matrix: list[list[CycElem]]) -> CycElem:
    """Exact determinant over the ring, dimension 1..DET_MAX_DIM.

    Subset dynamic program: level k holds determinants of the first k rows
    against every k-subset of columns; expansion along the last row needs
    no division.  Memory is the largest binomial level, so keep r small.
    """
    r = len(matrix)
    if r == 0:
        raise PreconditionError("determinant of an empty matrix is not defined here")
    if r > DET_MAX_DIM:
        raise PreconditionError(f"dimension {r} exceeds the ceiling {DET_MAX_DIM}")
    if any(len(row) != r for row in matrix):
        raise ValueError("matrix is not square")
    ring = matrix[0][0].ring
    prev = {(): ring.one()}
    for k in range(1, r + 1):
        row = matrix[k - 1]
        cur: dict[tuple[int, ...], CycElem] = {}
        for cols in combinations(range(r), k):
            acc = ring.zero()
            for pos, col in enumerate(cols):
                rest = cols[:pos] + cols[pos + 1:]
                term = row[col] * prev[rest]
                acc = acc + term if (pos + k - 1) % 2 == 0 else acc - term
            cur[cols] = acc
        prev = cur
    return prev[tuple(range(r))]


def _det_fast(ring: CycRing, rows: IndexSet, cols: IndexSet) -> CycElem:
    try:
        return powerdet.det_power_single(ring, exponent_matrix(rows, cols))
    except powerdet.EngineUnavailable:
        return det_exact(submatrix(ring, rows, cols))


def is_singular(ring: CycRing, k: IndexSet, *, prefilter: bool = False) -> bool:
    """Exact singularity of the principal submatrix for index set k.

    With prefilter=True a certified float bound may skip the exact
    determinant for clearly nonsingular minors; every "singular" verdict is
    still confirmed exactly.
    """
    if len(k) == 0:
        raise PreconditionError("singularity of the empty set is not defined")
    if prefilter:
        try:
            vals, errs = powerdet.approx_det_batch(
                ring, exponent_matrix(k, k)[None, :, :]
            )
            if abs(vals[0]) > errs[0]:
                return False
        except powerdet.EngineUnavailable:
            pass
    return _det_fast(ring, k, k).is_zero()


def det_2x2_formula(ring: CycRing, a: int) -> CycElem:
    """Closed form for the minor on {0, a}: w^(a^2) - 1."""
    if not 0 < a <= ring.modulus - 1:
        raise PreconditionError("need 0 < a <= N-1")
    return ring.root_power(a * a) - ring.one()


def det_3x3_formula(ring: CycRing, a: int, b: int) -> CycElem:
    """Closed form for the minor on {0, a, b}:
    (w^(a^2) - 1)(w^(b^2) - 1) - (w^(ab) - 1)^2.
    """
    if not 0 < a < b <= ring.modulus - 1:
        raise PreconditionError("need 0 < a < b <= N-1")
    one = ring.one()
    return (ring.root_power(a * a) - one) * (ring.root_power(b * b) - one) \
        - (ring.root_power(a * b) - one) ** 2


def singular_3x3_condition(ring: CycRing, a: int, b: int) -> bool:
    """Whether (w^(a^2) - 1)(w^(b^2) - 1) equals (w^(ab) - 1)^2."""
    if not 0 < a < b <= ring.modulus - 1:
        raise PreconditionError("need 0 < a < b <= N-1")
    one = ring.one()
    lhs = (ring.root_power(a * a) - one) * (ring.root_power(b * b) - one)
    rhs = (ring.root_power(a * b) - one) ** 2
    return lhs == rhs


SHIFT_CHECK_MAX = 8


def shift_identity_check(ring: CycRing, k: IndexSet) -> bool:
    """Verify det F[K] = w^(a1*(-r*a1 + 2*sum(K))) * det F[L], L = K - a1.

    Exact check of the translation identity behind `index_reduce`, at test
    scale (|K| <= 8).
    """
    r = len(k)
    if not 1 <= r <= SHIFT_CHECK_MAX:
        raise PreconditionError(f"need 1 <= |K| <= {SHIFT_CHECK_MAX}")
    lhs = det_exact(submatrix(ring, k, k))
    reduced = index_reduce(k)
    a1 = k.members[0]
    exponent = a1 * (-r * a1 + 2 * sum(k.members))
    rhs = ring.root_power(exponent) * det_exact(submatrix(ring, reduced, reduced))
    return lhs == rhs


def minor_record(ring: CycRing, k: IndexSet) -> MinorRecord:
    det = _det_fast(ring, k, k)
    return MinorRecord(index_set=k, size=len(k), singular=det.is_zero(), determinant=det)
