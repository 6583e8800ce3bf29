"""Multipartite qudit states: mixed-radix indexing, flattenings, ranks, compression.

Amplitudes are dense complex vectors ordered with the first factor most
significant, i.e. decimal = j_1·(d_2···d_m) + ... + j_{m-1}·d_m + j_m.
Every value here is immutable and every operation is a pure function, so
concurrent callers need no synchronisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidIndex

# Relative singular-value cutoff for rank decisions.  Grover amplitudes are
# O(1/sqrt(N)), so the cutoff is relative to sigma_max rather than absolute.
DEFAULT_RANK_TOL = 1e-8

_NORM_ATOL = 1e-12


@dataclass(frozen=True)
class QuditSystem:
    """Factor dimensions (d_1, ..., d_m) of a multipartite Hilbert space.

    Physical systems have every d_i >= 2; dimension-1 factors are accepted
    so that support compression can represent a fully collapsed factor.
    """

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if len(dims) == 0:
            raise ValueError("a qudit system needs at least one factor")
        if any(d < 1 for d in dims):
            raise ValueError(f"factor dimensions must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def num_factors(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        """Ambient dimension N = d_1 · ... · d_m."""
        return math.prod(self.dims)

    def check_factor(self, factor: int) -> int:
        """Validate a 1-based factor index and return it 0-based."""
        if not 1 <= factor <= self.num_factors:
            raise InvalidIndex(
                f"factor must be in 1..{self.num_factors}, got {factor}"
            )
        return factor - 1


def _strides(dims: Sequence[int]) -> tuple[int, ...]:
    out = []
    acc = 1
    for d in reversed(dims):
        out.append(acc)
        acc *= d
    return tuple(reversed(out))


@dataclass(frozen=True)
class BasisIndex:
    """A computational-basis label in both digit and decimal form."""

    digits: tuple[int, ...]
    decimal: int


def index_encode(system: QuditSystem, digits: Sequence[int]) -> BasisIndex:
    """Encode factor digits (j_1, ..., j_m) into a BasisIndex."""
    digits = tuple(int(j) for j in digits)
    if len(digits) != system.num_factors:
        raise InvalidIndex(
            f"expected {system.num_factors} digits, got {len(digits)}"
        )
    for j, d in zip(digits, system.dims):
        if not 0 <= j < d:
            raise InvalidIndex(f"digit {j} out of range for factor of dimension {d}")
    decimal = sum(j * s for j, s in zip(digits, _strides(system.dims)))
    return BasisIndex(digits=digits, decimal=decimal)


def index_decode(system: QuditSystem, decimal: int) -> BasisIndex:
    """Recover the digit tuple of a decimal basis label."""
    decimal = int(decimal)
    if not 0 <= decimal < system.size:
        raise InvalidIndex(f"decimal {decimal} out of range for size {system.size}")
    digits = []
    rest = decimal
    for s in _strides(system.dims):
        digits.append(rest // s)
        rest %= s
    return BasisIndex(digits=tuple(digits), decimal=decimal)


def _as_decimal(system: QuditSystem, ket) -> int:
    """Accept a decimal int or a digit tuple and return the decimal."""
    if isinstance(ket, BasisIndex):
        return ket.decimal
    if isinstance(ket, (tuple, list)):
        return index_encode(system, ket).decimal
    return index_decode(system, int(ket)).decimal


@dataclass(frozen=True)
class PureState:
    """A normalized pure state as a dense complex amplitude vector."""

    system: QuditSystem
    amps: np.ndarray

    def __post_init__(self) -> None:
        amps = np.ascontiguousarray(self.amps, dtype=complex)
        if amps.shape != (self.system.size,):
            raise ValueError(
                f"expected {self.system.size} amplitudes, got shape {amps.shape}"
            )
        nrm2 = float(np.vdot(amps, amps).real)
        if nrm2 == 0.0:
            raise ValueError("the all-zero amplitude vector is not a state")
        if abs(nrm2 - 1.0) > _NORM_ATOL:
            raise ValueError(
                f"amplitudes are not normalized (sum |a|^2 = {nrm2!r}); "
                "use PureState.normalized to rescale"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def normalized(cls, system: QuditSystem, amps) -> "PureState":
        """Build a state from an unnormalized amplitude vector."""
        amps = np.asarray(amps, dtype=complex)
        nrm = float(np.linalg.norm(amps))
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(system, amps / nrm)

    @classmethod
    def from_kets(cls, system: QuditSystem, kets: Iterable, coeffs=None) -> "PureState":
        """Normalized superposition of basis kets (digit tuples or decimals)."""
        kets = list(kets)
        if coeffs is None:
            coeffs = [1.0] * len(kets)
        amps = np.zeros(system.size, dtype=complex)
        for ket, c in zip(kets, coeffs):
            amps[_as_decimal(system, ket)] += c
        return cls.normalized(system, amps)

    @classmethod
    def uniform(cls, system: QuditSystem) -> "PureState":
        """The uniform superposition |psi_0> over all basis states."""
        n = system.size
        return cls(system, np.full(n, 1.0 / math.sqrt(n), dtype=complex))

    @property
    def tensor(self) -> np.ndarray:
        """Read-only view of the amplitudes reshaped to the factor dims."""
        return self.amps.reshape(self.system.dims)


@dataclass(frozen=True)
class RationalState:
    """Projective state with exact rational amplitudes (no normalization).

    Carrier for generic-point orbit classification in exact arithmetic;
    at least one amplitude must be nonzero.
    """

    system: QuditSystem
    amps: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        amps = tuple(Fraction(a) for a in self.amps)
        if len(amps) != self.system.size:
            raise ValueError(
                f"expected {self.system.size} amplitudes, got {len(amps)}"
            )
        if all(a == 0 for a in amps):
            raise ValueError("the all-zero amplitude vector is not a state")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_kets(cls, system: QuditSystem, kets: Iterable, coeffs=None) -> "RationalState":
        kets = list(kets)
        if coeffs is None:
            coeffs = [Fraction(1)] * len(kets)
        amps = [Fraction(0)] * system.size
        for ket, c in zip(kets, coeffs):
            amps[_as_decimal(system, ket)] += Fraction(c)
        return cls(system, tuple(amps))


def flatten(state: PureState, factor: int) -> np.ndarray:
    """One-factor flattening: row r collects the amplitudes with digit r.

    Columns enumerate the remaining digits in mixed-radix order with the
    factor removed, so the reshape is bit-exact with respect to
    ``index_encode`` ordering.
    """
    f = state.system.check_factor(factor)
    arr = state.amps.reshape(state.system.dims)
    d = state.system.dims[f]
    return np.moveaxis(arr, f, 0).reshape(d, -1)


def unflatten(matrix: np.ndarray, system: QuditSystem, factor: int) -> np.ndarray:
    """Inverse of :func:`flatten`; returns the flat amplitude vector."""
    f = system.check_factor(factor)
    dims = system.dims
    rest = [d for i, d in enumerate(dims) if i != f]
    arr = np.asarray(matrix, dtype=complex).reshape([dims[f]] + rest)
    return np.moveaxis(arr, 0, f).reshape(system.size)


def numerical_rank(matrix: np.ndarray, tol_rel: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular values above tol_rel · sigma_max (0 for the zero matrix)."""
    if tol_rel <= 0:
        raise ValueError("tol_rel must be positive")
    sv = np.linalg.svd(np.asarray(matrix, dtype=complex), compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol_rel * sv[0]))


def exact_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank of an exact matrix by fraction-free (Bareiss) elimination."""
    m = [list(row) for row in rows]
    if not m:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev = 1
    row = 0
    for col in range(n_cols):
        piv = next((r for r in range(row, n_rows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        for r in range(row + 1, n_rows):
            for c in range(col + 1, n_cols):
                m[r][c] = (m[row][col] * m[r][c] - m[r][col] * m[row][c]) / prev
            m[r][col] = 0 * m[r][col]
        prev = m[row][col]
        rank += 1
        row += 1
        if row == n_rows:
            break
    return rank


def _exact_flatten(state: RationalState, factor: int) -> list[list[Fraction]]:
    f = state.system.check_factor(factor)
    dims = state.system.dims
    d = dims[f]
    stride = _strides(dims)[f]
    rows = [[] for _ in range(d)]
    for dec, a in enumerate(state.amps):
        rows[(dec // stride) % d].append(a)
    return rows


def multilinear_rank(state, tol_rel: float = DEFAULT_RANK_TOL) -> tuple[int, ...]:
    """Rank tuple (r_1, ..., r_m) of the one-factor flattenings.

    Numeric states use SVD with a relative cutoff; rational states are
    ranked exactly with fraction-free elimination (tol_rel is ignored).
    """
    m = state.system.num_factors
    if isinstance(state, RationalState):
        return tuple(exact_rank(_exact_flatten(state, i + 1)) for i in range(m))
    return tuple(numerical_rank(flatten(state, i + 1), tol_rel) for i in range(m))


def compress_support(
    state: PureState, factor: int, tol_rel: float = DEFAULT_RANK_TOL
) -> PureState:
    """Project one factor onto the support actually used by the state.

    The factor dimension d_factor shrinks to the rank r of the factor's
    flattening; the retained subspace is spanned by the top-r left singular
    vectors, so norms and inner products with separable states supported
    there are preserved.
    """
    f = state.system.check_factor(factor)
    mat = flatten(state, factor)
    u, sv, _ = np.linalg.svd(mat, full_matrices=False)
    if sv[0] == 0.0:
        raise ValueError("cannot compress the zero state")
    r = int(np.count_nonzero(sv > tol_rel * sv[0]))
    r = max(r, 1)
    reduced = u[:, :r].conj().T @ mat
    new_dims = list(state.system.dims)
    new_dims[f] = r
    new_system = QuditSystem(tuple(new_dims))
    amps = unflatten(reduced, new_system, factor)
    return PureState.normalized(new_system, amps)
