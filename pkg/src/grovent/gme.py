"""Geometric measure of entanglement via best rank-1 and biseparable overlap.

E_q(psi) = 1 - max |<phi, psi>|^2 over q-separable phi.  The fully separable
optimum (q = n) is found by alternating single-factor optimisation (a
higher-order power iteration): with all factors but one fixed, the optimal
factor vector is the normalised partial contraction, so the overlap is
nondecreasing across updates.  Starts are the leading singular vectors of
each flattening plus seeded random unit vectors.  The biseparable optimum
(q = 2) is exact: the top singular value over all bipartition flattenings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .grover import MarkedSet, grover_state, k_opt, round_half_away
from .tensor_core import PureState

_MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class GmeResult:
    """Best rank-1 approximation found over all starts."""

    value: float
    best_product_state: PureState
    overlap_sq: float
    restarts_used: int
    converged: bool
    sweeps: int


@dataclass(frozen=True)
class BiseparableResult:
    """Exact best biseparable overlap across all bipartitions."""

    value: float
    best_cut: tuple[int, ...]
    overlap_sq: float


@dataclass(frozen=True)
class PeakReport:
    """Location of the entanglement maximum along a Grover run."""

    k_star: int
    e_max: float
    predicted_k: int
    window: tuple[tuple[int, float], ...]


def _hosvd_start(tensor: np.ndarray) -> list[np.ndarray]:
    factors = []
    m = tensor.ndim
    for i in range(m):
        mat = np.moveaxis(tensor, i, 0).reshape(tensor.shape[i], -1)
        u, _, _ = np.linalg.svd(mat, full_matrices=False)
        factors.append(np.ascontiguousarray(u[:, 0]))
    return factors


def _random_start(dims: Sequence[int], rng: np.random.Generator) -> list[np.ndarray]:
    factors = []
    for d in dims:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        factors.append(v / np.linalg.norm(v))
    return factors


def _als_sweeps(tensor, factors, tol, max_sweeps):
    """Alternating optimisation; returns (overlap, factors, sweeps, converged).

    The per-update overlap sequence must be nondecreasing (up to float
    slack); a violation means a bug in the contraction logic.
    """
    m = tensor.ndim
    factors = [np.asarray(f, dtype=complex) for f in factors]
    overlap = 0.0
    last_checked = -math.inf
    for sweep in range(1, max_sweeps + 1):
        prev_overlap = overlap
        # suffix[i] = tensor contracted with conj(u_l) for all l > i
        suffix = [None] * m
        suffix[m - 1] = tensor
        env = tensor
        for i in range(m - 1, 0, -1):
            env = np.tensordot(env, np.conj(factors[i]), axes=([i], [0]))
            suffix[i - 1] = env
        for i in range(m):
            v = suffix[i]
            for l in range(i):
                v = np.tensordot(v, np.conj(factors[l]), axes=([0], [0]))
            nrm = float(np.linalg.norm(v))
            if nrm > 0.0:
                factors[i] = v / nrm
                overlap = nrm
            assert overlap >= last_checked - _MONOTONE_SLACK, (
                f"overlap decreased during sweep {sweep}: "
                f"{last_checked!r} -> {overlap!r}"
            )
            last_checked = overlap
        if abs(overlap - prev_overlap) < tol:
            return overlap, factors, sweep, True
    return overlap, factors, max_sweeps, False


def _product_amps(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def gme_full(
    state: PureState,
    restarts: int = 32,
    tol: float = 1e-10,
    max_sweeps: int = 500,
    seed: int = 0,
) -> GmeResult:
    """E_n: distance to the set of fully separable (rank-1) states.

    Runs one HOSVD-initialised start plus (restarts - 1) seeded random
    starts and keeps the best local optimum.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    tensor = state.tensor
    dims = state.system.dims
    rng = np.random.default_rng(seed)
    best = None
    for start in range(restarts):
        factors = _hosvd_start(tensor) if start == 0 else _random_start(dims, rng)
        overlap, factors, sweeps, converged = _als_sweeps(
            tensor, factors, tol, max_sweeps
        )
        if best is None or overlap > best[0]:
            best = (overlap, factors, sweeps, converged)
    overlap, factors, sweeps, converged = best
    overlap_sq = min(overlap * overlap, 1.0)
    product = PureState.normalized(state.system, _product_amps(factors))
    return GmeResult(
        value=1.0 - overlap_sq,
        best_product_state=product,
        overlap_sq=overlap_sq,
        restarts_used=restarts,
        converged=converged,
        sweeps=sweeps,
    )


def _bipartitions(m: int):
    """All unordered bipartitions of factors 1..m, as the side containing 1."""
    rest = list(range(2, m + 1))
    for mask in range(2 ** (m - 1)):
        side = [1] + [f for i, f in enumerate(rest) if mask >> i & 1]
        if len(side) < m:
            yield tuple(side)


def gme_biseparable(state: PureState) -> BiseparableResult:
    """E_2: distance to the biseparable states, exact via SVD over all cuts."""
    m = state.system.num_factors
    if m < 2:
        raise ValueError("biseparability needs at least two factors")
    tensor = state.tensor
    best_sq, best_cut = -1.0, None
    for cut in _bipartitions(m):
        axes = [f - 1 for f in cut]
        other = [i for i in range(m) if i not in axes]
        mat = tensor.transpose(axes + other).reshape(
            int(np.prod([state.system.dims[i] for i in axes])), -1
        )
        top = float(np.linalg.svd(mat, compute_uv=False)[0])
        if top * top > best_sq:
            best_sq, best_cut = top * top, cut
    best_sq = min(best_sq, 1.0)
    return BiseparableResult(value=1.0 - best_sq, best_cut=best_cut, overlap_sq=best_sq)


def symmetric_objective(deltas: Sequence[float], n: int, s: int, p: int) -> float:
    """f(d_1..d_p) = d_1^n + ... + d_s^n + ((d_1 + ... + d_p)/sqrt(p))^n."""
    deltas = list(deltas)
    if len(deltas) != p:
        raise ValueError(f"expected {p} deltas, got {len(deltas)}")
    if s > p:
        raise ValueError("s must not exceed p")
    if any(d < 0 for d in deltas):
        raise ValueError("deltas must be non-negative")
    head = sum(d**n for d in deltas[:s])
    return head + (sum(deltas) / math.sqrt(p)) ** n


def gme_curve(
    marked: MarkedSet,
    k_range: Iterable[int],
    q="n",
    restarts: int = 32,
    tol: float = 1e-10,
    max_sweeps: int = 500,
    seed: int = 0,
) -> list[tuple[int, float]]:
    """E_q(psi_k) over an iteration range; deterministic given the seed."""
    if q not in ("n", 2):
        raise ValueError("q must be 'n' or 2")
    curve = []
    for k in k_range:
        state, _ = grover_state(marked, k)
        if q == 2:
            value = gme_biseparable(state).value
        else:
            value = gme_full(
                state,
                restarts=restarts,
                tol=tol,
                max_sweeps=max_sweeps,
                seed=seed + k,
            ).value
        curve.append((int(k), float(value)))
    return curve


def find_peak(curve: Sequence[tuple[int, float]], marked: MarkedSet) -> PeakReport:
    """Smallest k attaining the maximum, plus the s/(s+1)·k_opt prediction."""
    window = tuple((int(k), float(v)) for k, v in curve)
    if not window:
        raise ValueError("empty curve")
    ks = [k for k, _ in window]
    if min(ks) > 0 or max(ks) < k_opt(marked):
        raise ValueError("curve must cover 0..k_opt")
    e_max = max(v for _, v in window)
    k_star = min(k for k, v in window if v == e_max)
    s = marked.size
    predicted = round_half_away(s / (s + 1) * k_opt(marked))
    return PeakReport(k_star=k_star, e_max=e_max, predicted_k=predicted, window=window)
