"""Exact Grover dynamics on multipartite qudit systems.

Provides the gate-level oracle/diffusion iteration, the closed-form angle
evolution a_k = sin((2k+1)θ), b_k = cos((2k+1)θ) with sin(θ) = sqrt(|S|/N),
the marked-sum + uniform decomposition of the iterated state, the optimal
iteration count, and regime tagging (standard / critical / exceptional).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import BoundNotApplicable, DegenerateSearch, SystemMismatch
from .tensor_core import PureState, QuditSystem, _as_decimal

Regime = str  # "standard" | "critical" | "exceptional"


def round_half_away(x: float) -> int:
    """Nearest integer with ties rounded half away from zero."""
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


@dataclass(frozen=True)
class MarkedSet:
    """The set S of sought computational-basis elements."""

    system: QuditSystem
    elements: frozenset[int]

    def __post_init__(self) -> None:
        elements = frozenset(int(x) for x in self.elements)
        if not elements:
            raise ValueError("the marked set must be non-empty")
        if any(not 0 <= x < self.system.size for x in elements):
            raise ValueError("marked element out of range")
        object.__setattr__(self, "elements", elements)

    @classmethod
    def of(cls, system: QuditSystem, kets: Iterable) -> "MarkedSet":
        """Build from decimals or digit tuples."""
        return cls(system, frozenset(_as_decimal(system, k) for k in kets))

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.elements))


def regime(marked: MarkedSet) -> Regime:
    """standard if |S| < N/4, critical if |S| = N/4, exceptional if |S| > N/4."""
    four_s = 4 * marked.size
    n = marked.system.size
    if four_s < n:
        return "standard"
    if four_s == n:
        return "critical"
    return "exceptional"


@dataclass(frozen=True)
class GroverRun:
    """Closed-form data for the state after k Grover iterations."""

    marked: MarkedSet
    k: int
    theta: float
    a_k: float
    b_k: float
    alpha_k: float
    beta_k: float
    regime: Regime


def apply_oracle(state: PureState, marked: MarkedSet) -> PureState:
    """Sign the searched elements: amplitudes on S are negated."""
    if state.system != marked.system:
        raise SystemMismatch("state and marked set live on different systems")
    amps = state.amps.copy()
    idx = list(marked.elements)
    amps[idx] = -amps[idx]
    return PureState(state.system, amps)


def apply_diffusion(state: PureState) -> PureState:
    """Inversion about the mean: every amplitude a becomes 2·mean(a) - a."""
    amps = state.amps
    mean = amps.mean()
    return PureState(state.system, 2.0 * mean - amps)


def iterate_grover(marked: MarkedSet, k: int) -> PureState:
    """Gate-level statevector run: k oracle+diffusion rounds from uniform."""
    if k < 0:
        raise ValueError("k must be non-negative")
    state = PureState.uniform(marked.system)
    for _ in range(k):
        state = apply_diffusion(apply_oracle(state, marked))
    return state


def grover_state(marked: MarkedSet, k: int) -> tuple[PureState, GroverRun]:
    """Closed-form state after k iterations.

    Returns a_k/sqrt(|S|) on marked indices and b_k/sqrt(N-|S|) elsewhere,
    plus the run record with the marked-sum/uniform split coefficients
    alpha_k = a_k/sqrt(|S|) - b_k/sqrt(N-|S|) and
    beta_k = sqrt(N)·b_k/sqrt(N-|S|).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    n = marked.system.size
    s = marked.size
    if s == n:
        raise DegenerateSearch("all basis states are marked; N - |S| = 0")
    theta = math.asin(math.sqrt(s / n))
    theta_k = (2 * k + 1) * theta
    a_k = math.sin(theta_k)
    b_k = math.cos(theta_k)
    marked_amp = a_k / math.sqrt(s)
    rest_amp = b_k / math.sqrt(n - s)
    amps = np.full(n, rest_amp, dtype=complex)
    amps[list(marked.elements)] = marked_amp
    run = GroverRun(
        marked=marked,
        k=k,
        theta=theta,
        a_k=a_k,
        b_k=b_k,
        alpha_k=marked_amp - rest_amp,
        beta_k=math.sqrt(n) * rest_amp,
        regime=regime(marked),
    )
    return PureState(marked.system, amps), run


def k_opt(marked: MarkedSet) -> int:
    """Round(π/4 · sqrt(N/|S|)), ties rounded half away from zero.

    Evaluated in every regime; in the critical case the true optimum is
    exactly k = 1, which consumers detect via the regime tag.
    """
    n = marked.system.size
    s = marked.size
    if s >= n:
        raise DegenerateSearch("k_opt requires |S| < N")
    return round_half_away(math.pi / 4.0 * math.sqrt(n / s))


def observation_decompose(run: GroverRun) -> tuple[float, float, float]:
    """Split psi_k into alpha_k · (marked sum) + beta_k · (uniform).

    Returns (alpha_k, beta_k, residual) where the residual is the norm of
    psi_k minus the reconstruction; it vanishes identically for runs
    produced by grover_state.
    """
    state, _ = grover_state(run.marked, run.k)
    n = run.marked.system.size
    recon = np.full(n, run.beta_k / math.sqrt(n), dtype=complex)
    recon[list(run.marked.elements)] += run.alpha_k
    residual = float(np.linalg.norm(state.amps - recon))
    return run.alpha_k, run.beta_k, residual


def rank_bound(marked: MarkedSet, k: int) -> tuple[int, int]:
    """Tensor-rank bracket (2, |S|+1) for psi_k with 0 < k < k_opt (standard)."""
    if regime(marked) != "standard":
        raise BoundNotApplicable("rank bound holds in the standard regime only")
    if not 0 < k < k_opt(marked):
        raise BoundNotApplicable(f"rank bound needs 0 < k < k_opt, got k={k}")
    return 2, marked.size + 1
