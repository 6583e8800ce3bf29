"""Closed-form geometric quantities for the separable variety and its secants.

Dimension bounds for secant varieties of the product of projective spaces,
the normalised relative dimension curve, the search-regime split, and the
secant-order / entanglement-peak predictors for marked sets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotApplicable
from .grover import MarkedSet, k_opt, regime, round_half_away
from .tensor_core import QuditSystem, index_decode

__all__ = [
    "SecantDim",
    "secant_dim_bound",
    "nrd_sigma",
    "regime",
    "predicted_secant_order",
    "barycenter_k",
]


@dataclass(frozen=True)
class SecantDim:
    """Dimension data for the k-th secant of the separable variety."""

    n_factors: int
    k: int
    dim_bound: int
    dim_exact_known: int | None
    ambient_dim: int


def secant_dim_bound(system: QuditSystem, k: int) -> SecantDim:
    """dim sigma_k <= k·dim(X) + k - 1, capped by the ambient dimension.

    dim_exact_known is filled only where an exact value is on record: for
    all-qubit systems with k = 2 and n > 2 it is 2n + 1.  The n = 4, k = 3
    qubit case is the known defective one (strict inequality), so nothing
    is recorded there.
    """
    if k < 1:
        raise ValueError("secant order k must be >= 1")
    dim_x = sum(d - 1 for d in system.dims)
    ambient = system.size - 1
    bound = min(k * dim_x + k - 1, ambient)
    exact = None
    all_qubits = all(d == 2 for d in system.dims)
    n = system.num_factors
    if all_qubits and k == 2 and n > 2:
        exact = 2 * n + 1
    return SecantDim(
        n_factors=n,
        k=k,
        dim_bound=bound,
        dim_exact_known=exact,
        ambient_dim=ambient,
    )


def nrd_sigma(n: int) -> float:
    """Normalised relative dimension of the first secant variety.

    (1/3)·(2n+1)/(2^n - 1); the 1/3 factor normalises the value to 1 at
    n = 1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return (2 * n + 1) / (3 * (2**n - 1))


def _locally_orthogonal(marked: MarkedSet) -> bool:
    """True when the marked digit tuples are pairwise distinct in every factor."""
    digit_rows = [
        index_decode(marked.system, x).digits for x in sorted(marked.elements)
    ]
    m = marked.system.num_factors
    for f in range(m):
        col = [row[f] for row in digit_rows]
        if len(set(col)) != len(col):
            return False
    return True


def predicted_secant_order(marked: MarkedSet) -> int:
    """Secant order s+1 of which psi_k is predicted to be a general point.

    Requires the standard regime and marked elements that are pairwise
    orthogonal factor by factor (distinct digits in every slot); outside
    that domain the prediction does not apply.
    """
    if regime(marked) != "standard":
        raise NotApplicable("secant-order prediction needs the standard regime")
    if not _locally_orthogonal(marked):
        raise NotApplicable(
            "marked elements must have pairwise distinct digits in every factor"
        )
    return marked.size + 1


def barycenter_k(marked: MarkedSet) -> int:
    """Predicted entanglement peak Round(|S|/(|S|+1) · k_opt)."""
    if regime(marked) != "standard":
        raise NotApplicable("barycenter prediction needs the standard regime")
    s = marked.size
    return round_half_away(s / (s + 1) * k_opt(marked))
