"""First-order ascent directions under reachability and unit-effort pricing.

The central fact: among all reachable unit-effort variations, the payoff
gradient is maximized along the pseudoinverse-weighted gradient, and the
maximal gain equals the effort-weighted norm of that vector. When the
operator annihilates the gradient, no reachable direction has positive
first-order payoff and the result is degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DegenerateDirectionError,
    DimensionMismatchError,
    InadmissibleDirectionError,
)
from .operators import ConstraintOperator

#: Degeneracy test: the operator-gradient product must exceed this relative level.
DEGENERACY_FACTOR = 1e-12

_GAIN_ADMISSIBILITY_TOL = 1e-6


class DirectionKind(str, Enum):
    OPTIMAL = "optimal"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class DirectionResult:
    """Outcome of a direction solve.

    ``direction`` is present only for optimal results and has unit effort.
    ``weighted_gradient_norm`` is the effort norm of the pseudoinverse-weighted
    gradient, which equals ``first_order_gain`` at an unconstrained optimum.
    """

    kind: DirectionKind
    direction: np.ndarray | None
    first_order_gain: float
    weighted_gradient_norm: float


def _coerce_gradient(operator: ConstraintOperator, gradient) -> np.ndarray:
    vec = np.asarray(gradient, dtype=float)
    if vec.shape != (operator.dim,):
        raise DimensionMismatchError(
            f"gradient of shape {vec.shape} does not match dimension {operator.dim}"
        )
    return vec


def optimal_direction(operator: ConstraintOperator, gradient) -> DirectionResult:
    """Unit-effort direction maximizing first-order payoff among reachable ones.

    Returns an optimal result whenever the operator-gradient product is
    nonzero at the relative level ``DEGENERACY_FACTOR``; otherwise the
    gradient is (numerically) a kernel direction and the degenerate branch
    applies: every reachable direction has zero first-order payoff.
    """
    grad = _coerce_gradient(operator, gradient)
    weighted = operator.pseudoinverse.apply(grad)
    weighted_norm = math.sqrt(max(float(grad @ weighted), 0.0))

    mapped = float(np.linalg.norm(operator.apply(grad)))
    threshold = DEGENERACY_FACTOR * operator.operator_norm * float(np.linalg.norm(grad))
    if mapped <= threshold:
        return DirectionResult(DirectionKind.DEGENERATE, None, 0.0, weighted_norm)

    try:
        direction = operator.normalize_effort(weighted)
    except DegenerateDirectionError:
        return DirectionResult(DirectionKind.DEGENERATE, None, 0.0, weighted_norm)
    direction.setflags(write=False)
    gain = float(grad @ direction)
    return DirectionResult(DirectionKind.OPTIMAL, direction, gain, weighted_norm)


def first_order_gain(operator: ConstraintOperator, gradient, direction) -> float:
    """Payoff slope along an admissible direction.

    Raises
    ------
    InadmissibleDirectionError
        If the direction is not reachable with unit effort within 1e-6.
    """
    grad = _coerce_gradient(operator, gradient)
    if not operator.is_admissible(direction, tol=_GAIN_ADMISSIBILITY_TOL):
        raise InadmissibleDirectionError(
            "direction is not a reachable unit-effort variation"
        )
    return float(grad @ np.asarray(direction, dtype=float))


def sample_unit_effort(operator: ConstraintOperator, count: int, rng=None) -> np.ndarray:
    """Sample unit-effort directions uniformly-in-angle over the reachable set.

    Gaussian coefficients are drawn in the retained eigenbasis and each sample
    is rescaled to unit effort, which parameterizes the admissible set
    exactly. Returns an array of shape ``(count, dim)``.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    rank = operator.reachable_dim
    if rank == 0:
        raise DegenerateDirectionError(
            "the zero operator admits no unit-effort directions"
        )
    generator = np.random.default_rng(rng)
    values = operator.spectrum.eigenvalues[:rank]
    basis = operator.spectrum.eigenvectors[:, :rank]
    coeff = generator.standard_normal((count, rank))
    efforts = (coeff * coeff) @ values
    efforts = np.maximum(efforts, np.finfo(float).tiny)
    return (coeff / np.sqrt(efforts)[:, None]) @ basis.T
