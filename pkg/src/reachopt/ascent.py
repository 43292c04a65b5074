"""Iterated constrained ascent with budget handling and trajectory logging.

Each step asks the operator field for the local geometry, computes the
unit-effort ascent direction, and moves by a fixed step size. When a budget
constraint is active at the current point and the direction would increase
the cost, the unnormalized ascent vector is projected onto the cost-level
halfspace inside the reachable subspace before normalization. Steps that
would break the budget are retried with halved step sizes; a run halts early
on a degenerate direction or when backtracking is exhausted.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .directions import DirectionKind, DirectionResult, optimal_direction
from .errors import DegenerateDirectionError, InfeasibleStartError
from .operators import ConstraintOperator, OperatorField
from .spectral import SymmetricMatrix

#: The budget counts as active when kappa - C(point) drops below this.
ACTIVATION_TOLERANCE = 1e-8

#: Accepted iterates may exceed kappa by at most this.
BUDGET_SLACK = 1e-8

BACKTRACK_LIMIT = 20


@dataclass(frozen=True)
class Objective:
    """Payoff callbacks: scalar value and its gradient."""

    evaluate: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"


def quadratic_objective(matrix, linear) -> Objective:
    """Concave quadratic payoff ``-0.5 x'Qx + b'x`` with gradient ``-Qx + b``."""
    quad = matrix if isinstance(matrix, SymmetricMatrix) else SymmetricMatrix(matrix)
    offset = np.asarray(linear, dtype=float)
    if offset.shape != (quad.dim,):
        raise ValueError("linear term does not match the quadratic dimension")

    def evaluate(point: np.ndarray) -> float:
        x = np.asarray(point, dtype=float)
        return float(-0.5 * (x @ quad.entries @ x) + offset @ x)

    def gradient(point: np.ndarray) -> np.ndarray:
        x = np.asarray(point, dtype=float)
        return -(quad.entries @ x) + offset

    return Objective(evaluate, gradient, name="quadratic")


def rosenbrock_objective(scale: float = 100.0) -> Objective:
    """Negated 2-d Rosenbrock valley, so that ascent targets the maximum at (1, 1)."""

    def evaluate(point: np.ndarray) -> float:
        x, y = float(point[0]), float(point[1])
        return -((1.0 - x) ** 2 + scale * (y - x * x) ** 2)

    def gradient(point: np.ndarray) -> np.ndarray:
        x, y = float(point[0]), float(point[1])
        return np.array(
            [
                2.0 * (1.0 - x) + 4.0 * scale * x * (y - x * x),
                -2.0 * scale * (y - x * x),
            ]
        )

    return Objective(evaluate, gradient, name="rosenbrock")


def objective_from_config(config: dict) -> Objective:
    kind = config.get("kind")
    if kind == "quadratic":
        return quadratic_objective(config["matrix"], config["linear"])
    if kind == "rosenbrock":
        return rosenbrock_objective(float(config.get("scale", 100.0)))
    raise ValueError(f"unknown objective kind: {kind!r}")


def validate_gradient(
    objective: Objective,
    points,
    rel_tol: float = 1e-5,
    step: float = 1e-6,
) -> float:
    """Check the gradient callback against central finite differences.

    Returns the worst relative mismatch over the probe points and raises
    ``ValueError`` if it exceeds ``rel_tol``.
    """
    worst = 0.0
    for point in points:
        x = np.asarray(point, dtype=float)
        grad = np.asarray(objective.gradient(x), dtype=float)
        numeric = np.zeros_like(x)
        for i in range(x.size):
            bump = np.zeros_like(x)
            bump[i] = step
            numeric[i] = (
                objective.evaluate(x + bump) - objective.evaluate(x - bump)
            ) / (2.0 * step)
        scale = max(1.0, float(np.linalg.norm(grad)))
        worst = max(worst, float(np.linalg.norm(grad - numeric)) / scale)
    if worst > rel_tol:
        raise ValueError(
            f"gradient mismatch {worst:.3e} exceeds tolerance {rel_tol:.1e}"
        )
    return worst


@dataclass(frozen=True)
class BudgetConstraint:
    """Cost functional with its gradient and the budget cap ``kappa``."""

    cost: Callable[[np.ndarray], float]
    cost_gradient: Callable[[np.ndarray], np.ndarray]
    kappa: float

    def __post_init__(self) -> None:
        if self.kappa <= 0.0:
            raise ValueError("kappa must be positive")


def spherical_budget(kappa: float, center=None) -> BudgetConstraint:
    """Squared-distance cost ``|x - center|^2`` under the cap ``kappa``."""
    center_arr = None if center is None else np.asarray(center, dtype=float)

    def cost(point: np.ndarray) -> float:
        x = np.asarray(point, dtype=float)
        shifted = x if center_arr is None else x - center_arr
        return float(shifted @ shifted)

    def cost_gradient(point: np.ndarray) -> np.ndarray:
        x = np.asarray(point, dtype=float)
        shifted = x if center_arr is None else x - center_arr
        return 2.0 * shifted

    return BudgetConstraint(cost, cost_gradient, float(kappa))


def budget_from_config(config: dict | None) -> BudgetConstraint | None:
    if config is None:
        return None
    kind = config.get("kind")
    if kind == "sphere":
        return spherical_budget(float(config["kappa"]), config.get("center"))
    raise ValueError(f"unknown budget kind: {kind!r}")


@dataclass(frozen=True)
class TrajectoryStep:
    step: int
    point: np.ndarray
    objective_value: float
    cost_value: float | None
    kind: DirectionKind
    first_order_gain: float
    step_size: float
    budget_active: bool


@dataclass
class TrajectoryRecord:
    """Per-iteration log of an ascent run plus the terminal state."""

    steps: list[TrajectoryStep]
    status: str
    final_point: np.ndarray
    final_objective: float
    final_cost: float | None
    metadata: dict | None = None


def _budget_state(budget: BudgetConstraint, point: np.ndarray) -> tuple[float, bool]:
    value = float(budget.cost(point))
    active = (budget.kappa - value) < ACTIVATION_TOLERANCE * max(1.0, budget.kappa)
    return value, active


def feasible_direction(
    operator: ConstraintOperator,
    gradient,
    budget: BudgetConstraint,
    point,
) -> DirectionResult:
    """Ascent direction respecting both reachability and an active budget.

    Away from the budget boundary this is exactly the unconstrained optimal
    direction. At an active boundary, if that direction would increase the
    cost, the unnormalized ascent vector is projected onto the halfspace of
    non-increasing cost inside the reachable subspace and renormalized; a
    projection with vanishing effort yields a degenerate result.
    """
    position = np.asarray(point, dtype=float)
    grad = np.asarray(gradient, dtype=float)
    cost_value, active = _budget_state(budget, position)
    if cost_value > budget.kappa + BUDGET_SLACK:
        raise InfeasibleStartError(
            f"cost {cost_value!r} exceeds the budget cap {budget.kappa!r}"
        )
    base = optimal_direction(operator, grad)
    if not active or base.kind is DirectionKind.DEGENERATE:
        return base

    normal = np.asarray(budget.cost_gradient(position), dtype=float)
    if float(normal @ base.direction) <= 0.0:
        return base

    raw = operator.pseudoinverse.apply(grad)
    restricted = operator.project_onto_image(normal)
    weight = float(restricted @ restricted)
    if weight <= 0.0:
        return base
    projected = raw - (float(normal @ raw) / weight) * restricted
    try:
        direction = operator.normalize_effort(projected)
    except DegenerateDirectionError:
        return DirectionResult(
            DirectionKind.DEGENERATE, None, 0.0, base.weighted_gradient_norm
        )
    direction.setflags(write=False)
    gain = float(grad @ direction)
    return DirectionResult(
        DirectionKind.OPTIMAL, direction, gain, base.weighted_gradient_norm
    )


def run_ascent(
    objective: Objective,
    operator_field: OperatorField,
    budget: BudgetConstraint | None,
    theta0,
    steps: int,
    eta: float,
    metadata: dict | None = None,
) -> TrajectoryRecord:
    """Run fixed-step ascent from ``theta0`` and log every iteration.

    Status is ``"completed"`` after the full step budget, ``"degenerate"``
    when no ascent direction remains, and ``"budget-stall"`` when even
    ``BACKTRACK_LIMIT`` halvings of the step cannot keep the cost under the
    cap.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    theta = np.array(theta0, dtype=float)
    if budget is not None:
        start_cost = float(budget.cost(theta))
        if start_cost > budget.kappa + BUDGET_SLACK:
            raise InfeasibleStartError(
                f"starting cost {start_cost!r} exceeds the budget cap {budget.kappa!r}"
            )

    rows: list[TrajectoryStep] = []
    status = "completed"
    for index in range(steps):
        operator = operator_field(theta)
        grad = np.asarray(objective.gradient(theta), dtype=float)
        if budget is None:
            cost_value, active = None, False
            result = optimal_direction(operator, grad)
        else:
            cost_value, active = _budget_state(budget, theta)
            result = feasible_direction(operator, grad, budget, theta)

        if result.kind is DirectionKind.DEGENERATE:
            rows.append(
                TrajectoryStep(
                    index, theta.copy(), float(objective.evaluate(theta)),
                    cost_value, result.kind, result.first_order_gain, 0.0, active,
                )
            )
            status = "degenerate"
            break

        eta_eff = eta
        new_theta = None
        if budget is None:
            new_theta = theta + eta_eff * result.direction
        else:
            for _ in range(BACKTRACK_LIMIT + 1):
                candidate = theta + eta_eff * result.direction
                if float(budget.cost(candidate)) <= budget.kappa + BUDGET_SLACK:
                    new_theta = candidate
                    break
                eta_eff *= 0.5
        if new_theta is None:
            rows.append(
                TrajectoryStep(
                    index, theta.copy(), float(objective.evaluate(theta)),
                    cost_value, result.kind, result.first_order_gain, 0.0, active,
                )
            )
            status = "budget-stall"
            break

        rows.append(
            TrajectoryStep(
                index, theta.copy(), float(objective.evaluate(theta)),
                cost_value, result.kind, result.first_order_gain, eta_eff, active,
            )
        )
        theta = new_theta

    final_cost = None if budget is None else float(budget.cost(theta))
    return TrajectoryRecord(
        steps=rows,
        status=status,
        final_point=theta,
        final_objective=float(objective.evaluate(theta)),
        final_cost=final_cost,
        metadata=metadata,
    )


def write_trace_csv(record: TrajectoryRecord, path) -> None:
    """Write the per-step log as CSV: step, theta..., J, C, gain, kind, eta_eff."""
    dim = record.final_point.shape[0]
    header = ["step", *(f"theta_{i}" for i in range(dim)), "J", "C", "gain", "kind",
              "eta_eff"]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in record.steps:
            cost = "" if row.cost_value is None else repr(row.cost_value)
            writer.writerow(
                [
                    row.step,
                    *(repr(float(x)) for x in row.point),
                    repr(row.objective_value),
                    cost,
                    repr(row.first_order_gain),
                    row.kind.value,
                    repr(row.step_size),
                ]
            )
