"""Geometry of the valid-model set and anomalous-shift maximization.

The set of valid coefficient vectors is the linear image of the 8-outcome
probability simplex; its 8 facets are the positivity constraints, one per
joint assignment, and its 8 vertices are the point-mass models.

maximize_margin searches for the model maximizing the anomalous-shift
margin max_{psi,phi} |E[s|psi,phi]| - |E[s|psi]|. The search variable is
the table itself (mapped onto the simplex), so every iterate is feasible
by construction. The objective is nonsmooth, hence a multistart
derivative-free local search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .generators import classical_maximal
from .model import (
    TOL_EVENT,
    CoefficientVector,
    Outcome,
    OUTCOMES,
    ProbabilityTable,
    coefficients_from_table,
    monomials,
    shift_report,
    table_from_coefficients,
)

DEFAULT_RESTARTS = 200
DEFAULT_MAX_EVALS = 2000


@dataclass(frozen=True)
class PolytopeFacet:
    """One positivity constraint: slack = 8 * Pr at the assignment."""

    assignment: Outcome
    slack: float


@dataclass(frozen=True)
class OptimizationResult:
    best_model: CoefficientVector
    best_margin: float
    witness: Optional[tuple[int, int]]
    trace: tuple[tuple[int, float], ...]
    restarts_used: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "best_margin": self.best_margin,
            "coefficients": list(self.best_model.c),
            "witness": list(self.witness) if self.witness else None,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
        }


class BudgetExhausted(RuntimeError):
    """No restart converged within its evaluation budget; carries the best result."""

    def __init__(self, result: OptimizationResult):
        self.result = result
        super().__init__(
            f"evaluation budget exhausted; best margin so far {result.best_margin:.6g}")


def facet_slacks(c: CoefficientVector) -> tuple[PolytopeFacet, ...]:
    """Slack of each positivity facet; the model is valid iff all are >= 0."""
    facets = []
    for o in OUTCOMES:
        m = monomials(o)
        slack = 1.0 + sum(ci * mi for ci, mi in zip(c.c, m))
        facets.append(PolytopeFacet(assignment=o, slack=slack))
    return tuple(facets)


def min_slack(c: CoefficientVector) -> float:
    return min(f.slack for f in facet_slacks(c))


def vertices() -> tuple[CoefficientVector, ...]:
    """Coefficient vectors of the 8 point-mass tables (polytope vertices)."""
    return tuple(CoefficientVector(monomials(o)) for o in OUTCOMES)


def _margin_of_entries(p: Sequence[float]) -> tuple[float, Optional[tuple[int, int]]]:
    """Best anomalous-shift margin of a normalized 8-entry table.

    Fast path used inside the optimizer loop; skips (psi, phi) pairs whose
    probability vanishes. Returns (-1.0, None) when nothing is defined.
    """
    best = -1.0
    witness = None
    for psi, base in ((1, 0), (-1, 4)):
        pr_psi = p[base] + p[base + 1] + p[base + 2] + p[base + 3]
        if pr_psi <= TOL_EVENT:
            continue
        abs_pre = abs(p[base] + p[base + 1] - p[base + 2] - p[base + 3]) / pr_psi
        for phi, off in ((1, 0), (-1, 1)):
            pr_pair = p[base + off] + p[base + 2 + off]
            if pr_pair <= TOL_EVENT:
                continue
            margin = abs(p[base + off] - p[base + 2 + off]) / pr_pair - abs_pre
            if margin > best:
                best = margin
                witness = (psi, phi)
    return best, witness


def _simplex_map(x: np.ndarray) -> np.ndarray:
    """Map unconstrained coordinates onto the simplex (squared-normalization)."""
    q = x * x
    total = q.sum()
    if total <= 1e-300:
        return np.full(8, 0.125)
    return q / total


def _product_map(y: np.ndarray) -> np.ndarray:
    """Map R^5 onto the conditionally independent (product) models.

    y -> (Pr(psi=+1), Pr(s=+1|psi=+1), Pr(s=+1|psi=-1),
          Pr(phi=+1|psi=+1), Pr(phi=+1|psi=-1)) via a logistic squash;
    the induced table factorizes, so the theorem bound holds structurally.
    """
    w = 0.5 * (1.0 + np.tanh(y))
    p = np.empty(8)
    for i, (psi, base) in enumerate(((1, 0), (-1, 4))):
        pr_psi = w[0] if psi == 1 else 1.0 - w[0]
        qs, qphi = w[1 + i], w[3 + i]
        p[base + 0] = pr_psi * qs * qphi
        p[base + 1] = pr_psi * qs * (1.0 - qphi)
        p[base + 2] = pr_psi * (1.0 - qs) * qphi
        p[base + 3] = pr_psi * (1.0 - qs) * (1.0 - qphi)
    return p


def default_starts(constraint: str) -> list[np.ndarray]:
    """Analytic candidates and vertices, as tables (unconstrained mode only)."""
    if constraint == "require_ci":
        return [np.zeros(5)]
    starts = []
    cmax = table_from_coefficients(classical_maximal())
    starts.append(np.array(cmax.p))
    flipped = CoefficientVector((0.0,) * 6 + (-1.0,))
    starts.append(np.array(table_from_coefficients(flipped).p))
    for o in OUTCOMES:
        e = np.zeros(8)
        e[OUTCOMES.index(o)] = 1.0
        starts.append(e)
    return starts


def maximize_margin(
    constraint: str = "none",
    restarts: int = DEFAULT_RESTARTS,
    max_evals: int = DEFAULT_MAX_EVALS,
    seed: int = 0,
    starts: Optional[Sequence[np.ndarray]] = None,
) -> OptimizationResult:
    """Maximize the anomalous-shift margin over all valid models.

    constraint="none" searches the full simplex; "require_ci" searches the
    product-model family (conditional independence holds by construction).
    ``starts`` optionally overrides the start list: tables (length-8) for
    the unconstrained search, product parameters (length-5) otherwise.
    Deterministic given seed. Raises BudgetExhausted (carrying the best
    result) if no local search converged within max_evals.
    """
    if constraint not in ("none", "require_ci"):
        raise ValueError(f"unknown constraint {constraint!r}")
    if restarts < 1:
        raise ValueError("at least one restart required")

    rng = np.random.default_rng(seed)
    product_mode = constraint == "require_ci"
    mapper: Callable[[np.ndarray], np.ndarray] = (
        _product_map if product_mode else _simplex_map)

    if starts is None:
        start_list = default_starts(constraint)
    else:
        start_list = [np.asarray(s, dtype=float) for s in starts]

    x0s: list[np.ndarray] = []
    for s in start_list[:restarts]:
        if product_mode:
            x0s.append(s)
        else:
            x0s.append(np.sqrt(np.maximum(s, 0.0)))
    while len(x0s) < restarts:
        if product_mode:
            x0s.append(rng.normal(scale=1.0, size=5))
        else:
            x0s.append(np.sqrt(rng.dirichlet(np.ones(8))))

    trace: list[tuple[int, float]] = []
    eval_counter = 0
    best_entries: Optional[np.ndarray] = None
    best_value = -math.inf
    any_converged = False

    # A restart "converges" when the local search terminates on its own or
    # when its best objective stops improving by more than 1e-10 for 50
    # consecutive evaluations (the objective is nonsmooth; simplex-collapse
    # criteria alone are unreliable on it).
    restart_best = -math.inf
    restart_last_improvement = 0

    def objective(x: np.ndarray) -> float:
        nonlocal eval_counter, best_entries, best_value
        nonlocal restart_best, restart_last_improvement
        eval_counter += 1
        p = mapper(x)
        margin, _ = _margin_of_entries(p)
        if margin > restart_best + 1e-10:
            restart_best = margin
            restart_last_improvement = eval_counter
        if margin > best_value:
            best_value = margin
            best_entries = p.copy()
            trace.append((eval_counter, margin))
        return -margin

    for x0 in x0s:
        restart_best = -math.inf
        restart_last_improvement = eval_counter
        res = minimize(
            objective, x0, method="Nelder-Mead",
            options={"maxfev": max_evals, "xatol": 1e-10, "fatol": 1e-12,
                     "adaptive": False},
        )
        stagnant = eval_counter - restart_last_improvement >= 50
        any_converged = any_converged or bool(res.success) or stagnant

    assert best_entries is not None
    table = ProbabilityTable(tuple(best_entries / best_entries.sum()))
    report = shift_report(table)
    defined = {k: m for k, m in report.margin.items() if m is not None}
    witness = max(defined, key=defined.get) if defined else None
    best_margin = defined[witness] if witness else -1.0

    result = OptimizationResult(
        best_model=coefficients_from_table(table),
        best_margin=best_margin,
        witness=witness,
        trace=tuple(trace),
        restarts_used=len(x0s),
        converged=any_converged,
    )
    if not any_converged:
        raise BudgetExhausted(result)
    return result
