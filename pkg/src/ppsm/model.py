"""Core representation of three-dichotomous-variable statistical models.

A model of three +/-1 valued events (psi, s, phi) is held either as a
7-component correlation coefficient vector (the constant coefficient is
always 1) or as the 8-entry joint probability table it induces:

    Pr(psi, s, phi) = (1/8) * [1 + c1*psi + c2*s + c3*phi + c4*psi*s
                               + c5*psi*phi + c6*s*phi + c7*psi*s*phi]

Table entries are stored flat with index 4*b(psi) + 2*b(s) + b(phi),
where b(+1) = 0 and b(-1) = 1.

All types are immutable values and all operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

SIGNS = (1, -1)

# Numerical tolerances (double precision with ~2 orders of headroom).
TOL_POS = 1e-12     # positivity slack on table entries
TOL_NORM = 1e-12    # table normalization
TOL_EVENT = 1e-12   # smallest conditioning-event probability
TOL_CI = 1e-10      # conditional-independence residual threshold
TOL_APSS = 1e-10    # anomalous-shift margin threshold


class PositivityViolation(ValueError):
    """A coefficient vector or table induces a negative probability."""

    def __init__(self, assignment: "Outcome", value: float):
        self.assignment = assignment
        self.value = value
        super().__init__(
            f"negative probability {value:.6g} at "
            f"(psi={assignment.psi:+d}, s={assignment.s:+d}, phi={assignment.phi:+d})"
        )


class DegenerateModel(ValueError):
    """Both pre-selection outcomes have vanishing probability (corrupt input)."""


class DomainError(ValueError):
    """A generator parameter is outside its valid domain."""


class Outcome(NamedTuple):
    """One joint assignment of the three +/-1 events."""

    psi: int
    s: int
    phi: int


def _bit(v: int) -> int:
    if v == 1:
        return 0
    if v == -1:
        return 1
    raise ValueError(f"sign must be +1 or -1, got {v!r}")


def index_of(psi: int, s: int, phi: int) -> int:
    """Flat table index of an assignment: 4*b(psi) + 2*b(s) + b(phi)."""
    return 4 * _bit(psi) + 2 * _bit(s) + _bit(phi)


OUTCOMES: tuple[Outcome, ...] = tuple(
    Outcome(psi, s, phi) for psi in SIGNS for s in SIGNS for phi in SIGNS
)


def monomials(o: Outcome) -> tuple[int, int, int, int, int, int, int]:
    """The seven +/-1 monomials (psi, s, phi, psi*s, psi*phi, s*phi, psi*s*phi)."""
    return (o.psi, o.s, o.phi, o.psi * o.s, o.psi * o.phi, o.s * o.phi,
            o.psi * o.s * o.phi)


@dataclass(frozen=True)
class CoefficientVector:
    """The correlation coefficients (c1..c7); the constant term is fixed to 1."""

    c: tuple[float, float, float, float, float, float, float]

    def __post_init__(self):
        if len(self.c) != 7:
            raise ValueError(f"expected 7 coefficients, got {len(self.c)}")
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        for v in self.c:
            if not math.isfinite(v):
                raise ValueError(f"non-finite coefficient {v!r}")


@dataclass(frozen=True)
class ProbabilityTable:
    """Joint distribution over the 8 assignments, in flat index order."""

    p: tuple[float, ...]

    def __post_init__(self):
        if len(self.p) != 8:
            raise ValueError(f"expected 8 entries, got {len(self.p)}")
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        for o, v in zip(OUTCOMES, self.p):
            if v < 0.0 or not math.isfinite(v):
                raise PositivityViolation(o, v)
        total = sum(self.p)
        if abs(total - 1.0) > TOL_NORM:
            raise ValueError(f"table entries sum to {total!r}, not 1")

    def __getitem__(self, assignment: tuple[int, int, int]) -> float:
        return self.p[index_of(*assignment)]


@dataclass(frozen=True)
class ShiftReport:
    """Pre- and post-selected conditional averages of s and their margins.

    Maps hold None where the conditioning event has probability <= TOL_EVENT.
    ``apss`` is True iff some defined margin exceeds TOL_APSS; ``witnesses``
    lists the (psi, phi) pairs achieving that.
    """

    pre: dict[int, Optional[float]]
    post: dict[tuple[int, int], Optional[float]]
    margin: dict[tuple[int, int], Optional[float]]
    apss: bool
    witnesses: tuple[tuple[int, int], ...]

    def max_margin(self) -> Optional[float]:
        defined = [m for m in self.margin.values() if m is not None]
        return max(defined) if defined else None

    def to_dict(self) -> dict:
        return {
            "pre": {f"{k:+d}": v for k, v in self.pre.items()},
            "post": {f"{k[0]:+d},{k[1]:+d}": v for k, v in self.post.items()},
            "margin": {f"{k[0]:+d},{k[1]:+d}": v for k, v in self.margin.items()},
            "apss": self.apss,
            "witnesses": [list(w) for w in self.witnesses],
        }


@dataclass(frozen=True)
class CIReport:
    """Conditional-independence diagnostics for s and phi given psi.

    ``factor_residual`` is the operational check |E[s*phi|psi] -
    E[s|psi]*E[phi|psi]| per psi (None where Pr(psi) vanishes).
    ``coefficient_residuals`` are the two coefficient-matching residuals
    (|c6 - c2*c3 - c4*c5|, |c7 - c2*c5 - c3*c4|), reported as diagnostics.
    The verdict ``is_ci`` uses the operational residuals only.
    """

    factor_residual: dict[int, Optional[float]]
    coefficient_residuals: tuple[float, float]
    is_ci: bool

    def to_dict(self) -> dict:
        return {
            "factor_residual": {f"{k:+d}": v for k, v in self.factor_residual.items()},
            "coefficient_residuals": list(self.coefficient_residuals),
            "is_ci": self.is_ci,
        }


def _table_from_entries(entries: list[float]) -> ProbabilityTable:
    """Clamp tolerably-negative entries to 0 and renormalize."""
    for o, v in zip(OUTCOMES, entries):
        if v < -TOL_POS:
            raise PositivityViolation(o, v)
    clamped = [max(v, 0.0) for v in entries]
    total = sum(clamped)
    return ProbabilityTable(tuple(v / total for v in clamped))


def table_from_coefficients(c: CoefficientVector) -> ProbabilityTable:
    """Expand a coefficient vector into its joint probability table."""
    c1, c2, c3, c4, c5, c6, c7 = c.c
    entries = []
    for o in OUTCOMES:
        m = monomials(o)
        entries.append(
            (1.0 + c1 * m[0] + c2 * m[1] + c3 * m[2] + c4 * m[3]
             + c5 * m[4] + c6 * m[5] + c7 * m[6]) / 8.0
        )
    return _table_from_entries(entries)


def coefficients_from_table(p: ProbabilityTable) -> CoefficientVector:
    """The seven moments E of the +/-1 monomials (inverse expansion)."""
    acc = [0.0] * 7
    for o, v in zip(OUTCOMES, p.p):
        for i, m in enumerate(monomials(o)):
            acc[i] += m * v
    return CoefficientVector(tuple(acc))


def marginal_psiphi(p: ProbabilityTable) -> dict[tuple[int, int], float]:
    """Pr(psi, phi), summing the intermediate outcome out."""
    return {
        (psi, phi): p[(psi, 1, phi)] + p[(psi, -1, phi)]
        for psi in SIGNS for phi in SIGNS
    }


def conditional_s(p: ProbabilityTable, psi: int, phi: int
                  ) -> Optional[tuple[float, float]]:
    """Pr(s | psi, phi) as (Pr(s=+1), Pr(s=-1)); None on a null event."""
    plus = p[(psi, 1, phi)]
    minus = p[(psi, -1, phi)]
    total = plus + minus
    if total <= TOL_EVENT:
        return None
    return (plus / total, minus / total)


def shift_report(p: ProbabilityTable) -> ShiftReport:
    """Pre- and post-selected averages of s, computed by direct summation."""
    pr_psi = {psi: sum(p[(psi, s, phi)] for s in SIGNS for phi in SIGNS)
              for psi in SIGNS}
    if all(v <= TOL_EVENT for v in pr_psi.values()):
        raise DegenerateModel("both pre-selection outcomes have zero probability")

    pre: dict[int, Optional[float]] = {}
    for psi in SIGNS:
        if pr_psi[psi] <= TOL_EVENT:
            pre[psi] = None
        else:
            num = sum(s * p[(psi, s, phi)] for s in SIGNS for phi in SIGNS)
            pre[psi] = num / pr_psi[psi]

    post: dict[tuple[int, int], Optional[float]] = {}
    margin: dict[tuple[int, int], Optional[float]] = {}
    witnesses = []
    for psi in SIGNS:
        for phi in SIGNS:
            pair = (psi, phi)
            pr_pair = p[(psi, 1, phi)] + p[(psi, -1, phi)]
            if pr_pair <= TOL_EVENT or pre[psi] is None:
                post[pair] = None
                margin[pair] = None
                continue
            post[pair] = (p[(psi, 1, phi)] - p[(psi, -1, phi)]) / pr_pair
            margin[pair] = abs(post[pair]) - abs(pre[psi])
            if margin[pair] > TOL_APSS:
                witnesses.append(pair)

    return ShiftReport(pre=pre, post=post, margin=margin,
                       apss=bool(witnesses), witnesses=tuple(witnesses))


def closed_form_shifts(c: CoefficientVector) -> tuple[
        dict[int, Optional[float]], dict[tuple[int, int], Optional[float]]]:
    """Shifts as rational functions of the coefficients.

    pre(psi)       = (c2 + c4*psi) / (1 + c1*psi)
    post(psi, phi) = (c2 + c4*psi + c6*phi + c7*psi*phi)
                     / (1 + c1*psi + c3*phi + c5*psi*phi)

    Kept as an independent cross-check of the table-summation path.
    """
    c1, c2, c3, c4, c5, c6, c7 = c.c
    pre: dict[int, Optional[float]] = {}
    post: dict[tuple[int, int], Optional[float]] = {}
    for psi in SIGNS:
        den = 1.0 + c1 * psi
        pre[psi] = (c2 + c4 * psi) / den if den > 2.0 * TOL_EVENT else None
        for phi in SIGNS:
            dpair = 1.0 + c1 * psi + c3 * phi + c5 * psi * phi
            if dpair > 4.0 * TOL_EVENT:
                post[(psi, phi)] = (c2 + c4 * psi + c6 * phi + c7 * psi * phi) / dpair
            else:
                post[(psi, phi)] = None
    return pre, post


def ci_report(p: ProbabilityTable) -> CIReport:
    """Test conditional independence of s and phi given psi.

    The verdict comes from the factorization residuals measured on the
    table. The coefficient-matching residuals (which characterize CI only
    when c1 = 0) are attached as diagnostics.
    """
    pr_psi = {psi: sum(p[(psi, s, phi)] for s in SIGNS for phi in SIGNS)
              for psi in SIGNS}

    factor_residual: dict[int, Optional[float]] = {}
    for psi in SIGNS:
        if pr_psi[psi] <= TOL_EVENT:
            factor_residual[psi] = None
            continue
        e_s = sum(s * p[(psi, s, phi)] for s in SIGNS for phi in SIGNS) / pr_psi[psi]
        e_phi = sum(phi * p[(psi, s, phi)] for s in SIGNS for phi in SIGNS) / pr_psi[psi]
        e_sphi = sum(s * phi * p[(psi, s, phi)]
                     for s in SIGNS for phi in SIGNS) / pr_psi[psi]
        factor_residual[psi] = abs(e_sphi - e_s * e_phi)

    c1, c2, c3, c4, c5, c6, c7 = coefficients_from_table(p).c
    coefficient_residuals = (
        abs(c6 - c2 * c3 - c4 * c5),
        abs(c7 - c2 * c5 - c3 * c4),
    )

    defined = [r for r in factor_residual.values() if r is not None]
    is_ci = bool(defined) and all(r <= TOL_CI for r in defined)
    return CIReport(factor_residual=factor_residual,
                    coefficient_residuals=coefficient_residuals,
                    is_ci=is_ci)
