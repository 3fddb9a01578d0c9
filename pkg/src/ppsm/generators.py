"""Named model families: quantum strong/weak measurement and classical analogues.

The quantum families come in two independent derivation paths: closed-form
coefficient vectors (quantum_strong, quantum_weak) and an explicit
Born-rule construction over real 2-vectors (quantum_oracle). The two must
agree to double precision; tests enforce it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    CoefficientVector,
    DomainError,
    ProbabilityTable,
    SIGNS,
    _table_from_entries,
    index_of,
)


@dataclass(frozen=True)
class QubitPair:
    """Pre/post state pair |psi> = (cos t/2, sin t/2), |phi> = (cos t/2, -sin t/2).

    theta must lie strictly inside (0, pi/2); the endpoints degenerate
    (null post-selection at 0, basis-diagonal overlap at pi/2).
    """

    theta: float

    def __post_init__(self):
        _check_theta(self.theta)


@dataclass(frozen=True)
class WeakMeasurement:
    """Weakness parameter of the symmetrized Z-measurement operation."""

    lam: float

    def bound_to(self, pair: QubitPair) -> None:
        _check_lam(pair.theta, self.lam)


@dataclass(frozen=True)
class WeakValueReport:
    """The amplification factor z_w and the shift lam * z_w * psi it produces."""

    z_w: float
    amplified_shift: float


def _check_theta(theta: float) -> None:
    if not (0.0 < theta < math.pi / 2):
        raise DomainError(f"theta must lie in (0, pi/2), got {theta!r}")


def _check_lam(theta: float, lam: float) -> None:
    if not (0.0 <= lam <= math.cos(theta)):
        raise DomainError(
            f"lambda must lie in [0, cos(theta)] = [0, {math.cos(theta):.6g}], "
            f"got {lam!r}")


def quantum_strong(theta: float) -> CoefficientVector:
    """Projective Z measurement between the pre and post states."""
    _check_theta(theta)
    ct = math.cos(theta)
    return CoefficientVector((0.0, 0.0, 0.0, ct, -ct * ct, -ct, 0.0))


def quantum_weak(theta: float, lam: float) -> CoefficientVector:
    """Weak Z measurement of strength lam between the pre and post states."""
    _check_theta(theta)
    _check_lam(theta, lam)
    ct = math.cos(theta)
    return CoefficientVector((0.0, 0.0, 0.0, lam * ct, -math.cos(2 * theta),
                              -lam * ct, 0.0))


def weak_value(theta: float) -> float:
    """<phi|Z|psi> / <phi|psi> for the anti-aligned post-selection phi = -psi."""
    _check_theta(theta)
    return 1.0 / math.cos(theta)


def weak_value_report(theta: float, lam: float, psi: int = 1) -> WeakValueReport:
    _check_lam(theta, lam)
    z_w = weak_value(theta)
    return WeakValueReport(z_w=z_w, amplified_shift=lam * z_w * psi)


def quantum_oracle(theta: float, lam: float | None = None) -> ProbabilityTable:
    """Build the joint table from the Born rule directly.

    Works entirely with real 2-vectors (all states involved are real).
    lam=None selects the projective (strong) measurement; otherwise the
    weak operation E_s(rho) = [rho + s*(lam/2)*(Z rho + rho Z)] / 2.

    Pr(psi = +/-1) = 1/2 by construction.
    """
    _check_theta(theta)
    h = theta / 2.0
    ket_psi = {1: np.array([math.cos(h), math.sin(h)]),
               -1: np.array([-math.sin(h), math.cos(h)])}
    ket_phi = {-1: np.array([math.cos(h), -math.sin(h)]),
               1: np.array([math.sin(h), math.cos(h)])}
    z_op = np.diag([1.0, -1.0])

    entries = [0.0] * 8
    if lam is None:
        ket_s = {1: np.array([1.0, 0.0]), -1: np.array([0.0, 1.0])}
        for psi in SIGNS:
            for s in SIGNS:
                pr_s = float(ket_s[s] @ ket_psi[psi]) ** 2
                for phi in SIGNS:
                    pr_phi = float(ket_phi[phi] @ ket_s[s]) ** 2
                    entries[index_of(psi, s, phi)] = 0.5 * pr_s * pr_phi
    else:
        _check_lam(theta, lam)
        for psi in SIGNS:
            for phi in SIGNS:
                overlap = float(ket_phi[phi] @ ket_psi[psi])
                cross = float(ket_psi[psi] @ z_op @ ket_phi[phi])
                for s in SIGNS:
                    # Pr(s, phi | psi) = (overlap^2 + s*lam*overlap*cross) / 2
                    pr = 0.5 * (overlap * overlap + s * lam * overlap * cross)
                    entries[index_of(psi, s, phi)] = 0.5 * pr
    return _table_from_entries(entries)


def classical_disturbance(lam: float, delta: float) -> CoefficientVector:
    """Coin-toss model whose phi-bias delta plays the role of disturbance."""
    if not (0.0 <= lam <= 1.0):
        raise DomainError(f"lambda must lie in [0, 1], got {lam!r}")
    if not (0.0 < delta < 1.0 - lam):
        raise DomainError(
            f"delta must lie in (0, 1 - lambda) = (0, {1.0 - lam:.6g}), got {delta!r}")
    return CoefficientVector((0.0, 0.0, delta, lam, 0.0, 0.0, 0.0))


def classical_maximal() -> CoefficientVector:
    """The pure three-way correlation model: only the psi*s*phi coefficient is 1.

    Its post-selected average saturates +/-1 while the pre-selected average
    vanishes: the maximal anomalous shift.
    """
    return CoefficientVector((0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0))


CANONICAL_BOXES = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))


@dataclass(frozen=True)
class BoxWorld:
    """A ball hidden in one of several boxes with deterministic readouts.

    Each box is a coordinate triple (x, y, z) in {+/-1}^3; the three
    measurements read psi = x (left/right), s = y (front/back) and
    phi = z (top/bottom). ``weights`` is the placement distribution.
    """

    boxes: tuple[tuple[int, int, int], ...] = CANONICAL_BOXES
    weights: tuple[float, ...] = field(default=())

    def __post_init__(self):
        for box in self.boxes:
            if len(box) != 3 or any(v not in (1, -1) for v in box):
                raise ValueError(f"box coordinates must be +/-1 triples, got {box!r}")
        if not self.weights:
            n = len(self.boxes)
            object.__setattr__(self, "weights", tuple(1.0 / n for _ in self.boxes))
        if len(self.weights) != len(self.boxes):
            raise ValueError("one weight per box required")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError("weights must be a probability distribution")


def box_world_model(bw: BoxWorld = BoxWorld()) -> ProbabilityTable:
    """Joint table induced by the placement distribution and readouts."""
    entries = [0.0] * 8
    for box, w in zip(bw.boxes, bw.weights):
        entries[index_of(*box)] += w
    return _table_from_entries(entries)
