"""Single-mode Gaussian states: fidelity, Bures distance and purity.

Convention: quadratures are x = (a + a^dag)/sqrt(2) and p = i(a^dag - a)/sqrt(2),
and the covariance is sigma_ij = <{d_i, d_j}> - 2 <d_i><d_j>.  The vacuum then has
sigma = identity and a thermal state with mean occupation n has
sigma = (2n + 1) * identity.

States keep the deviation ``cov - I`` as a separately computed array.  Close to
the vacuum (cold thermal probes) this is the only part of the covariance that
carries information, and it underflows against 1.0 if it is only recovered by
subtraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import StateError

# Coefficient of the displacement term in the fidelity exponent,
# F ~ exp(-c * dd^T (sigma_a + sigma_b)^-1 dd).  Fixed by the coherent-state
# overlap |<0|alpha>|^2 = exp(-|alpha|^2); tests/test_calibration.py re-derives it.
MEAN_FIDELITY_COEFF = 1.0

SYMMETRY_TOL = 1e-12
VALIDATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix of one bosonic mode.

    Args:
        mean: length-2 array ``(<x>, <p>)``.
        cov: 2x2 covariance matrix in the vacuum = identity convention.
        excess: optional ``cov - I`` computed without cancellation.  When omitted
            it is derived from ``cov``.
    """

    mean: np.ndarray
    cov: np.ndarray
    excess: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2)
        if self.excess is None:
            excess = cov - np.eye(2)
        else:
            excess = np.asarray(self.excess, dtype=float).reshape(2, 2)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "excess", excess)

    @classmethod
    def vacuum(cls) -> "GaussianState":
        return cls(np.zeros(2), np.eye(2), np.zeros((2, 2)))

    @classmethod
    def from_excess(cls, excess, mean=(0.0, 0.0)) -> "GaussianState":
        excess = np.asarray(excess, dtype=float)
        return cls(np.asarray(mean, dtype=float), np.eye(2) + excess, excess)

    @classmethod
    def thermal(cls, nbar: float, mean=(0.0, 0.0)) -> "GaussianState":
        """Thermal state with mean occupation ``nbar`` (optionally displaced)."""
        return cls.from_excess(2.0 * nbar * np.eye(2), mean)

    @property
    def det_minus_one(self) -> float:
        """``det(cov) - 1`` evaluated from the excess: tr K + det K."""
        k = self.excess
        return float(k[0, 0] + k[1, 1] + (k[0, 0] * k[1, 1] - k[0, 1] * k[1, 0]))

    @property
    def det(self) -> float:
        return 1.0 + self.det_minus_one

    def same_as(self, other: "GaussianState") -> bool:
        return bool(
            np.array_equal(self.mean, other.mean)
            and np.array_equal(self.excess, other.excess)
        )


class StateDiagnostics(NamedTuple):
    symmetric_defect: float
    physicality_defect: float
    purity: float


def validate_state(s: GaussianState) -> StateDiagnostics:
    """Return symmetry/physicality defects and the purity of ``s``.

    The caller decides which defect level is acceptable.

    Raises:
        StateError: if any entry is non-finite.
    """
    if not (np.all(np.isfinite(s.mean)) and np.all(np.isfinite(s.cov))
            and np.all(np.isfinite(s.excess))):
        raise StateError("non-finite state")
    symmetric_defect = float(abs(s.cov[0, 1] - s.cov[1, 0]))
    physicality_defect = max(0.0, -s.det_minus_one)
    det = s.det
    p = det ** -0.5 if det > 0 else 0.0
    return StateDiagnostics(symmetric_defect, physicality_defect, float(p))


def _require_valid(s: GaussianState) -> None:
    diag = validate_state(s)
    if diag.symmetric_defect > VALIDATION_TOL:
        raise StateError(f"covariance not symmetric (defect {diag.symmetric_defect:.3g})")
    if diag.physicality_defect > VALIDATION_TOL:
        raise StateError(
            f"unphysical covariance: det(cov) < 1 (defect {diag.physicality_defect:.3g})"
        )


def purity(s: GaussianState) -> float:
    """Purity Tr(rho^2) = det(cov)^(-1/2)."""
    det = s.det
    if not det > 0:
        raise StateError("degenerate covariance")
    return det ** -0.5


def _fidelity_parts(a: GaussianState, b: GaussianState):
    """Pieces of the fidelity formula, arranged to avoid cancellation.

    Returns ``(f_quad, one_minus_sqrt_fquad, mean_exponent)`` where
    ``F = f_quad * exp(-mean_exponent)``.
    """
    _require_valid(a)
    _require_valid(b)
    s = a.excess + b.excess
    tr_s = s[0, 0] + s[1, 1]
    det_s = s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0]
    ga = max(a.det_minus_one, 0.0)
    gb = max(b.det_minus_one, 0.0)

    big = 4.0 + 2.0 * tr_s + det_s          # det(sigma_a + sigma_b)
    small = ga * gb                         # (det sigma_a - 1)(det sigma_b - 1)
    root_small = math.sqrt(small)
    root_sum = math.sqrt(big + small)
    d = root_sum - root_small               # F_quad = 2 / d

    # d - 2 without subtracting nearly equal numbers
    numer = 2.0 * tr_s + det_s - 4.0 * root_small
    d_minus_2 = numer / (root_sum + root_small + 2.0)
    root_d = math.sqrt(d)
    one_minus_sqrt_fq = d_minus_2 / (root_d * (root_d + math.sqrt(2.0)))

    dd = a.mean - b.mean
    if np.any(dd):
        total = a.cov + b.cov
        mean_exponent = MEAN_FIDELITY_COEFF * float(dd @ np.linalg.solve(total, dd))
    else:
        mean_exponent = 0.0
    return 2.0 / d, one_minus_sqrt_fq, mean_exponent


def fidelity(a: GaussianState, b: GaussianState) -> float:
    """Uhlmann fidelity between two single-mode Gaussian states.

    F = 2 / (sqrt(D + d) - sqrt(d)) * exp(-c dd^T (sigma_a + sigma_b)^-1 dd)
    with D = det(sigma_a + sigma_b), d = (det sigma_a - 1)(det sigma_b - 1),
    dd the mean difference and c = ``MEAN_FIDELITY_COEFF``.

    Raises:
        StateError: if either state fails validation.
    """
    if a.same_as(b):
        _require_valid(a)
        return 1.0
    f_quad, _, mean_exponent = _fidelity_parts(a, b)
    return min(f_quad, 1.0) * math.exp(-mean_exponent)


def root_infidelity(a: GaussianState, b: GaussianState) -> float:
    """``1 - sqrt(F(a, b))`` computed without cancellation near F = 1."""
    if a.same_as(b):
        _require_valid(a)
        return 0.0
    f_quad, one_minus_sqrt_fq, mean_exponent = _fidelity_parts(a, b)
    # 1 - sqrt(Fq) sqrt(E) = (1 - sqrt(Fq)) + sqrt(Fq) (1 - sqrt(E))
    return one_minus_sqrt_fq - math.sqrt(f_quad) * math.expm1(-0.5 * mean_exponent)


def bures_distance(a: GaussianState, b: GaussianState) -> float:
    """Bures distance sqrt(2) * sqrt(1 - sqrt(F))."""
    return math.sqrt(2.0) * math.sqrt(max(root_infidelity(a, b), 0.0))
