"""Quantum Fisher information of one-parameter Gaussian families.

Two independent routes are provided:

* ``qfi_gaussian_closed`` evaluates the moment formula
  I = 1/2 Tr[(sigma^-1 sigma')^2] / (1 + P^2) + 2 P'^2 / (1 - P^4) + c_m d'^T sigma^-1 d'
* ``qfi_bures_fd`` differentiates the Bures distance numerically,
  I = 8 [1 - sqrt(F(rho_{theta - h/2}, rho_{theta + h/2}))] / h^2,
  with one Richardson refinement.

Agreement between them is the main correctness check of the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .exceptions import DomainError, SingularityError, StateError
from .gaussian import GaussianState, root_infidelity

# Coefficient of the displacement term.  In the vacuum = identity convention a
# coherent state displaced along x by theta has QFI 2, hence c_m = 2.
# tests/test_calibration.py re-derives it from a Fock-space pure-state oracle.
MEAN_QFI_COEFF = 2.0

PURITY_DERIVATIVE_FLOOR = 1e-10
_TINY = np.finfo(float).tiny

Derivative = Callable[[float], Tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class ParamFamily:
    """A map theta -> GaussianState on an open interval.

    Args:
        eval: returns the state at theta.
        label: parameter name, used in messages and reports.
        domain: open interval ``(lo, hi)`` on which ``eval`` is physical.
        derivative: optional analytic ``theta -> (d mean/d theta, d cov/d theta)``.
            When absent, derivatives are taken by central differences.
    """

    eval: Callable[[float], GaussianState]
    label: str = "theta"
    domain: Tuple[float, float] = (-math.inf, math.inf)
    derivative: Optional[Derivative] = None

    def require(self, *thetas: float) -> None:
        lo, hi = self.domain
        for t in thetas:
            if not (lo < t < hi):
                raise DomainError(
                    f"{self.label}={t!r} outside the family domain ({lo}, {hi})"
                )


@dataclass(frozen=True)
class QfiReport:
    theta: float
    qfi_closed: float
    qfi_bures_fd: float
    fd_step: float
    rel_discrepancy: float


def default_step(theta: float) -> float:
    return 1e-4 * max(abs(theta), 1.0)


def relative_discrepancy(closed: float, other: float) -> float:
    return abs(closed - other) / max(closed, _TINY)


def _fd_derivative(family: ParamFamily, theta: float, h: float):
    """Central differences of mean and covariance excess, Richardson-refined."""
    family.require(theta - h, theta + h)

    def central(step):
        lo, hi = family.eval(theta - step), family.eval(theta + step)
        return (hi.mean - lo.mean) / (2 * step), (hi.excess - lo.excess) / (2 * step)

    m1, c1 = central(h)
    m2, c2 = central(h / 2)
    return (4 * m2 - m1) / 3, (4 * c2 - c1) / 3


def qfi_gaussian_closed(family: ParamFamily, theta: float,
                        dtheta: Optional[float] = None) -> float:
    """QFI from the first and second moments of the family at ``theta``.

    Derivatives come from ``family.derivative`` when available, otherwise from
    central differences with step ``dtheta`` (default ``1e-4 * max(|theta|, 1)``).

    Raises:
        DomainError: if theta (or a finite-difference node) leaves the domain.
        StateError: if the covariance is degenerate.
        SingularityError: if the state is pure but its purity still changes.
    """
    family.require(theta)
    state = family.eval(theta)
    sigma = state.cov
    g = state.det_minus_one
    det = 1.0 + g
    if not det > 0 or not np.all(np.isfinite(sigma)):
        raise StateError("degenerate covariance")

    if family.derivative is not None:
        dmean, dcov = family.derivative(theta)
        dmean = np.asarray(dmean, dtype=float)
        dcov = np.asarray(dcov, dtype=float)
    else:
        dmean, dcov = _fd_derivative(family, theta, dtheta or default_step(theta))

    try:
        m = np.linalg.solve(sigma, dcov)
        inv_dmean = np.linalg.solve(sigma, dmean)
    except np.linalg.LinAlgError as exc:
        raise StateError("degenerate covariance") from exc

    p = det ** -0.5
    ddet = (dcov[0, 0] * sigma[1, 1] + sigma[0, 0] * dcov[1, 1]
            - dcov[0, 1] * sigma[1, 0] - sigma[0, 1] * dcov[1, 0])
    dp = -0.5 * det ** -1.5 * ddet
    one_minus_p4 = g * (2.0 + g) / det ** 2

    term_cov = 0.5 * float(np.trace(m @ m)) / (1.0 + p * p)
    if one_minus_p4 > 0:
        term_purity = 2.0 * dp * dp / one_minus_p4
    elif abs(dp) < PURITY_DERIVATIVE_FLOOR:
        term_purity = 0.0
    else:
        raise SingularityError("purity-term singularity")
    term_mean = MEAN_QFI_COEFF * float(dmean @ inv_dmean)
    return term_cov + term_purity + term_mean


def qfi_bures_fd(family: ParamFamily, theta: float, h: Optional[float] = None,
                 richardson: bool = True) -> float:
    """QFI from the Bures distance between states at ``theta -/+ h/2``.

    Raises:
        DomainError: if ``theta -/+ h/2`` leaves the family domain.
    """
    h = h or default_step(theta)
    family.require(theta - h / 2, theta + h / 2)

    def estimate(step):
        lo, hi = family.eval(theta - step / 2), family.eval(theta + step / 2)
        value = 8.0 * root_infidelity(lo, hi) / step ** 2
        if not math.isfinite(value):
            raise StateError(f"non-finite fidelity at {family.label}={theta!r}")
        return value

    coarse = estimate(h)
    if not richardson:
        return coarse
    fine = estimate(h / 2)
    return (4.0 * fine - coarse) / 3.0


def qfi_report(family: ParamFamily, theta: float, h: Optional[float] = None) -> QfiReport:
    h = h or default_step(theta)
    closed = qfi_gaussian_closed(family, theta)
    fd = qfi_bures_fd(family, theta, h)
    return QfiReport(theta, closed, fd, h, relative_discrepancy(closed, fd))


def cramer_rao_bound(qfi: float, Q: int = 1) -> float:
    """Smallest achievable variance 1 / (Q * qfi) after Q repetitions."""
    if not qfi > 0:
        raise DomainError("uninformative family: QFI must be positive")
    if Q < 1 or int(Q) != Q:
        raise DomainError("Q must be a positive integer")
    return 1.0 / (Q * qfi)
