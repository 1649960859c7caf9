"""The Swanson oscillator as a thermometry / frequency-estimation probe.

H = omega a^dag a + alpha a^2 + beta a^dag^2 with alpha * beta = omega^2 eps^2.  In
the unbroken phase (eps < 1/2) it is isospectral to an oscillator of frequency
Omega = omega sqrt(1 - 4 eps^2); the probe is the thermal state of that Hermitian
counterpart, sigma = coth(Omega / 2T) I with zero mean.

Units: hbar = k_B = m = 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import DomainError, PhaseError, SingularityError
from .gaussian import GaussianState
from .qfi import ParamFamily, qfi_bures_fd

EP_TOL = 1e-12
DENOMINATOR_TOL = 1e-12
TARGETS = ("omega", "temperature", "epsilon")


class PhaseClass(str, enum.Enum):
    UNBROKEN = "unbroken"
    EXCEPTIONAL_POINT = "exceptional_point"
    BROKEN = "broken"


@dataclass(frozen=True)
class SwansonParams:
    """Parameters (omega, eps, alpha, T) of the Swanson probe.

    ``negative_product`` switches to alpha * beta = -omega^2 eps^2, for which the
    gap never closes.  It is an exploration toggle only.
    """

    omega: float
    epsilon: float
    temperature: float
    alpha: float = 1.0
    negative_product: bool = False

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError("omega must be positive")
        if not self.epsilon >= 0:
            raise DomainError("epsilon must be non-negative")
        if not self.temperature > 0:
            raise DomainError("temperature must be positive")
        if self.alpha == 0:
            raise DomainError("alpha must be non-zero")

    @property
    def sign(self) -> float:
        return -1.0 if self.negative_product else 1.0

    @property
    def beta(self) -> float:
        """Coefficient of a^dag^2 (not the inverse temperature)."""
        return self.sign * self.omega ** 2 * self.epsilon ** 2 / self.alpha

    @property
    def shrink(self) -> float:
        """(Omega / omega)^2 = 1 - 4 eps^2 (or 1 + 4 eps^2 with the toggle)."""
        return 1.0 - 4.0 * self.sign * self.epsilon ** 2

    def with_(self, **changes) -> "SwansonParams":
        return replace(self, **changes)


class FrequencyInfo(NamedTuple):
    Omega: float
    phase: PhaseClass


def classify_phase(epsilon: float, negative_product: bool = False) -> PhaseClass:
    if negative_product:
        return PhaseClass.UNBROKEN
    if abs(epsilon - 0.5) < EP_TOL:
        return PhaseClass.EXCEPTIONAL_POINT
    if epsilon > 0.5:
        return PhaseClass.BROKEN
    return PhaseClass.UNBROKEN


def effective_frequency(p: SwansonParams) -> FrequencyInfo:
    """Omega = omega sqrt(1 - 4 eps^2) and the PT phase.

    Omega is 0 at the exceptional point and NaN in the broken phase, where the
    spectrum is complex; use ``require_unbroken`` before any estimation.
    """
    phase = classify_phase(p.epsilon, p.negative_product)
    if phase is PhaseClass.EXCEPTIONAL_POINT:
        return FrequencyInfo(0.0, phase)
    if phase is PhaseClass.BROKEN:
        return FrequencyInfo(math.nan, phase)
    return FrequencyInfo(p.omega * math.sqrt(p.shrink), phase)


def require_unbroken(p: SwansonParams) -> float:
    Omega, phase = effective_frequency(p)
    if phase is not PhaseClass.UNBROKEN or not Omega > 0:
        raise PhaseError(
            f"probe undefined at or beyond exceptional point (eps={p.epsilon}, {phase.value})"
        )
    return Omega


# -- thermal covariance helpers ------------------------------------------------

def coth_excess(x: float) -> float:
    """coth(x) - 1 for x > 0, accurate when coth(x) rounds to 1."""
    e = math.exp(-2.0 * x)
    return 2.0 * e / -math.expm1(-2.0 * x)


def csch2(x: float) -> float:
    """1 / sinh(x)^2 without overflow for large x."""
    e = math.exp(-2.0 * x)
    return 4.0 * e / math.expm1(-2.0 * x) ** 2


def log_sinh(x: float) -> float:
    return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)


def _thermal_state(Omega: float, T: float) -> GaussianState:
    return GaussianState.from_excess(coth_excess(Omega / (2.0 * T)) * np.eye(2))


def probe_state(p: SwansonParams) -> GaussianState:
    """Thermal state of the Hermitian counterpart: zero mean, coth(Omega/2T) I.

    Raises:
        PhaseError: at or beyond the exceptional point.
    """
    Omega = require_unbroken(p)
    return _thermal_state(Omega, p.temperature)


def probe_family(p: SwansonParams, target: str) -> ParamFamily:
    """One-parameter family obtained by varying ``target`` around ``p``.

    ``target`` is one of ``omega``, ``temperature``, ``epsilon`` or
    ``inverse_temperature``.  The family carries the analytic derivative of its
    covariance so that the closed QFI route needs no finite differences.
    """
    require_unbroken(p)
    sgn = p.sign
    omega, eps, T = p.omega, p.epsilon, p.temperature

    def frequency(w, e):
        return w * math.sqrt(1.0 - 4.0 * sgn * e * e)

    if target == "omega":
        def x_and_dx(theta):
            s = math.sqrt(1.0 - 4.0 * sgn * eps * eps)
            return theta * s / (2 * T), s / (2 * T)
        domain = (0.0, math.inf)
    elif target == "temperature":
        Omega = frequency(omega, eps)

        def x_and_dx(theta):
            return Omega / (2 * theta), -Omega / (2 * theta ** 2)
        domain = (0.0, math.inf)
    elif target == "inverse_temperature":
        Omega = frequency(omega, eps)

        def x_and_dx(theta):
            return theta * Omega / 2, Omega / 2
        domain = (0.0, math.inf)
    elif target == "epsilon":
        def x_and_dx(theta):
            s = math.sqrt(1.0 - 4.0 * sgn * theta * theta)
            return omega * s / (2 * T), -4.0 * sgn * theta * omega / (s * 2 * T)
        # the state depends on eps^2 only, so the family extends evenly past 0
        domain = (-0.5, 0.5) if sgn > 0 else (-math.inf, math.inf)
    else:
        raise DomainError(f"unknown target {target!r}")

    def evaluate(theta):
        x, _ = x_and_dx(theta)
        return GaussianState.from_excess(coth_excess(x) * np.eye(2))

    def derivative(theta):
        x, dx = x_and_dx(theta)
        return np.zeros(2), -csch2(x) * dx * np.eye(2)

    return ParamFamily(evaluate, target, domain, derivative)


# -- closed-form QFIs ------------------------------------------------------------

def qfi_omega_closed(p: SwansonParams) -> float:
    """(1 - 4 eps^2) / (4 T^2 sinh^2(Omega / 2T))."""
    Omega = require_unbroken(p)
    T = p.temperature
    return p.shrink * csch2(Omega / (2 * T)) / (4 * T ** 2)


def qfi_temperature_paper(p: SwansonParams) -> float:
    """The published temperature QFI, omega^2 (1 - 4 eps^2) / (4 T^2 sinh^2(Omega/2T)).

    Kept for comparison only: it disagrees with the exact value by a factor T^2.
    """
    Omega = require_unbroken(p)
    T = p.temperature
    return p.omega ** 2 * p.shrink * csch2(Omega / (2 * T)) / (4 * T ** 2)


def qfi_temperature_exact(p: SwansonParams) -> float:
    """Omega^2 / (4 T^4 sinh^2(Omega / 2T)) = Var(H) / T^4."""
    Omega = require_unbroken(p)
    T = p.temperature
    return Omega ** 2 * csch2(Omega / (2 * T)) / (4 * T ** 4)


def qfi_epsilon_closed(p: SwansonParams) -> float:
    """4 eps^2 omega^2 / (T^2 (1 - 4 eps^2) sinh^2(Omega / 2T)); exactly 0 at eps = 0."""
    Omega = require_unbroken(p)
    if p.epsilon == 0:
        return 0.0
    T = p.temperature
    return (4 * p.epsilon ** 2 * p.omega ** 2 * csch2(Omega / (2 * T))
            / (T ** 2 * p.shrink))


class ClosedForms(NamedTuple):
    I_omega: float
    I_T_paper: float
    I_T_authoritative: float
    I_epsilon: float


def qfi_closed_forms(p: SwansonParams, fd_step: Optional[float] = None) -> ClosedForms:
    """All single-parameter QFIs of the probe at ``p``.

    ``I_T_authoritative`` is the Bures finite-difference value on the temperature
    family, which is what the published temperature formula should reproduce.
    """
    require_unbroken(p)
    authoritative = qfi_bures_fd(probe_family(p, "temperature"), p.temperature, fd_step)
    return ClosedForms(
        qfi_omega_closed(p),
        qfi_temperature_paper(p),
        authoritative,
        qfi_epsilon_closed(p),
    )


def _log_qfi(target: str, p: SwansonParams) -> float:
    Omega = require_unbroken(p)
    T = p.temperature
    x = Omega / (2 * T)
    if target == "omega":
        return math.log(p.shrink) - math.log(4 * T ** 2) - 2 * log_sinh(x)
    if target == "temperature":
        return 2 * math.log(Omega) - math.log(4 * T ** 4) - 2 * log_sinh(x)
    raise DomainError(f"gain ratio defined for omega or temperature, not {target!r}")


def hermitian_baseline(p: SwansonParams) -> SwansonParams:
    """Same (omega, T, alpha) with eps = |alpha| / omega, where alpha = beta."""
    if p.negative_product:
        raise DomainError("no Hermitian baseline when alpha * beta < 0")
    if not p.omega > 2 * abs(p.alpha):
        raise DomainError("Hermitian baseline undefined (Omega_Herm non-positive)")
    return p.with_(epsilon=abs(p.alpha) / p.omega)


def gain_ratio(p: SwansonParams, target: str) -> float:
    """10 log10 of the probe QFI over the Hermitian-baseline QFI, in dB."""
    require_unbroken(p)
    base = hermitian_baseline(p)
    return 10.0 / math.log(10.0) * (_log_qfi(target, p) - _log_qfi(target, base))


# -- energetic cost --------------------------------------------------------------

@dataclass(frozen=True)
class CostReport:
    delta_u_paper: float
    delta_u_oracle: Optional[float]
    u_theta: float
    u_theta_oracle: Optional[float]
    target: str
    qfi: float
    abs_cost: bool = False


def delta_u_paper(p: SwansonParams) -> float:
    """2 omega [coth(Omega/2T) - coth(omega/2T)], differences taken on coth - 1."""
    Omega = require_unbroken(p)
    T = p.temperature
    return 2 * p.omega * (coth_excess(Omega / (2 * T)) - coth_excess(p.omega / (2 * T)))


def authoritative_qfi(p: SwansonParams, target: str) -> float:
    if target == "omega":
        return qfi_omega_closed(p)
    if target == "temperature":
        return qfi_temperature_exact(p)
    if target == "epsilon":
        return qfi_epsilon_closed(p)
    raise DomainError(f"unknown target {target!r}")


def energetic_cost(p: SwansonParams, target: str, abs_cost: bool = False,
                   fock_dim: int = 64) -> CostReport:
    """QFI per unit of energy spent on the non-Hermitian term.

    ``delta_u_oracle`` is Tr[H rho] - Tr[omega a^dag a rho_HO] evaluated in a
    truncated Fock space with the Hermitised Swanson operator (zero-point
    energies kept on both sides).  It is ``None`` if the Dyson map cannot be
    represented at these parameters.  With ``abs_cost`` the ratios use |Delta U|.

    Raises:
        DomainError: for eps = 0 (no cost, ratio undefined).
    """
    from . import fock

    require_unbroken(p)
    if p.epsilon == 0:
        raise DomainError("zero-cost baseline: eps = 0 gives Delta U = 0")
    qfi = authoritative_qfi(p, target)
    du = delta_u_paper(p)
    try:
        du_oracle = fock.energy_shift(p.omega, p.epsilon, p.alpha, p.temperature,
                                      dim=fock_dim, negative_product=p.negative_product)
    except (DomainError, SingularityError, fock.DysonMapError):
        du_oracle = None

    def ratio(den):
        if den is None:
            return None
        den = abs(den) if abs_cost else den
        return qfi / den if den != 0 else math.inf

    return CostReport(du, du_oracle, ratio(du), ratio(du_oracle), target, qfi, abs_cost)


# -- Dyson map coefficient -------------------------------------------------------

class DysonCoefficients(NamedTuple):
    paper: float
    derived: float


def dyson_coefficient(p: SwansonParams) -> DysonCoefficients:
    """Exponent lambda of eta = exp(lambda x^2 / 2), printed and derived versions.

    ``paper`` is (1 - omega^2 eps^2) / (1 - omega + omega^2 eps^2).  ``derived`` is
    -omega (alpha - beta) / (omega - alpha - beta), the value that cancels the
    {x, p} term with x = (a + a^dag) / sqrt(2 omega).

    Raises:
        SingularityError: if either denominator vanishes.
    """
    w, a, b = p.omega, p.alpha, p.beta
    den_paper = 1.0 - w + w * w * p.epsilon ** 2
    den_derived = w - a - b
    if abs(den_paper) < DENOMINATOR_TOL or abs(den_derived) < DENOMINATOR_TOL:
        raise SingularityError("Dyson map singular at these parameters")
    paper = (1.0 - w * w * p.epsilon ** 2) / den_paper
    derived = -w * (a - b) / den_derived
    return DysonCoefficients(paper, derived)
