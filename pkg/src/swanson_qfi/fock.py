"""Truncated Fock-space laboratory for the Swanson oscillator.

Checks the non-Hermitian machinery numerically: PT symmetry, the Dyson map
eta = exp(lambda q^2 / 2), the metric Theta = eta^dag eta, quasi-Hermiticity,
isospectrality and the mapping between the Hermitian thermal state and its
non-Hermitian partner.  Also provides the Fock-space oracles used to calibrate
the Gaussian formulas.

Quadratures here follow the oscillator convention q = (a + a^dag) / sqrt(2 omega),
p = i sqrt(omega / 2) (a^dag - a).

Two numerical points matter:

* Similarity transforms are never formed as products eta H eta^-1.  For the
  quadratic operators involved, conjugation acts on the ladder operators as
  eta a eta^-1 = a - lambda q / sqrt(2 omega) (and a^dag + ...), so transformed
  operators are evaluated as polynomials of shifted ladder matrices on a padded
  space and then cut back.  This gives the exact compression, whereas eta^-1 is
  unbounded whenever eta is a decaying Gaussian and cannot be truncated.
* Dense eta and Theta are built by eigendecomposition of q^2 on a space of
  ``pad * N`` levels and then cut to N, so the leading block is not polluted by
  the truncation edge.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from .exceptions import DomainError, DysonMapError
from .swanson import SwansonParams, dyson_coefficient, require_unbroken

MIN_DIM = 8
DEFAULT_DIM = 64
DEFAULT_PAD = 2
GROWTH_LIMIT = 1e12
POPULATION_CUTOFF = 1e-20

# thresholds of the asserted invariants
PT_TOL = 1e-12
QUASI_HERMITICITY_TOL = 1e-8
HERMITICITY_TOL = 1e-8
SPECTRAL_TOL = 1e-6
RHO_MAPPING_TOL = 1e-9
EXPECTATION_TOL = 1e-9
COVARIANCE_TOL = 1e-8
ENERGY_CONVERGENCE_TOL = 1e-9

Poly = Callable[[np.ndarray, np.ndarray], np.ndarray]


# -- ladder algebra ---------------------------------------------------------------

def ladder(dim: int) -> np.ndarray:
    """Annihilation operator truncated to ``dim`` levels (a|n> = sqrt(n)|n-1>)."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def position(dim: int, omega: float) -> np.ndarray:
    a = ladder(dim)
    return (a + a.T) / math.sqrt(2.0 * omega)


def momentum(dim: int, omega: float) -> np.ndarray:
    a = ladder(dim)
    return 1j * math.sqrt(omega / 2.0) * (a.T - a)


def swanson_poly(omega: float, alpha: float, beta: float) -> Poly:
    return lambda a, ad: omega * ad @ a + alpha * a @ a + beta * ad @ ad


def compress(poly: Poly, dim: int, degree: int = 2) -> np.ndarray:
    """Exact ``dim``-level compression of a polynomial in a, a^dag."""
    a = ladder(dim + degree)
    return poly(a, a.T)[:dim, :dim]


def conjugate(poly: Poly, dim: int, omega: float, lam: float, sign: int = 1,
              degree: int = 2) -> np.ndarray:
    """Compression of eta^s P(a, a^dag) eta^-s with eta = exp(lam q^2 / 2).

    ``sign=+1`` gives eta P eta^-1 and ``sign=-1`` gives eta^-1 P eta.
    """
    work = dim + degree
    a = ladder(work)
    q = (a + a.T) / math.sqrt(2.0 * omega)
    shift = sign * lam * q / math.sqrt(2.0 * omega)
    return poly(a - shift, a.T + shift)[:dim, :dim]


class FockOperators(NamedTuple):
    a: np.ndarray
    ad: np.ndarray
    x: np.ndarray
    p: np.ndarray
    H: np.ndarray


def build_operators(N: int, omega: float, epsilon: float, alpha: float = 1.0,
                    negative_product: bool = False) -> FockOperators:
    """Ladder, quadrature and Swanson operators on N levels.

    Raises:
        DomainError: if ``N < 8`` or ``alpha == 0``.
    """
    if N < MIN_DIM:
        raise DomainError(f"truncation must be at least {MIN_DIM}")
    if alpha == 0:
        raise DomainError("alpha must be non-zero")
    sign = -1.0 if negative_product else 1.0
    beta = sign * omega ** 2 * epsilon ** 2 / alpha
    a = ladder(N)
    return FockOperators(a, a.T.copy(), position(N, omega), momentum(N, omega),
                         compress(swanson_poly(omega, alpha, beta), N))


def commutator_defect(A: np.ndarray, B: np.ndarray, expected: np.ndarray,
                      interior: int) -> float:
    c = A @ B - B @ A
    return float(np.max(np.abs(c[:interior, :interior] - expected[:interior, :interior])))


def _rel(diff: np.ndarray, ref: np.ndarray) -> float:
    den = np.linalg.norm(ref)
    return float(np.linalg.norm(diff) / den) if den > 0 else float(np.linalg.norm(diff))


def pt_symmetry_residual(H: np.ndarray, interior: Optional[int] = None) -> float:
    """||H_PT - H|| / ||H|| with a -> -a, a^dag -> -a^dag and complex conjugation."""
    M = interior or H.shape[0] // 2
    parity = (-1.0) ** np.arange(H.shape[0])
    h_pt = np.conj(parity[:, None] * H * parity[None, :])
    return _rel((h_pt - H)[:M, :M], H[:M, :M])


# -- Dyson map ----------------------------------------------------------------------

@dataclass(frozen=True)
class DysonMap:
    """Dense eta, Theta (and eta^-1 when bounded) on ``work_dim`` levels."""

    lam: float
    omega: float
    work_dim: int
    eta: np.ndarray
    theta: np.ndarray
    eta_inv: Optional[np.ndarray]


def dyson_and_metric(N: int, omega: float, lam: float, pad: int = DEFAULT_PAD) -> DysonMap:
    """eta = exp(lam q^2 / 2) and Theta = eta^2 from the eigendecomposition of q^2.

    eta^-1 is materialised only if its largest eigenvalue stays below 1e12; for
    a decaying eta it is unbounded and left as ``None`` (transforms then go
    through ``conjugate``).

    Raises:
        DysonMapError: if eta itself grows beyond 1e12 at this truncation.
    """
    if not math.isfinite(lam):
        raise DysonMapError("Dyson coefficient must be finite")
    work = pad * N
    w, v = np.linalg.eigh(position(work, omega) @ position(work, omega))
    w = np.clip(w, 0.0, None)
    half = 0.5 * lam * w
    if half.max() > math.log(GROWTH_LIMIT):
        raise DysonMapError(
            "Dyson map numerically unbounded at this truncation; reduce |lambda| or N "
            f"(lambda={lam:.6g}, N={N})"
        )
    eta = (v * np.exp(half)) @ v.T
    theta = (v * np.exp(2 * half)) @ v.T
    bounded = (-half).max() <= math.log(GROWTH_LIMIT)
    eta_inv = (v * np.exp(-half)) @ v.T if bounded else None
    return DysonMap(lam, omega, work, eta, theta, eta_inv)


def quasi_hermiticity_residual(dm: DysonMap, H_poly: Poly, interior: int) -> float:
    """||Theta H - H^dag Theta|| / ||Theta H|| on the leading block."""
    H = compress(H_poly, dm.work_dim)
    left = dm.theta @ H
    right = H.T @ dm.theta
    M = interior
    return _rel((left - right)[:M, :M], left[:M, :M])


def intertwining_residual(dm: DysonMap, H_poly: Poly, interior: int) -> float:
    """||eta H_nh - H eta|| / ||eta H_nh||, with H the conjugated operator."""
    H_nh = compress(H_poly, dm.work_dim)
    H = conjugate(H_poly, dm.work_dim, dm.omega, dm.lam, +1)
    left = dm.eta @ H_nh
    M = interior
    return _rel((left - H @ dm.eta)[:M, :M], left[:M, :M])


class SimilarityCheck(NamedTuple):
    hermiticity_residual: float
    spectral_errors: List[float]
    H: np.ndarray


def similarity_check(N: int, omega: float, lam: float, H_poly: Poly, Omega: float,
                     k: int = 4, interior: Optional[int] = None) -> SimilarityCheck:
    """Hermiticity of eta H eta^-1 and its lowest ``k`` level spacings vs Omega.

    The Hermiticity residual uses the leading ``interior`` block; the level
    spacings come from the symmetrised N-level compression.
    """
    M = interior or N // 2
    if k > N // 4:
        raise DomainError("k must not exceed N / 4")
    H = conjugate(H_poly, N, omega, lam, +1)
    herm = _rel((H - H.T)[:M, :M], H[:M, :M])
    # H is an exact compression, so its low Ritz values converge from above and
    # only the top of the spectrum feels the truncation: use all N levels
    levels = np.linalg.eigvalsh(0.5 * (H + H.T))
    gaps = np.diff(levels[: k + 1])
    return SimilarityCheck(herm, [float(abs(g - Omega) / Omega) for g in gaps], H)


# -- thermal states -------------------------------------------------------------

class ThermalSpectrum(NamedTuple):
    energies: np.ndarray
    vectors: np.ndarray
    populations: np.ndarray

    @property
    def rho(self) -> np.ndarray:
        return (self.vectors * self.populations) @ self.vectors.T

    @property
    def mean_energy(self) -> float:
        return float(self.populations @ self.energies)

    @property
    def energy_variance(self) -> float:
        e = self.energies - self.mean_energy
        return float(self.populations @ (e * e))


def thermal_spectrum(H: np.ndarray, T: float) -> ThermalSpectrum:
    """Gibbs populations of the symmetrised Hermitian matrix ``H``."""
    if not T > 0:
        raise DomainError("temperature must be positive")
    E, V = np.linalg.eigh(0.5 * (H + H.T))
    w = np.exp(-(E - E[0]) / T)
    return ThermalSpectrum(E, V, w / w.sum())


def thermal_density(nbar: float, dim: int) -> np.ndarray:
    """Truncated density matrix of a thermal state with mean occupation ``nbar``."""
    n = np.arange(dim)
    if nbar == 0:
        p = (n == 0).astype(float)
    else:
        p = nbar ** n / (nbar + 1.0) ** (n + 1)
    return np.diag(p)


def coherent_ket(alpha: complex, dim: int, pad: int = 64) -> np.ndarray:
    """D(alpha)|0> via a matrix exponential on a padded space."""
    a = ladder(dim + pad).astype(complex)
    gen = alpha * a.conj().T - np.conj(alpha) * a
    ket = expm(gen)[:, 0]
    return ket[:dim]


def uhlmann_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 via Hermitian eigendecompositions."""
    def psd_sqrt(m):
        w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
        return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T

    r = psd_sqrt(rho)
    inner = r @ sigma @ r
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)


def quadrature_covariance(rho: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Covariance of X = (b + b^dag)/sqrt 2, P = i(b^dag - b)/sqrt 2 in state rho."""
    bd = b.conj().T
    ops = [(b + bd) / math.sqrt(2.0), 1j * (bd - b) / math.sqrt(2.0)]
    means = [np.trace(rho @ o) for o in ops]
    cov = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            anti = ops[i] @ ops[j] + ops[j] @ ops[i]
            cov[i, j] = float(np.real(np.trace(rho @ anti) - 2 * means[i] * means[j]))
    return cov


def mode_covariance(rho: np.ndarray, u: float, v: float) -> np.ndarray:
    """Covariance in the quadratures of b = u a + v a^dag, from exact compressions."""
    dim = rho.shape[0]
    a = ladder(dim + 2)
    b = u * a + v * a.T
    ops = [(b + b.T) / math.sqrt(2.0), 1j * (b.T - b) / math.sqrt(2.0)]
    means = [np.trace(rho @ o[:dim, :dim]) for o in ops]
    cov = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            anti = (ops[i] @ ops[j] + ops[j] @ ops[i])[:dim, :dim]
            cov[i, j] = float(np.real(np.trace(rho @ anti) - 2 * means[i] * means[j]))
    return cov


# -- non-Hermitian eigenvectors ----------------------------------------------------

class Bogoliubov(NamedTuple):
    """b = u a + v a^dag diagonalising the Hermitian quadratic H = Omega b^dag b + c."""

    u: float
    v: float
    Omega: float


def bogoliubov_from_matrix(H: np.ndarray) -> Bogoliubov:
    """Read mu (a^dag a + a a^dag) + kappa (a^2 + a^dag^2) + c off the Fock entries."""
    mu = 0.5 * (H[1, 1] - H[0, 0])
    kappa = H[2, 0] / math.sqrt(2.0)
    if not abs(kappa) < mu:
        raise DysonMapError(
            "transformed Hamiltonian is not bounded below (needs omega > alpha + beta)"
        )
    r = 0.5 * math.atanh(kappa / mu)
    return Bogoliubov(math.cosh(r), math.sinh(r), 2.0 * math.sqrt(mu * mu - kappa * kappa))


def biorthogonal_states(bog: Bogoliubov, lam: float, omega: float, dm: DysonMap,
                        count: int) -> np.ndarray:
    """Columns psi_n = eta^-1 phi_n for n < count, with <psi_n|Theta|psi_n> = 1.

    Built without eta^-1: psi_0 spans the kernel of eta^-1 b eta and the rest
    follow by repeated action of eta^-1 b^dag eta.
    """
    W = dm.work_dim
    k = lam * (bog.u - bog.v) / (2.0 * omega)
    ut, vt = bog.u + k, bog.v + k
    ratio = -vt / ut
    if not abs(ratio) < 1:
        raise DysonMapError("non-Hermitian ground state is not normalisable")
    c = np.zeros(W)
    c[0] = 1.0
    for m in range(1, W - 1, 2):
        c[m + 1] = ratio * math.sqrt(m / (m + 1.0)) * c[m - 1]
    c /= math.sqrt(float(c @ dm.theta @ c))

    a = ladder(W + 1)
    raise_op = ((bog.u - k) * a.T + (bog.v - k) * a)[:W, :W]
    states = np.empty((W, count))
    states[:, 0] = c
    for n in range(1, count):
        states[:, n] = raise_op @ states[:, n - 1] / math.sqrt(n)
    return states


# -- the full report --------------------------------------------------------------

@dataclass
class FockLabReport:
    dim: int
    interior_dim: int
    pt_residual: float
    hermiticity_residual: float
    quasi_hermiticity_residual: float
    spectral_errors: List[float]
    expectation_residual_theta: float
    expectation_residual_theta_sq: float
    rho_mapping_residual: float
    lambda_choice: str = "derived"
    lambda_value: float = 0.0
    lambda_paper: Optional[float] = None
    lambda_derived: Optional[float] = None
    omega: float = 0.0
    epsilon: float = 0.0
    alpha: float = 1.0
    temperature: float = 0.0
    Omega: float = 0.0
    intertwining_residual: Optional[float] = None
    printed_hs_residual: Optional[float] = None
    covariance_residual: Optional[float] = None
    energy_variance: Optional[float] = None
    expectation_residuals: Dict[str, float] = field(default_factory=dict)
    theta_sq_residuals: Dict[str, float] = field(default_factory=dict)
    thermal_check_refused: bool = False
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def observables(omega: float) -> Dict[str, Poly]:
    """Hermitian-side observables used in the expectation check, as polynomials."""
    s = 1.0 / (2.0 * omega)
    return {
        "H": None,  # filled in with the transformed Hamiltonian
        "x2": lambda a, ad: s * (a + ad) @ (a + ad),
        "number": lambda a, ad: ad @ a,
    }


def printed_counterpart(N: int, omega: float, epsilon: float) -> np.ndarray:
    """The published H_S in X = (a + a^dag)/sqrt 2, P = i(a^dag - a)/sqrt 2."""
    a = ladder(N + 2)
    X = (a + a.T) / math.sqrt(2.0)
    P = 1j * (a.T - a) / math.sqrt(2.0)
    g = omega - 1.0 - omega ** 2 * epsilon ** 2
    H = 0.5 * g * (P @ P) + 0.5 * (omega ** 2 - 4 * omega ** 2 * epsilon ** 2) / g * (X @ X)
    return np.real(H[:N, :N])


def _mod_constant(D: np.ndarray) -> np.ndarray:
    return D - np.trace(D) / D.shape[0] * np.eye(D.shape[0])


def fock_lab(omega: float = 2.0, epsilon: float = 0.2, alpha: float = 1.0,
             temperature: float = 0.5, N: int = DEFAULT_DIM, lam: Optional[float] = None,
             lambda_choice: str = "derived", k: int = 4, pad: int = DEFAULT_PAD,
             negative_product: bool = False) -> FockLabReport:
    """Run every check at one parameter point and collect residuals.

    ``lam`` overrides the Dyson coefficient (used for the negative control);
    otherwise ``lambda_choice`` selects ``derived`` or ``paper``.  The asserted
    invariants are listed in ``failures`` when violated; the Theta^2 form and
    the printed-counterpart comparison are reported only.

    Raises:
        DomainError: for invalid parameters or truncation.
        DysonMapError: if the map cannot be represented.
    """
    params = SwansonParams(omega, epsilon, temperature, alpha, negative_product)
    Omega = require_unbroken(params)
    coeffs = dyson_coefficient(params)
    if lam is None:
        if lambda_choice not in ("derived", "paper"):
            raise DomainError(f"unknown lambda choice {lambda_choice!r}")
        lam = coeffs.derived if lambda_choice == "derived" else coeffs.paper
    else:
        lambda_choice = "override"

    ops = build_operators(N, omega, epsilon, alpha, negative_product)
    M = N // 2
    poly = swanson_poly(omega, alpha, params.beta)
    report = FockLabReport(
        dim=N, interior_dim=M,
        pt_residual=pt_symmetry_residual(ops.H, M),
        hermiticity_residual=math.nan, quasi_hermiticity_residual=math.nan,
        spectral_errors=[], expectation_residual_theta=math.nan,
        expectation_residual_theta_sq=math.nan, rho_mapping_residual=math.nan,
        lambda_choice=lambda_choice, lambda_value=float(lam),
        lambda_paper=coeffs.paper, lambda_derived=coeffs.derived,
        omega=omega, epsilon=epsilon, alpha=alpha, temperature=temperature, Omega=Omega,
    )

    dm = dyson_and_metric(N, omega, lam, pad)
    report.quasi_hermiticity_residual = quasi_hermiticity_residual(dm, poly, M)
    report.intertwining_residual = intertwining_residual(dm, poly, M)
    sim = similarity_check(N, omega, lam, poly, Omega, k, M)
    report.hermiticity_residual = sim.hermiticity_residual
    report.spectral_errors = sim.spectral_errors
    if not negative_product:
        diff = sim.H[:M, :M] - printed_counterpart(N, omega, epsilon)[:M, :M]
        report.printed_hs_residual = _rel(_mod_constant(diff), sim.H[:M, :M])

    checks = [
        ("pt_residual", report.pt_residual, PT_TOL),
        ("quasi_hermiticity_residual", report.quasi_hermiticity_residual,
         QUASI_HERMITICITY_TOL),
        ("hermiticity_residual", report.hermiticity_residual, HERMITICITY_TOL),
        ("spectral_errors", max(report.spectral_errors), SPECTRAL_TOL),
    ]

    if report.hermiticity_residual > HERMITICITY_TOL:
        report.thermal_check_refused = True
        report.failures.extend(name for name, value, tol in checks if not value < tol)
        report.failures.append("thermal_check_refused")
        return report

    thermal = thermal_and_expectation_check(sim.H, dm, poly, temperature, report)
    checks.extend(thermal)
    report.failures.extend(name for name, value, tol in checks if not value < tol)
    return report


def thermal_and_expectation_check(H: np.ndarray, dm: DysonMap, poly: Poly, T: float,
                                  report: FockLabReport):
    """Fill the thermal-state residuals of ``report``; return asserted checks."""
    N, M, omega, lam = report.dim, report.interior_dim, report.omega, dm.lam
    spec = thermal_spectrum(H, T)
    rho = spec.rho
    report.energy_variance = spec.energy_variance

    keep = int(np.count_nonzero(spec.populations > POPULATION_CUTOFF))
    keep = max(1, min(keep, N // 2))
    c = spec.populations[:keep]

    bog = bogoliubov_from_matrix(H)
    psi = biorthogonal_states(bog, lam, omega, dm, keep)
    rho_nh = (psi * c) @ psi.T / c.sum()

    mapped = dm.eta @ rho_nh @ dm.eta
    report.rho_mapping_residual = _rel((rho - mapped[:N, :N])[:M, :M], rho[:M, :M])

    obs = observables(omega)
    obs["H"] = poly
    theta_sq = dm.theta @ dm.theta
    for name, o_poly in obs.items():
        if name == "H":
            # eta^-1 H eta is the original non-Hermitian operator
            O_h = H
            O_nh = compress(poly, dm.work_dim)
        else:
            O_h = compress(o_poly, N)
            O_nh = conjugate(o_poly, dm.work_dim, omega, lam, -1)
        target = float(np.trace(O_h @ rho))
        via_theta = float(np.trace(O_nh @ rho_nh @ dm.theta))
        num = float(np.trace(theta_sq @ O_nh @ rho_nh))
        den = float(np.trace(theta_sq @ rho_nh))
        report.expectation_residuals[name] = abs(target - via_theta)
        report.theta_sq_residuals[name] = abs(target - num / den)
    report.expectation_residual_theta = max(report.expectation_residuals.values())
    report.expectation_residual_theta_sq = max(report.theta_sq_residuals.values())

    # covariance of the Hermitian thermal state in its own normal-mode quadratures
    cov = mode_covariance(rho, bog.u, bog.v)
    nu = 1.0 / math.tanh(report.Omega / (2.0 * T))
    report.covariance_residual = float(np.max(np.abs(cov - nu * np.eye(2))))

    return [
        ("rho_mapping_residual", report.rho_mapping_residual, RHO_MAPPING_TOL),
        ("expectation_residual_theta", report.expectation_residual_theta, EXPECTATION_TOL),
        ("covariance_residual", report.covariance_residual, COVARIANCE_TOL),
    ]


# -- convergence ----------------------------------------------------------------

class ConvergenceRow(NamedTuple):
    N: int
    residual: float


CONVERGENCE_FLOOR = 1e-13


def convergence_scan(check: str, Ns: Sequence[int], omega: float = 2.0,
                     epsilon: float = 0.2, alpha: float = 1.0,
                     lam: Optional[float] = None) -> List[ConvergenceRow]:
    """Residual of ``check`` on a fixed leading block of size min(Ns)/2, per N.

    ``check`` is ``quasi_hermiticity`` or ``hermiticity``.
    """
    Ns = list(Ns)
    if Ns != sorted(Ns):
        raise DomainError("Ns must be increasing")
    params = SwansonParams(omega, epsilon, 1.0, alpha)
    require_unbroken(params)
    if lam is None:
        lam = dyson_coefficient(params).derived
    M = min(Ns) // 2
    poly = swanson_poly(omega, alpha, params.beta)
    rows = []
    for N in Ns:
        if check == "quasi_hermiticity":
            value = quasi_hermiticity_residual(dyson_and_metric(N, omega, lam), poly, M)
        elif check == "hermiticity":
            H = conjugate(poly, N, omega, lam, +1)
            value = _rel((H - H.T)[:M, :M], H[:M, :M])
        else:
            raise DomainError(f"unknown check {check!r}")
        rows.append(ConvergenceRow(N, value))
    return rows


def is_converging(rows: Sequence[ConvergenceRow], noise: float = 2.0) -> bool:
    """Non-increasing within a factor ``noise`` (or already at round-off)."""
    vals = [r.residual for r in rows]
    return all(b <= noise * a or b < CONVERGENCE_FLOOR for a, b in zip(vals, vals[1:]))


# -- energies -----------------------------------------------------------------------

def energy_shift(omega: float, epsilon: float, alpha: float, T: float,
                 dim: int = DEFAULT_DIM, negative_product: bool = False) -> float:
    """Tr[H_S rho] - Tr[omega a^dag a rho_HO] with H_S = eta H_swanson eta^-1.

    Raises:
        DysonMapError: if the transformed Hamiltonian is not Hermitian.
        SingularityError: if the Dyson coefficient is singular.
    """
    params = SwansonParams(omega, epsilon, T, alpha, negative_product)
    require_unbroken(params)
    lam = dyson_coefficient(params).derived
    poly = swanson_poly(omega, alpha, params.beta)

    def shift(n):
        H = conjugate(poly, n, omega, lam, +1)
        M = n // 2
        if _rel((H - H.T)[:M, :M], H[:M, :M]) > HERMITICITY_TOL:
            raise DysonMapError("transformed Hamiltonian not Hermitian at this truncation")
        bogoliubov_from_matrix(H)
        e_s = thermal_spectrum(H, T).mean_energy
        e_ho = thermal_spectrum(omega * np.diag(np.arange(n, dtype=float)), T).mean_energy
        return e_s - e_ho

    value = shift(dim)
    check = shift(2 * dim)
    if abs(value - check) > ENERGY_CONVERGENCE_TOL * max(1.0, abs(check)):
        raise DysonMapError(
            f"energy not converged in the truncation (N={dim}: {value:.12g}, "
            f"N={2 * dim}: {check:.12g})"
        )
    return check
