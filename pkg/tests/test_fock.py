import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swanson_qfi import fock
from swanson_qfi.exceptions import DomainError, DysonMapError
from swanson_qfi.swanson import SwansonParams, dyson_coefficient

N = 64
M = N // 2


def derived_lambda(omega, eps, alpha=1.0):
    return dyson_coefficient(SwansonParams(omega, eps, 1.0, alpha)).derived


def swanson(omega, eps, alpha=1.0):
    return fock.swanson_poly(omega, alpha, omega ** 2 * eps ** 2 / alpha)


class TestLadderAlgebra:
    def test_canonical_commutator(self):
        a = fock.ladder(N)
        assert fock.commutator_defect(a, a.T, np.eye(N), N - 1) < 1e-12

    @pytest.mark.parametrize("omega", [0.5, 2.0, 7.0])
    def test_position_momentum(self, omega):
        ops = fock.build_operators(N, omega, 0.2)
        assert fock.commutator_defect(ops.x, ops.p, 1j * np.eye(N), M) < 1e-12

    def test_hermitian_when_alpha_equals_beta(self):
        ops = fock.build_operators(N, 4.0, 0.25)
        assert np.max(np.abs(ops.H - ops.H.conj().T)) < 1e-12

    def test_non_hermitian(self):
        ops = fock.build_operators(N, 2.0, 0.2)
        assert np.linalg.norm(ops.H - ops.H.conj().T) > 0.1

    def test_guards(self):
        with pytest.raises(DomainError):
            fock.build_operators(4, 2.0, 0.2)
        with pytest.raises(DomainError):
            fock.build_operators(N, 2.0, 0.2, alpha=0.0)

    def test_compression_is_exact(self):
        # the cut of a^2 built on a larger space equals the product on a padded one
        poly = swanson(2.0, 0.2)
        big = fock.compress(poly, 100)
        assert np.array_equal(fock.compress(poly, 40), big[:40, :40])


class TestPTSymmetry:
    @given(st.floats(0.5, 5), st.floats(0, 0.49), st.floats(-3, 3).filter(lambda a: abs(a) > .1))
    @settings(max_examples=30)
    def test_swanson(self, omega, eps, alpha):
        ops = fock.build_operators(N, omega, eps, alpha)
        assert fock.pt_symmetry_residual(ops.H, M) < 1e-12

    def test_odd_operator(self):
        assert fock.pt_symmetry_residual(fock.ladder(N), M) == pytest.approx(2.0)

    def test_number_operator(self):
        a = fock.ladder(N)
        assert fock.pt_symmetry_residual(a.T @ a, M) < 1e-12

    def test_complex_coefficient_breaks_time_reversal(self):
        a = fock.ladder(N).astype(complex)
        assert fock.pt_symmetry_residual(1j * a @ a, M) == pytest.approx(2.0)


class TestDysonAndMetric:
    def test_identity_at_zero(self):
        dm = fock.dyson_and_metric(N, 2.0, 0.0)
        assert np.allclose(dm.eta, np.eye(dm.work_dim), atol=1e-12)
        assert np.allclose(dm.theta, np.eye(dm.work_dim), atol=1e-12)

    @pytest.mark.parametrize("lam", [-2.0, -0.3, 0.05])
    def test_metric_positive_definite(self, lam):
        dm = fock.dyson_and_metric(32, 2.0, lam)
        assert np.allclose(dm.theta, dm.theta.T)
        # far eigenvalues are exp(lam * q^2) and may sit below round-off
        w = np.linalg.eigvalsh(dm.theta)
        assert w.min() > -1e-14 * w.max()
        assert np.linalg.eigvalsh(dm.theta[:8, :8]).min() > 0
        assert np.allclose(dm.theta, dm.eta @ dm.eta, atol=1e-12)

    def test_inverse_when_bounded(self):
        dm = fock.dyson_and_metric(32, 2.0, 0.05)
        assert dm.eta_inv is not None
        prod = dm.eta @ dm.eta_inv
        assert np.max(np.abs(prod[:16, :16] - np.eye(16))) < 1e-10

    def test_inverse_withheld_when_unbounded(self):
        assert fock.dyson_and_metric(N, 2.0, -2.0).eta_inv is None

    def test_growing_map_rejected(self):
        with pytest.raises(DysonMapError, match="numerically unbounded"):
            fock.dyson_and_metric(N, 2.0, 3.0)

    def test_non_finite(self):
        with pytest.raises(DysonMapError):
            fock.dyson_and_metric(N, 2.0, math.inf)

    def test_quasi_hermiticity_with_derived(self):
        dm = fock.dyson_and_metric(N, 2.0, -2.0)
        assert fock.quasi_hermiticity_residual(dm, swanson(2.0, 0.2), M) < 1e-8

    def test_quasi_hermiticity_fails_with_printed(self):
        dm = fock.dyson_and_metric(N, 2.0, -1.0)
        assert fock.quasi_hermiticity_residual(dm, swanson(2.0, 0.2), M) > 1e-3

    def test_intertwining(self):
        dm = fock.dyson_and_metric(N, 2.0, -2.0)
        assert fock.intertwining_residual(dm, swanson(2.0, 0.2), M) < 1e-10


class TestSimilarity:
    @pytest.mark.parametrize("omega", [2.5, 4.0])
    def test_hermitian_case(self, omega):
        chk = fock.similarity_check(N, omega, 0.0, swanson(omega, 1 / omega),
                                    math.sqrt(omega ** 2 - 4), 4)
        assert chk.hermiticity_residual < 1e-12
        assert max(chk.spectral_errors) < 1e-6

    @pytest.mark.parametrize("eps", [0.1, 0.2, 0.3])
    def test_isospectral(self, eps):
        Omega = 2 * math.sqrt(1 - 4 * eps * eps)
        chk = fock.similarity_check(N, 2.0, derived_lambda(2.0, eps), swanson(2.0, eps),
                                    Omega, 4)
        assert chk.hermiticity_residual < 1e-8
        assert max(chk.spectral_errors) < 1e-6

    def test_omega_example(self):
        assert 2 * math.sqrt(0.84) == pytest.approx(1.8330, abs=1e-4)

    def test_k_limit(self):
        with pytest.raises(DomainError):
            fock.similarity_check(16, 2.0, -2.0, swanson(2.0, 0.2), 1.8, k=5)

    def test_printed_counterpart(self):
        chk = fock.similarity_check(N, 2.0, -2.0, swanson(2.0, 0.2), 1.833, 4)
        printed = fock.printed_counterpart(N, 2.0, 0.2)
        diff = (chk.H - printed)[:M, :M]
        # equal up to the constant -omega/2
        assert np.allclose(diff, -1.0 * np.eye(M), atol=1e-12)


@pytest.fixture(scope="module")
def report():
    return fock.fock_lab(2.0, 0.2, 1.0, 0.5, N)


class TestFockLab:
    def test_asserted_invariants(self, report):
        assert report.passed, report.failures
        assert report.pt_residual < 1e-12
        assert report.quasi_hermiticity_residual < 1e-8
        assert report.hermiticity_residual < 1e-8
        assert max(report.spectral_errors) < 1e-6
        assert report.rho_mapping_residual < 1e-9
        assert report.expectation_residual_theta < 1e-9
        assert report.covariance_residual < 1e-8

    def test_records_lambda(self, report):
        assert report.lambda_choice == "derived"
        assert report.lambda_value == pytest.approx(-2.0)
        assert report.lambda_paper == pytest.approx(-1.0)

    def test_observables(self, report):
        assert set(report.expectation_residuals) == {"H", "x2", "number"}
        assert all(v < 1e-9 for v in report.expectation_residuals.values())

    def test_theta_squared_form_is_reported(self, report):
        # the Theta^2 reading is reported only; it differs from the exact identity
        assert math.isfinite(report.expectation_residual_theta_sq)
        assert report.expectation_residual_theta_sq > 1e-3

    def test_energy_variance_matches_exponential_family(self, report):
        Om, T = report.Omega, report.temperature
        assert report.energy_variance == pytest.approx(
            Om * Om / (4 * math.sinh(Om / (2 * T)) ** 2), rel=1e-10)

    def test_json_fields(self, report):
        d = report.to_dict()
        for key in ["dim", "interior_dim", "pt_residual", "hermiticity_residual",
                    "quasi_hermiticity_residual", "spectral_errors",
                    "expectation_residual_theta", "expectation_residual_theta_sq",
                    "rho_mapping_residual"]:
            assert key in d
        assert d["passed"] is True

    def test_hermitian_limit(self):
        r = fock.fock_lab(4.0, 0.25, 1.0, 0.5, N)
        assert r.lambda_value == 0
        assert r.hermiticity_residual < 1e-12
        assert r.rho_mapping_residual < 1e-12
        assert r.expectation_residual_theta < 1e-12
        assert r.expectation_residual_theta_sq < 1e-12

    @pytest.mark.parametrize("offset", [0.5, -0.5])
    def test_negative_control(self, offset):
        r = fock.fock_lab(2.0, 0.2, 1.0, 0.5, N, lam=-2.0 + offset)
        assert not r.passed
        assert r.lambda_choice == "override"
        assert r.thermal_check_refused
        assert "quasi_hermiticity_residual" in r.failures

    def test_printed_lambda_does_not_hermitise_here(self):
        r = fock.fock_lab(2.0, 0.2, 1.0, 0.5, N, lambda_choice="paper")
        assert not r.passed

    @pytest.mark.parametrize("alpha", [0.5, 2.0])
    def test_other_alpha(self, alpha):
        r = fock.fock_lab(3.0, 0.2, alpha, 0.7, N)
        assert r.passed, r.failures

    def test_broken_phase(self):
        from swanson_qfi.exceptions import PhaseError
        with pytest.raises(PhaseError):
            fock.fock_lab(2.0, 0.6)


class TestConvergence:
    def test_derived_converges(self):
        rows = fock.convergence_scan("quasi_hermiticity", [32, 64, 128])
        assert fock.is_converging(rows)
        assert rows[-1].residual < 1e-8

    def test_identity_map_pinned(self):
        rows = fock.convergence_scan("hermiticity", [32, 64, 128], omega=4.0, epsilon=0.25)
        assert all(r.residual < 1e-14 for r in rows)

    def test_wrong_lambda_does_not_converge(self):
        rows = fock.convergence_scan("quasi_hermiticity", [32, 64, 128], lam=-1.5)
        assert min(r.residual for r in rows) > 1e-3

    def test_unsorted(self):
        with pytest.raises(DomainError):
            fock.convergence_scan("hermiticity", [64, 32])


class TestOracles:
    def test_coherent_ket_normalised(self):
        ket = fock.coherent_ket(1.2 - 0.4j, 100)
        assert np.vdot(ket, ket).real == pytest.approx(1.0, abs=1e-12)

    def test_uhlmann_identical(self):
        rho = fock.thermal_density(0.8, 60)
        assert fock.uhlmann_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)

    def test_thermal_density_trace(self):
        assert np.trace(fock.thermal_density(1.5, 200)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("omega,eps,T", [(2, 0.2, 0.5), (3, 0.3, 0.2), (1.5, 0.1, 1.0)])
    def test_energy_shift(self, omega, eps, T):
        Om = omega * math.sqrt(1 - 4 * eps * eps)
        expected = Om / 2 / math.tanh(Om / (2 * T)) - omega / 2 / math.tanh(omega / (2 * T))
        assert fock.energy_shift(omega, eps, 1.0, T) == pytest.approx(expected, rel=1e-9)

    def test_energy_shift_refuses_unbounded_map(self):
        with pytest.raises(DysonMapError):
            fock.energy_shift(1.0, 0.2, 1.0, 0.5)
