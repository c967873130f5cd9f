import json
import math

import numpy as np
import pytest

from infostab.core import H1, H2, k_alpha
from infostab.equation import OpenTriangleSampler
from infostab.errors import AlphaNearOne, CaseMismatch, DegenerateGrid, ZeroAlphaHasNoC
from infostab.functions import (
    Callable01,
    ClosedFunction,
    LogForm,
    NoiseKind,
    PerturbationSpec,
    Perturbed,
    PowerForm,
)
from infostab.stability import (
    LogPlusConst,
    Power,
    StabilityCertificate,
    certify_closed,
    certify_open,
    defect_g,
    extend_closed,
    extract_c,
    extract_candidate,
    fit_lambda_log,
    lift_F,
    uncorrected_centering_candidate,
    proof_diagnostics,
    verdict,
)

CERT_KEYS = {
    "alpha", "eps_hat", "k_alpha", "candidate", "sup_deviation", "bound",
    "pass", "samples", "margin", "seed", "domain",
}


class TestLift:
    def test_power_example(self):
        assert lift_F(PowerForm(2, 5, 2), 2, 1.0, 1.0) == pytest.approx(-13.0)

    def test_power_closed_form(self):
        f = PowerForm(2, 5, 2)
        u, v = 0.7, 2.5
        assert lift_F(f, 2, u, v) == pytest.approx(2 * v**2 + 5 * u**2 - 5 * (u + v) ** 2)

    def test_homogeneity(self):
        f = Callable01(lambda x: np.cos(3 * x) + x)
        assert lift_F(f, -1, 3.0, 6.0) == pytest.approx(3.0**-1 * lift_F(f, -1, 1.0, 2.0), rel=1e-14)

    def test_recovery(self):
        f = Callable01(lambda x: np.exp(x))
        assert lift_F(f, 0.7, 0.7, 0.3) == pytest.approx(f(0.3), rel=1e-15)


class TestDefect:
    def test_g_at_one_is_zero(self):
        assert defect_g(Callable01(lambda x: x**3 - x), -2.3, 1.0) == 0.0

    def test_power_example(self):
        assert defect_g(PowerForm(2, 5, 2), 2, 3.0) == pytest.approx(24.0, rel=1e-13)

    def test_log_example(self):
        assert defect_g(LogForm(1.0, 4.2), 0.0, math.e) == pytest.approx(1.0, rel=1e-13)


class TestExtractC:
    def test_negative(self):
        assert extract_c(PowerForm(2, 5, -1), -1) == pytest.approx(3.0, rel=1e-14)

    def test_symmetric_zero(self):
        assert extract_c(PowerForm(1, 1, 2), 2) == pytest.approx(0.0, abs=1e-14)

    def test_zero_alpha(self):
        with pytest.raises(ZeroAlphaHasNoC):
            extract_c(LogForm(1, 1), 0.0)

    def test_perturbed_within_propagated_radius(self):
        eps = 1e-3
        f = Perturbed(PowerForm(2, 5, -1), PerturbationSpec(eps, NoiseKind.UNIFORM_IID, 3))
        # two perturbed evaluations, each scaled by 3**alpha, divided by |2**alpha - 1|
        assert abs(extract_c(f, -1) - 3.0) <= 2 * 3.0**-1 * eps / abs(2.0**-1 - 1)


class TestLogFit:
    def test_exact(self):
        fit = fit_lambda_log(LogForm(2.0, -1.0))
        assert fit.lam == pytest.approx(2.0, abs=1e-10)
        assert fit.log_defect <= 1e-10

    def test_constant(self):
        fit = fit_lambda_log(LogForm(0.0, 3.0))
        assert fit.lam == 0.0 and fit.log_defect == 0.0

    def test_perturbed(self):
        eps = 1e-3
        f = Perturbed(LogForm(2.0, -1.0), PerturbationSpec(eps, NoiseKind.UNIFORM_IID, 8))
        fit = fit_lambda_log(f)
        assert fit.log_defect <= 6 * eps
        assert abs(fit.lam - 2.0) <= 6 * eps

    @pytest.mark.parametrize("grid", [[1.0] * 10, np.geomspace(0.5, 2, 5), [-1, 2, 3, 4, 5, 6, 7, 8]])
    def test_degenerate(self, grid):
        with pytest.raises(DegenerateGrid):
            fit_lambda_log(LogForm(1, 1), grid)


class TestExtractCandidate:
    def test_power_minus_one(self):
        c = extract_candidate(PowerForm(2, 5, -1), -1)
        assert c.a == pytest.approx(2.0, abs=1e-10) and c.b == pytest.approx(5.0, abs=1e-10)

    @pytest.mark.parametrize("alpha", [-2.0, 0.5, 3.0])
    def test_symmetric(self, alpha):
        c = extract_candidate(PowerForm(1, 1, alpha), alpha)
        assert c.a == pytest.approx(1.0, abs=1e-12) and c.b == pytest.approx(1.0, abs=1e-12)

    def test_log(self):
        c = extract_candidate(LogForm(2.0, -1.0), 0.0)
        assert isinstance(c, LogPlusConst)
        assert c.lam == pytest.approx(2.0, abs=1e-10) and c.c == pytest.approx(-1.0, abs=1e-10)

    def test_guard(self):
        with pytest.raises(AlphaNearOne):
            extract_candidate(PowerForm(1, 1, 2), 0.9995)

    def test_locality(self):
        base = PowerForm(2, 5, 2.5)
        pts = np.array([1 / 3, 0.5, 2 / 3])
        bumped = Callable01(lambda x: base(x) + np.prod([x - p for p in pts], axis=0) * 40)
        np.testing.assert_allclose(bumped(pts), base(pts), atol=1e-15)
        assert extract_candidate(bumped, 2.5) == extract_candidate(base, 2.5)

    def test_uncorrected_centering_offsets_exact_recovery(self):
        # the alternative centering is off by the constant c on exact inputs
        unc = uncorrected_centering_candidate(PowerForm(2, 5, 2), 2)
        assert abs(unc.a - 2.0) > 1e-3


class TestCertifyOpen:
    def test_exact(self, sampler):
        cert = certify_open(PowerForm(3, -2, 2), 2, sampler)
        assert cert.passed and cert.eps_hat <= 1e-9 and cert.sup_deviation <= 1e-9
        assert cert.domain == "open"

    def test_perturbed_example(self):
        f = Perturbed(PowerForm(2, 5, -1), PerturbationSpec(1e-2, NoiseKind.UNIFORM_IID, 42))
        cert = certify_open(f, -1, OpenTriangleSampler(seed=42))
        assert cert.passed
        assert cert.sup_deviation <= 13 / 3 * cert.eps_hat
        assert cert.k_alpha == pytest.approx(13 / 3)

    def test_guard(self):
        with pytest.raises(AlphaNearOne):
            certify_open(PowerForm(1, 1, 2), 0.9995)

    def test_verdict_label_follows_pass(self, sampler):
        cert = certify_open(Callable01(lambda x: np.sin(20 * x)), 2.0, sampler)
        assert cert.eps_hat > 0.1
        assert cert.verdict == ("pass" if cert.passed else "fail at sampled resolution")
        assert cert.diagnostics["verdict"] == cert.verdict

    def test_deterministic(self, sampler):
        f = Perturbed(PowerForm(2, 5, 0.5), PerturbationSpec(1e-3, NoiseKind.SMOOTH_BUMP, 1))
        assert certify_open(f, 0.5, sampler) == certify_open(f, 0.5, sampler)

    def test_json_has_exact_fields(self, sampler):
        cert = certify_open(PowerForm(3, -2, 2), 2, sampler)
        d = cert.to_dict()
        assert set(d) == CERT_KEYS
        back = StabilityCertificate.from_dict(json.loads(json.dumps(d)))
        assert back == cert

    def test_diagnostics(self, sampler):
        f = Perturbed(PowerForm(2, 5, 2), PerturbationSpec(1e-3, NoiseKind.UNIFORM_IID, 1))
        cert = certify_open(f, 2, sampler)
        assert cert.diagnostics["p99"] <= cert.eps_hat
        assert "uncorrected_centering_deviation" in cert.diagnostics
        assert cert.diagnostics["c_amplification"] > 0


class TestVerdict:
    def test_slack(self):
        assert verdict(1.0 + 1e-10, 1.0)
        assert not verdict(1.0 + 1e-8, 1.0)
        assert verdict(1e-10, 0.0)

    def test_fail_label(self):
        cert = StabilityCertificate(0.5, 1.0, 1.0, Power(1, 1), 2.0, 1.0, False, 1, 1e-4, 0, "open")
        assert cert.verdict == "fail at sampled resolution"
        assert cert.utilization == 2.0


class TestClosed:
    def test_extend_power(self):
        h = extend_closed(Power(2, 5), -1, 99, 99)
        assert isinstance(h, H1) and h(1.0) == -3.0 and h(0.0) == 0.0

    def test_extend_symmetric(self):
        assert extend_closed(Power(1.3, 1.3), 2, 0, 0)(1.0) == 0.0

    def test_extend_log(self):
        assert extend_closed(LogPlusConst(0.4, 2.0), 0.0, 7, -7) == H2(2.0, 7.0, -7.0)

    def test_case_mismatch(self):
        with pytest.raises(CaseMismatch):
            extend_closed(Power(1, 1), 0.0, 0, 0)
        with pytest.raises(CaseMismatch):
            extend_closed(LogPlusConst(1, 1), 2.0, 0, 0)

    def test_exact_h1(self, sampler):
        f = ClosedFunction(PowerForm(1, 0, 2), 0.0, 1.0)
        cert = certify_closed(f, 2, sampler)
        assert cert.passed and cert.sup_deviation <= 1e-9 and cert.domain == "closed"

    def test_exact_h2(self, sampler):
        f = ClosedFunction(LogForm(0.0, 0.75), 5.0, -2.0)
        cert = certify_closed(f, 0.0, sampler)
        assert cert.passed and cert.sup_deviation == 0.0
        assert cert.candidate.lam == 0.0 and cert.candidate.c == 0.75

    def test_negative_alpha_forces_zero_at_origin(self, sampler):
        f = ClosedFunction(PowerForm(2, 5, -1), 0.1, -3.0)
        cert = certify_closed(f, -1, sampler)
        assert cert.eps_hat < 1e-3
        assert not cert.passed
        assert cert.diagnostics["endpoint_deviation"][0] == pytest.approx(0.1)

    def test_positive_alpha_uses_larger_constant(self, sampler):
        f = ClosedFunction(PowerForm(1, 2, 0.5), 0.0, -1.0)
        cert = certify_closed(f, 0.5, sampler)
        assert cert.bound == pytest.approx(cert.diagnostics["bound_constant"] * cert.eps_hat)
        assert cert.diagnostics["bound_constant"] >= k_alpha(0.5)


class TestProofDiagnostics:
    def test_exact_negative(self):
        d = proof_diagnostics(PowerForm(2, 5, -1), -1, 0.3, 0.6)
        assert abs(d.F0) <= 1e-12 and d.G_defect <= 1e-12

    def test_perturbed_bounds(self, sampler):
        from infostab.equation import sup_residual

        f = Perturbed(PowerForm(2, 5, -1), PerturbationSpec(1e-3, NoiseKind.UNIFORM_IID, 2))
        eps_hat = sup_residual(f, -1, sampler).eps_hat
        for p, q in [(0.2, 0.7), (0.5, 0.5), (0.9, 0.1)]:
            d = proof_diagnostics(f, -1, p, q)
            assert abs(d.F0) <= (3 * 2.0**-1 + 1) * eps_hat
            assert d.G_defect <= 3 * eps_hat * (p + q + 1) ** -1
