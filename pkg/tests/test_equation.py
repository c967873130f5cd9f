import numpy as np
import pytest

from infostab.equation import (
    OpenTriangleSampler,
    SamplerScheme,
    additive_defect,
    admissible,
    logarithmic_defect,
    multiplicative_defect,
    residual,
    rim_points,
    sup_residual,
)
from infostab.errors import NonFiniteValue, OutOfDomain
from infostab.functions import (
    Callable01,
    LogForm,
    NoiseKind,
    PerturbationSpec,
    Perturbed,
    PowerForm,
    Tabulated,
)


def test_identity_example():
    f = Tabulated.sample(lambda x: x, np.linspace(1e-3, 1 - 1e-3, 999))
    assert residual(f, 0.0, 0.5, 0.25) == pytest.approx(1 / 12, abs=1e-12)


@pytest.mark.parametrize("alpha", [-2.0, -0.5, 0.5, 2.0, 3.0])
def test_exact_power_has_zero_residual(alpha, small_sampler):
    x, y = small_sampler.points()
    f = PowerForm(2.0, -1.5, alpha)
    scale = np.max(np.abs(f(x))) + 1.0
    assert np.max(np.abs(residual(f, alpha, x, y))) <= 1e-10 * scale


def test_exact_log_has_zero_residual(sampler):
    assert sup_residual(LogForm(2.0, -1.0), 0.0, sampler).eps_hat <= 1e-9


def test_diagonal_is_exactly_zero():
    f = Callable01(lambda x: np.sin(7 * x) + x**3)
    x = np.linspace(0.01, 0.49, 50)
    assert np.all(residual(f, -1.3, x, x) == 0.0)


def test_antisymmetry_exact():
    f = Callable01(lambda x: np.exp(x) - 3 * x**2)
    rng = np.random.default_rng(4)
    x, y = rng.random(2_000) * 0.5, rng.random(2_000) * 0.5
    np.testing.assert_array_equal(residual(f, 0.7, x, y), -residual(f, 0.7, y, x))


@pytest.mark.parametrize("xy", [(0.0, 0.3), (0.3, 0.7), (0.6, 0.5), (-0.1, 0.2)])
def test_outside_triangle(xy):
    with pytest.raises(OutOfDomain):
        residual(PowerForm(1, 1, 2), 2.0, *xy)


def test_non_finite_carries_sample():
    f = Callable01(lambda x: np.where(x > 0.5, np.inf, x))
    with pytest.raises(NonFiniteValue) as err:
        residual(f, 0.0, np.array([0.1, 0.6]), np.array([0.1, 0.2]))
    assert err.value.where == (0.6, 0.2)


@pytest.mark.parametrize("alpha", [-1.0, 2.0])
def test_non_canonical_function_detected(alpha, sampler):
    f = Callable01(lambda x: x**alpha + 1.0)
    assert sup_residual(f, alpha, sampler).eps_hat > 0.01


def test_x_pow_zero_plus_one_is_a_constant_solution(sampler):
    # x**0 + 1 == 2 is the constant member of the log family
    f = Callable01(lambda x: x**0.0 + 1.0)
    assert sup_residual(f, 0.0, sampler).eps_hat == 0.0


def test_non_canonical_detected_at_zero(sampler):
    f = Callable01(lambda x: x**0.5 + 1.0)
    assert sup_residual(f, 0.0, sampler).eps_hat > 0.01


def test_perturbed_residual_at_most_four_eps(sampler):
    f = Perturbed(PowerForm(2, 5, 2), PerturbationSpec(1e-3, NoiseKind.UNIFORM_IID, 0))
    s = sup_residual(f, 2.0, sampler)
    assert s.eps_hat <= 4e-3 * (1 + 1e-12)
    assert s.p99 <= s.eps_hat
    assert s.samples == sampler.count


class TestSampler:
    @pytest.mark.parametrize("scheme", list(SamplerScheme))
    def test_points_inside_shrunk_triangle(self, scheme):
        s = OpenTriangleSampler(count=5_000, margin=1e-3, seed=2, scheme=scheme)
        x, y = s.points()
        assert x.size == 5_000
        assert np.all(x >= 1e-3) and np.all(y >= 1e-3) and np.all(x + y <= 1 - 1e-3)
        assert np.all(admissible(x, y, 1e-3))

    def test_deterministic_and_read_only(self):
        a = OpenTriangleSampler(count=1_000, seed=7).points()
        b = OpenTriangleSampler(count=1_000, seed=7).points()
        np.testing.assert_array_equal(a[0], b[0])
        with pytest.raises(ValueError):
            a[0][0] = 0.5

    def test_seed_changes_sample(self):
        a = OpenTriangleSampler(count=1_000, seed=7).points()[0]
        b = OpenTriangleSampler(count=1_000, seed=8).points()[0]
        assert not np.array_equal(a, b)

    def test_tiny_count(self):
        x, y = OpenTriangleSampler(count=3).points()
        assert x.size == 3

    @pytest.mark.parametrize(
        "kw", [{"count": 0}, {"margin": 0.0}, {"margin": 0.3}, {"seed": -1}, {"concentration": 0}]
    )
    def test_validation(self, kw):
        with pytest.raises(OutOfDomain):
            OpenTriangleSampler(**kw)

    def test_rim_hits_the_corners(self):
        m = 1e-4
        x, y = rim_points(m, 600)
        assert np.all(admissible(x, y, m))
        # graded offsets reach the margin corners
        assert np.min(x + y) <= 2 * m + 1e-12
        assert np.max(x) >= 1 - 2 * m - 1e-9

    def test_sampled_sup_close_to_true_sup(self):
        # continuous sup for f(x) = x at alpha = 0 is 0.97192 (Nelder-Mead), near (0.9929, 0.0070)
        f = Callable01(lambda t: t)
        s = sup_residual(f, 0.0, OpenTriangleSampler(count=20_000))
        assert 0.97 < s.eps_hat <= 0.97192


class TestHelperDefects:
    def test_additive(self):
        pairs = np.array([[0.1, 0.2], [0.3, 0.4], [0.0, 0.5]])
        assert additive_defect(lambda t: 3 * t, pairs) == pytest.approx(0.0, abs=1e-15)

    def test_multiplicative(self):
        pairs = np.array([[0.5, 0.5], [0.9, 0.1], [0.3, 0.7]])
        assert multiplicative_defect(lambda t: t**2, pairs) == pytest.approx(0.0, abs=1e-15)

    def test_logarithmic_small_but_positive(self):
        g = np.linspace(0.05, 1.0, 60)
        pairs = np.array([(a, b) for a in g for b in g])
        d = logarithmic_defect(lambda t: np.log(t) + 0.01 * np.sin(t), pairs)
        assert 0 < d <= 0.03

    def test_logarithmic_rejects_zero(self):
        with pytest.raises(OutOfDomain):
            logarithmic_defect(np.log, np.array([[0.0, 0.5]]))

    def test_additive_rejects_overflowing_sum(self):
        with pytest.raises(OutOfDomain):
            additive_defect(lambda t: t, np.array([[0.7, 0.6]]))

    def test_pairs_shape(self):
        with pytest.raises(OutOfDomain):
            additive_defect(lambda t: t, np.array([0.1, 0.2]))
