import math

import numpy as np
import pytest

from jain_approx.functions import builtin
from jain_approx.operators import OperatorConfig, evaluate_J
from jain_approx.spaces import (
    GridSpec,
    modulus1,
    modulus2,
    omega_p,
    rho_weighted_error,
    steklov,
    steklov_d1,
    steklov_d2,
    weighted_norm,
)

SMOOTH = ("exp_decay", "sine", "runge")


def const(c):
    return lambda t: np.full(np.shape(t), float(c))


class TestWeights:
    def test_examples(self):
        assert omega_p(0, 7.0) == 1.0
        assert omega_p(2, 3.0) == pytest.approx(0.1)
        assert omega_p(1, 0.0) == 1.0

    def test_negative_p(self):
        with pytest.raises(ValueError):
            omega_p(-1, 1.0)


class TestNorms:
    def test_constant(self):
        assert weighted_norm(const(-3.5), 0) == 3.5
        assert weighted_norm(const(0.0), 3) == 0.0

    def test_square_far_grid(self):
        v = weighted_norm(lambda t: t**2, 2, GridSpec(100.0, 2001))
        assert 0.9999 <= v < 1.0


class TestModuli:
    def test_sine_first(self):
        assert modulus1(np.sin, 0, 0.1) == pytest.approx(2 * math.sin(0.05), abs=1e-7)

    def test_sine_second(self):
        assert modulus2(np.sin, 0, 0.2) == pytest.approx(4 * math.sin(0.1) ** 2, abs=1e-6)

    @pytest.mark.parametrize("p", [0, 2])
    def test_constant_vanishes(self, p):
        assert modulus1(const(4.0), p, 0.3) == 0.0
        assert modulus2(const(4.0), p, 0.3) == 0.0

    @pytest.mark.parametrize("name", SMOOTH)
    def test_monotone_in_t(self, name):
        f = builtin(name)
        ts = [0.0, 0.01, 0.05, 0.1, 0.3]
        m1 = [modulus1(f, 0, t) for t in ts]
        m2 = [modulus2(f, 0, t) for t in ts]
        assert m1[0] == 0.0 and m2[0] == 0.0
        assert all(u <= v + 1e-15 for u, v in zip(m1, m1[1:]))
        assert all(u <= v + 1e-15 for u, v in zip(m2, m2[1:]))

    @pytest.mark.parametrize("name", SMOOTH)
    @pytest.mark.parametrize("t", [0.02, 0.1, 0.4])
    def test_subadditive(self, name, t):
        f = builtin(name)
        assert modulus1(f, 0, 2 * t) <= 2 * modulus1(f, 0, t) + 1e-6


class TestSteklov:
    @pytest.mark.parametrize("h", [0.05, 0.3, 1.0])
    def test_affine_fixed_point(self, h):
        x = np.linspace(0, 5, 11)
        np.testing.assert_allclose(steklov(lambda t: 3 * t + 2, h, x), 3 * x + 2, atol=1e-12)

    def test_constant(self):
        assert steklov(const(2.5), 0.2, 1.0) == pytest.approx(2.5, abs=1e-13)
        assert steklov_d1(const(2.5), 0.2, 1.0) == pytest.approx(0.0, abs=1e-12)
        assert steklov_d2(const(2.5), 0.2, 1.0) == 0.0

    def test_sine_distance(self):
        w2 = 4 * math.sin(0.05) ** 2
        assert abs(steklov(np.sin, 0.1, 1.0) - math.sin(1.0)) <= w2

    def test_quadratic_exact(self):
        # For t^2 the mean adds a constant: 4/h^2 * double integral of
        # 2(x+u)^2 - (x+2u)^2 over [0, h/2]^2, u = s + t, is x^2 - 2 E[u^2].
        h, x = 0.4, 1.3
        eu2 = (h / 2) ** 2 * (7 / 6)
        assert steklov(lambda t: t**2, h, x) == pytest.approx(x**2 - 2 * eu2, abs=1e-13)

    @pytest.mark.parametrize("name", ("sine", "exp_decay"))
    @pytest.mark.parametrize("h", [0.05, 0.1, 0.2])
    def test_d2_matches_differentiated_mean(self, name, h):
        f = builtin(name)
        x = np.linspace(0.5, 5, 7)
        eps = 1e-3
        fd = (steklov(f, h, x + eps) - 2 * steklov(f, h, x) + steklov(f, h, x - eps)) / eps**2
        np.testing.assert_allclose(steklov_d2(f, h, x), fd, atol=1e-5)

    @pytest.mark.parametrize("name", ("sine", "exp_decay"))
    @pytest.mark.parametrize("h", [0.05, 0.1, 0.2])
    def test_d1_matches_differentiated_mean(self, name, h):
        f = builtin(name)
        x = np.linspace(0.5, 5, 7)
        eps = 1e-5
        fd = (steklov(f, h, x + eps) - steklov(f, h, x - eps)) / (2 * eps)
        np.testing.assert_allclose(steklov_d1(f, h, x), fd, atol=1e-7)

    @pytest.mark.parametrize("name", ("sine", "exp_decay"))
    @pytest.mark.parametrize("h", [0.05, 0.1, 0.2])
    def test_first_derivative_inequality(self, name, h):
        f = builtin(name)
        x = GridSpec(20.0, 401).points()
        assert np.max(np.abs(steklov_d1(f, h, x))) <= 5 * f.omega1(h) / h + 1e-9

    def test_bad_h(self):
        with pytest.raises(ValueError):
            steklov(np.sin, 0.0, 1.0)


class TestRhoError:
    def test_constant(self):
        x = np.linspace(0, 5, 11)
        vals = [evaluate_J(const(1.0), OperatorConfig.classical(10), xx) for xx in x]
        assert rho_weighted_error(const(1.0), vals, x, 0) < 1e-13

    def test_square_szasz(self):
        x = np.linspace(0, 5, 51)
        vals = [evaluate_J(lambda t: t**2, OperatorConfig.classical(10), xx, 2) for xx in x]
        assert rho_weighted_error(lambda t: t**2, vals, x, 0) == pytest.approx(1 / 20, abs=1e-12)

    def test_exact_values(self):
        x = np.linspace(0, 5, 11)
        assert rho_weighted_error(np.sin, np.sin(x), x, 1) == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            rho_weighted_error(np.sin, [1.0], [0.0, 1.0], 0)
