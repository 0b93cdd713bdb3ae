"""Gegenbauer recurrences, normalization constants, dimensions."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import gammaln

from sphwave.special import (
    LambdaParam,
    dim_harmonic,
    gegenbauer_batch,
    gegenbauer_derivative,
    gegenbauer_value,
    gegenbauer_weighted_sum,
    norm_const_a,
    reproducing_kernel,
    surface_measure,
)

LAMBDAS = [0.5, 1.0, 1.5, 2.0, 3.0]
TGRID_21 = np.linspace(-1.0, 1.0, 21)


def gegenbauer_series_t1_exact(lam: Fraction, l: int) -> Fraction:
    """Explicit-series oracle at t = 1 in exact rational arithmetic."""
    total = Fraction(0)
    for j in range(l // 2 + 1):
        # Gamma(lam + l - j)/Gamma(lam) as a rising product
        num = Fraction(1)
        for i in range(l - j):
            num *= lam + i
        term = Fraction((-1) ** j) * num / (math.factorial(j) * math.factorial(l - 2 * j))
        total += term * Fraction(2) ** (l - 2 * j)
    return total


def legendre_recurrence(L: int, t: np.ndarray) -> np.ndarray:
    """Independent Legendre evaluation (not via the Gegenbauer code path)."""
    out = np.empty((L + 1,) + t.shape)
    out[0] = 1.0
    if L >= 1:
        out[1] = t
    for l in range(1, L):
        out[l + 1] = ((2 * l + 1) * t * out[l] - l * out[l - 1]) / (l + 1)
    return out


def test_surface_measure_values():
    assert surface_measure(2) == pytest.approx(4 * np.pi, rel=1e-15)
    assert surface_measure(3) == pytest.approx(2 * np.pi**2, rel=1e-15)
    assert LambdaParam(4).sigma == pytest.approx(8 * np.pi**2 / 3, rel=1e-14)


def test_lambda_param_invariants():
    for n in range(2, 8):
        lp = LambdaParam(n)
        assert lp.lam == (n - 1) / 2
    with pytest.raises(ValueError):
        LambdaParam(1)


def test_degree_zero_is_one():
    assert gegenbauer_batch(0.77, 0, 0.3)[0] == 1.0


def test_order_one_explicit_polynomials():
    t = TGRID_21
    c = gegenbauer_batch(1.0, 2, t)
    assert np.allclose(c[0], 1.0, atol=0)
    assert np.allclose(c[1], 2 * t, atol=0)
    assert np.allclose(c[2], 4 * t**2 - 1, rtol=1e-15, atol=1e-15)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_value_at_one_exact_series_oracle(lam):
    lamF = Fraction(lam)
    vals = gegenbauer_batch(lam, 10, 1.0)
    for l in range(11):
        expect = float(gegenbauer_series_t1_exact(lamF, l))
        assert vals[l] == pytest.approx(expect, rel=1e-13)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_generating_function(lam):
    tgrid = np.linspace(-1.0, 1.0, 11)
    for r in (0.1, 0.3, 0.5):
        # geometric tail: |C_l(t)| <= C_l(1) and C_l(1) r^l eventually decays
        L = 40
        while True:
            c1 = float(gegenbauer_batch(lam, L + 1, 1.0)[L + 1])
            q = r * (L + 2 * lam) / (L + 1)
            if q < 1 and c1 * r ** (L + 1) / (1 - q) < 1e-12:
                break
            L += 20
        vals = gegenbauer_batch(lam, L, tgrid)
        series = np.sum(vals * np.power(r, np.arange(L + 1))[:, None], axis=0)
        closed = (1 - 2 * tgrid * r + r * r) ** (-lam)
        assert np.max(np.abs(series - closed)) < 1e-10


@pytest.mark.parametrize("lam", [1.0, 1.5, 2.0, 3.0])
def test_recurrence_order_lowering(lam):
    # (l+1) C_{l+1}^{lam-1} = 2(lam-1) [t C_l^lam - C_{l-1}^lam]; needs lam-1 > -1/2
    t = TGRID_21
    low = gegenbauer_batch(lam - 1.0, 51, t)
    cur = gegenbauer_batch(lam, 50, t)
    for l in range(1, 51):
        lhs = l * low[l]
        rhs = 2 * (lam - 1) * (t * cur[l - 1] - cur[l - 2]) if l >= 2 else 2 * (lam - 1) * t * cur[0]
        scale = np.maximum(np.abs(lhs), 1.0)
        assert np.max(np.abs(lhs - rhs) / scale) < 1e-10


@pytest.mark.parametrize("lam", LAMBDAS)
def test_recurrence_order_raising(lam):
    # l C_l^lam = (2 lam + l - 1) t C_{l-1}^lam - 2 lam (1-t^2) C_{l-2}^{lam+1}
    t = TGRID_21
    cur = gegenbauer_batch(lam, 50, t)
    up = gegenbauer_batch(lam + 1.0, 48, t)
    for l in range(2, 51):
        lhs = l * cur[l]
        rhs = (2 * lam + l - 1) * t * cur[l - 1] - 2 * lam * (1 - t**2) * up[l - 2]
        scale = np.maximum(np.abs(lhs), 1.0)
        assert np.max(np.abs(lhs - rhs) / scale) < 1e-10


@pytest.mark.parametrize("lam", LAMBDAS)
def test_max_at_right_endpoint(lam):
    vals = gegenbauer_batch(lam, 50, TGRID_21)
    at_one = gegenbauer_batch(lam, 50, 1.0)
    for l in range(51):
        assert np.max(np.abs(vals[l])) <= at_one[l] * (1 + 1e-12)


def test_derivative_examples():
    t = TGRID_21
    assert gegenbauer_derivative(0, 1.7, 0.3) == 0.0
    assert np.allclose(gegenbauer_derivative(2, 1.0, t), 8 * t, rtol=1e-14)
    for lam in LAMBDAS:
        assert gegenbauer_derivative(1, lam, 0.2) == pytest.approx(2 * lam, rel=1e-15)


def test_derivative_matches_finite_difference():
    h = 1e-6
    for lam in (0.5, 1.5):
        for l in (3, 7):
            fd = (gegenbauer_value(lam, l, 0.4 + h) - gegenbauer_value(lam, l, 0.4 - h)) / (2 * h)
            assert gegenbauer_derivative(l, lam, 0.4) == pytest.approx(fd, rel=1e-8)


def test_domain_errors():
    with pytest.raises(ValueError):
        gegenbauer_batch(1.0, 3, 1.5)
    with pytest.raises(ValueError):
        gegenbauer_batch(-0.5, 3, 0.0)
    with pytest.raises(ValueError):
        gegenbauer_batch(1.0, -1, 0.0)


def test_weighted_sum_matches_batch():
    rng = np.random.default_rng(3)
    w = rng.standard_normal(31)
    t = np.linspace(-1, 1, 7)
    direct = np.sum(gegenbauer_batch(1.5, 30, t) * w[:, None], axis=0)
    assert np.allclose(gegenbauer_weighted_sum(1.5, w, t), direct, rtol=1e-13, atol=1e-13)


# -- normalization constants -------------------------------------------------


def norm_const_product_oracle(n: int, l: int, k1: int) -> float:
    """Full product-formula evaluation of the normalization constant."""
    ks = [l, k1] + [0] * (n - 2)
    lg = -gammaln((n + 1) / 2)
    for tau in range(1, n):
        kprev, kt = ks[tau - 1], ks[tau]
        lg += (
            (n - tau + 2 * kt - 2) * np.log(2.0)
            + gammaln(kprev - kt + 1)
            + np.log(n - tau + 2 * kprev)
            + 2 * gammaln((n - tau) / 2 + kt)
            - 0.5 * np.log(np.pi)
            - gammaln(n - tau + kprev + kt)
        )
    return float(np.exp(0.5 * lg))


def test_norm_const_trivial_and_simple():
    for n in (2, 3, 4, 5):
        assert norm_const_a(LambdaParam(n), 0, 0) == pytest.approx(1.0, rel=1e-13)
    for l in range(0, 20):
        assert norm_const_a(LambdaParam(2), l, 0) == pytest.approx(np.sqrt(2 * l + 1), rel=1e-13)
    # on the 3-sphere every zonal constant is 1: (n-2)! l! (n+2l-1) == (n+l-2)! (n-1)
    for l in (1, 2, 5):
        assert norm_const_a(LambdaParam(3), l, 0) == pytest.approx(1.0, rel=1e-14)
    assert norm_const_a(LambdaParam(4), 1, 0) == pytest.approx(np.sqrt(5.0) / 3.0, rel=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_norm_const_branches_match_product_formula(n):
    lp = LambdaParam(n)
    for l in range(0, 26, 5):
        for k1 in range(0, l + 1, 3):
            assert norm_const_a(lp, l, k1) == pytest.approx(
                norm_const_product_oracle(n, l, k1), rel=1e-12
            )


def test_norm_const_large_degree_finite():
    val = norm_const_a(LambdaParam(4), 220, 100)
    assert np.isfinite(val) and val > 0.0


def test_norm_const_errors():
    with pytest.raises(ValueError):
        norm_const_a(LambdaParam(3), 2, 3)
    with pytest.raises(ValueError):
        norm_const_a(LambdaParam(3), 2, -1)


# -- harmonic dimension and reproducing kernel --------------------------------


def test_dim_harmonic():
    for n in (2, 3, 4, 5):
        assert dim_harmonic(n, 0) == 1
    for l in range(12):
        assert dim_harmonic(2, l) == 2 * l + 1
        assert dim_harmonic(3, l) == (l + 1) ** 2
    assert dim_harmonic(2, 3) == 7
    assert dim_harmonic(3, 2) == 9
    with pytest.raises(ValueError):
        dim_harmonic(1, 2)


def test_reproducing_kernel_values():
    lp = LambdaParam(4)
    assert reproducing_kernel(lp, 0, 0.23) == pytest.approx(1.0, rel=1e-15)
    for l in (1, 4, 9):
        expect = (lp.lam + l) / lp.lam * float(gegenbauer_series_t1_exact(Fraction(3, 2), l))
        assert reproducing_kernel(lp, l, 1.0) == pytest.approx(expect, rel=1e-12)


def test_reproducing_kernel_legendre_oracle():
    lp = LambdaParam(2)
    t = TGRID_21
    pl = legendre_recurrence(12, t)
    for l in range(13):
        assert np.allclose(reproducing_kernel(lp, l, t), (2 * l + 1) * pl[l], rtol=1e-11, atol=1e-12)


def test_negative_degree_convention():
    # C_l = 0 for l < 0, exposed so downstream recursions need no guards
    from sphwave.special import gegenbauer_value

    assert gegenbauer_value(1.5, -1, 0.3) == 0.0
    assert gegenbauer_value(1.5, -4, np.array([0.1, 0.9])).tolist() == [0.0, 0.0]
