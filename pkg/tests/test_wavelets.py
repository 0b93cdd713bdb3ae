"""Kernels, closed-form wavelets, modified combinations, truncation bounds."""

import math

import numpy as np
import pytest

from sphwave.admissibility import solve_gamma
from sphwave.harmonics import gauss_jacobi_rule, gegenbauer_coefficient
from sphwave.rotderiv import derivative_order, synthesize
from sphwave.special import LambdaParam, reproducing_kernel
from sphwave.wavelets import (
    KIND_HEAT,
    KIND_POISSON,
    TruncationError,
    WaveletSpec,
    directional_wavelet_field,
    g1_closed,
    g2_closed,
    kernel_zonal_coeffs,
    modified_wavelet_field,
    poisson_kernel_closed,
    truncation_degree,
)

THETA1 = np.linspace(0.05, np.pi - 0.05, 12)
THETA2 = np.linspace(0.0, 2 * np.pi, 9, endpoint=False)


def test_spec_validation():
    lp = LambdaParam(3)
    with pytest.raises(ValueError):
        WaveletSpec(lp=lp, kind="gauss", order=1, rho=0.5)
    with pytest.raises(ValueError):
        WaveletSpec(lp=lp, kind=KIND_POISSON, order=1, rho=0.0)
    with pytest.raises(ValueError):
        WaveletSpec(lp=lp, kind=KIND_POISSON, order=-1, rho=0.5)


def test_kernel_coeff_degree_zero():
    for n in (2, 3, 5):
        lp = LambdaParam(n)
        for kind in (KIND_POISSON, KIND_HEAT):
            spec = WaveletSpec(lp=lp, kind=kind, order=0, rho=0.7)
            assert kernel_zonal_coeffs(spec, 0)[0] == pytest.approx(1.0 / lp.sigma, rel=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("rho", [0.2, 0.5, 1.0])
def test_poisson_series_matches_closed_form(n, rho):
    lp = LambdaParam(n)
    spec = WaveletSpec(lp=lp, kind=KIND_POISSON, order=0, rho=rho)
    field = directional_wavelet_field(spec, eps=1e-11)
    series = synthesize(field, THETA1, 0.0)
    closed = poisson_kernel_closed(lp, rho, THETA1)
    assert np.max(np.abs(series - closed)) < 1e-9 * np.max(np.abs(closed))


def test_zonal_kernel_is_theta2_independent():
    lp = LambdaParam(3)
    spec = WaveletSpec(lp=lp, kind=KIND_POISSON, order=0, rho=0.5)
    field = directional_wavelet_field(spec, eps=1e-11)
    v1 = synthesize(field, 1.0, 0.0)
    v2 = synthesize(field, 1.0, 2.0)
    assert float(v1) == pytest.approx(float(v2), rel=1e-14)


def test_heat_kernel_series_oracle():
    # brute-force partial sum of exp(-rho l^2 / (2 lam)) K_l / sigma
    lp = LambdaParam(3)
    rho = 0.3
    spec = WaveletSpec(lp=lp, kind=KIND_HEAT, order=0, rho=rho)
    field = directional_wavelet_field(spec, L=80)
    for th in (0.3, 1.4, 2.8):
        brute = sum(
            math.exp(-rho * l * l / (2 * lp.lam)) * reproducing_kernel(lp, l, math.cos(th))
            for l in range(81)
        ) / lp.sigma
        assert float(synthesize(field, th, 0.0)) == pytest.approx(brute, rel=1e-12)


def test_poisson_coeff_round_trip_through_quadrature():
    lp = LambdaParam(3)
    rho = 0.6
    spec = WaveletSpec(lp=lp, kind=KIND_POISSON, order=0, rho=rho)
    field = directional_wavelet_field(spec, eps=1e-12)
    rule = gauss_jacobi_rule(lp.lam, 220)
    vals = synthesize(field, np.arccos(rule.nodes), 0.0)
    for l in range(10):
        expect = (lp.lam + l) / lp.lam * math.exp(-rho * l) / lp.sigma
        assert gegenbauer_coefficient(rule, vals, l) == pytest.approx(expect, rel=1e-10)


@pytest.mark.parametrize("n", [2, 4])
def test_first_order_matches_closed_form(n):
    lp = LambdaParam(n)
    spec = WaveletSpec(lp=lp, kind=KIND_POISSON, order=1, rho=0.5)
    field = directional_wavelet_field(spec, eps=1e-11)
    t1, t2 = np.meshgrid(THETA1, THETA2, indexing="ij")
    series = synthesize(field, t1, t2)
    closed = g1_closed(spec, t1, t2)
    assert np.max(np.abs(series - closed)) < 1e-9 * np.max(np.abs(closed))


@pytest.mark.parametrize("n", [3, 5])
def test_second_order_matches_closed_form(n):
    lp = LambdaParam(n)
    spec = WaveletSpec(lp=lp, kind=KIND_POISSON, order=2, rho=0.4)
    field = directional_wavelet_field(spec, eps=1e-11)
    t1, t2 = np.meshgrid(THETA1, THETA2, indexing="ij")
    series = synthesize(field, t1, t2)
    closed = g2_closed(spec, t1, t2)
    assert np.max(np.abs(series - closed)) < 1e-9 * np.max(np.abs(closed))


def test_g1_trivial_zeros_and_oddness():
    spec = WaveletSpec(lp=LambdaParam(3), kind=KIND_POISSON, order=1, rho=0.5)
    assert g1_closed(spec, 0.0, 1.0) == 0.0
    th2 = np.linspace(0, np.pi, 7)
    a = g1_closed(spec, 1.1, th2)
    b = g1_closed(spec, 1.1, np.pi - th2)
    # pi - th2 is inexact in floats, so allow rounding at the scale of the values
    assert np.allclose(a, -b, rtol=1e-12, atol=1e-14 * np.max(np.abs(a)))


def test_g2_at_polar_axis():
    for n in (2, 4):
        lp = LambdaParam(n)
        rho = 0.35
        spec = WaveletSpec(lp=lp, kind=KIND_POISSON, order=2, rho=rho)
        r = math.exp(-rho)
        expect = (
            -2 * rho**2 * (lp.lam + 1) * r * (1 - r * r)
            / (lp.sigma * (1 - r) ** (2 * (lp.lam + 2)))
        )
        assert float(g2_closed(spec, 0.0, 0.9)) == pytest.approx(expect, rel=1e-13)


def test_modified_order_zero_is_kernel():
    lp = LambdaParam(3)
    gam = solve_gamma(lp.lam, 0)
    field = modified_wavelet_field(lp, gam, KIND_POISSON, 0.5, L=20)
    spec = WaveletSpec(lp=lp, kind=KIND_POISSON, order=0, rho=0.5)
    assert np.allclose(field.coeffs[:, 0], kernel_zonal_coeffs(spec, 20), rtol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_modified_order_one_scaling(n):
    # order-1 combination is rho * sqrt(2 lam + 1) * (first derivative field)
    lp = LambdaParam(n)
    rho, L = 0.45, 24
    gam = solve_gamma(lp.lam, 1)
    assert gam.gammas[1] == pytest.approx(math.sqrt(2 * lp.lam + 1), rel=1e-14)
    got = modified_wavelet_field(lp, gam, KIND_POISSON, rho, L=L)
    spec = WaveletSpec(lp=lp, kind=KIND_POISSON, order=1, rho=rho)
    bare = derivative_order(kernel_zonal_coeffs(spec, L), lp, 1)
    expect = rho * math.sqrt(2 * lp.lam + 1) * bare.coeffs
    assert np.allclose(got.coeffs, expect, rtol=1e-13, atol=1e-300)


def test_heat_side_has_no_rho_prefactor():
    lp = LambdaParam(2)
    rho, L = 0.6, 16
    gam = solve_gamma(lp.lam, 1)
    got = modified_wavelet_field(lp, gam, KIND_HEAT, rho, L=L)
    spec = WaveletSpec(lp=lp, kind=KIND_HEAT, order=1, rho=rho)
    bare = derivative_order(kernel_zonal_coeffs(spec, L), lp, 1)
    assert np.allclose(got.coeffs, gam.gammas[1] * bare.coeffs, rtol=1e-13, atol=1e-300)


def test_truncation_monotone_in_rho():
    lp = LambdaParam(3)
    degrees = [
        truncation_degree(WaveletSpec(lp=lp, kind=KIND_POISSON, order=1, rho=rho), 1e-10)
        for rho in (0.2, 0.5, 1.0, 2.0)
    ]
    assert degrees == sorted(degrees, reverse=True)


@pytest.mark.parametrize("n,order,rho", [(2, 1, 1.0), (3, 2, 0.5), (5, 1, 0.3)])
def test_truncation_bound_validated_by_direct_tail(n, order, rho):
    lp = LambdaParam(n)
    spec = WaveletSpec(lp=lp, kind=KIND_POISSON, order=order, rho=rho)
    eps = 1e-10
    L = truncation_degree(spec, eps)
    t1, t2 = np.meshgrid(THETA1, THETA2, indexing="ij")
    short = synthesize(directional_wavelet_field(spec, L=L), t1, t2)
    extended = synthesize(directional_wavelet_field(spec, L=L + 250), t1, t2)
    assert np.max(np.abs(extended - short)) < eps


def test_truncation_cap_rejects_tiny_scales():
    lp = LambdaParam(2)
    spec = WaveletSpec(lp=lp, kind=KIND_POISSON, order=1, rho=1e-4)
    with pytest.raises(TruncationError):
        truncation_degree(spec, 1e-12)


def test_l2_norm_stable_under_refinement():
    lp = LambdaParam(3)
    spec = WaveletSpec(lp=lp, kind=KIND_POISSON, order=1, rho=0.8)
    L = truncation_degree(spec, 1e-12)
    a = directional_wavelet_field(spec, L=L).l2_norm_sq()
    b = directional_wavelet_field(spec, L=2 * L).l2_norm_sq()
    assert abs(a - b) < 1e-10 * b


def test_field_builder_argument_contract():
    lp = LambdaParam(3)
    spec = WaveletSpec(lp=lp, kind=KIND_POISSON, order=1, rho=0.5)
    with pytest.raises(ValueError):
        directional_wavelet_field(spec)
    with pytest.raises(ValueError):
        directional_wavelet_field(spec, L=10, eps=1e-10)


def test_modified_field_lambda_mismatch():
    gam = solve_gamma(1.0, 1)  # solved for the 3-sphere
    with pytest.raises(ValueError):
        modified_wavelet_field(LambdaParam(2), gam, KIND_POISSON, 0.5, L=8)
