import numpy as np
import pytest
from scipy import integrate

from discrete_poisson.theory import tensors as tn
from discrete_poisson.theory.expectations import (
    OrientationDistribution,
    aux_integrals,
    closed_expectations,
    cone_aux_closed,
    expectation_oracle,
    general_expectations,
)

GAMMAS = [0.1, 0.7, 1.3, np.pi / 2, 2.2, 3.0]


def quadrature_expectations(gamma, dim):
    """Independent route: tensor-product Gauss quadrature of the definitional tensors."""
    xs, ws = np.polynomial.legendre.leggauss(60)
    if dim == 2:
        chi, wc = gamma * xs, ws / 2.0
        xi = np.linspace(0.0, 2 * np.pi, 48, endpoint=False)
        X, C = np.meshgrid(xi, chi)
        w = np.broadcast_to(wc[:, None], X.shape).ravel() / len(xi)
        n, rho = tn.normal_2d(X.ravel()), tn.rotation_2d(C.ravel())
    else:
        # n fixed (results are isotropic averages, so average over orientations of n via zeta/xi grid)
        chi = 0.5 * gamma * (xs + 1.0)
        wc = 0.5 * gamma * ws * np.sin(chi) / (1.0 - np.cos(gamma))
        zx, zw = np.polynomial.legendre.leggauss(12)
        zeta = np.arccos(zx)
        xi = np.linspace(0.0, 2 * np.pi, 12, endpoint=False)
        theta = np.linspace(0.0, 2 * np.pi, 12, endpoint=False)
        Xi, Z, Th, C = np.meshgrid(xi, zeta, theta, chi, indexing="ij")
        W = (np.ones_like(Xi) * zw[None, :, None, None] / 2 / 144 * wc[None, None, None, :])
        w = W.ravel()
        n = tn.normal_3d(Xi.ravel(), Z.ravel())
        rho = tn.rotation_3d(Xi.ravel(), Z.ravel(), Th.ravel(), C.ravel())
    big_n, big_t = tn.script_tensors(n, rho)
    t = np.einsum("sij,sj->si", rho, n)
    m_vol = float((np.einsum("si,si->s", n, t) * w).sum())
    ww = w[:, None, None, None, None]
    return m_vol, tn.symmetrize_minor((big_n * ww).sum(0)), tn.symmetrize_minor((big_t * ww).sum(0))


@pytest.mark.parametrize("gamma", GAMMAS)
def test_closed_form_2d_matches_quadrature(gamma):
    m, n_sym, t_sym = quadrature_expectations(gamma, 2)
    exact = closed_expectations(OrientationDistribution.cone(gamma, 2))
    assert exact.m_vol == pytest.approx(m, abs=1e-12)
    assert np.allclose(exact.n_sym, n_sym, atol=1e-12)
    assert np.allclose(exact.t_sym, t_sym, atol=1e-12)


@pytest.mark.parametrize("gamma", [0.3, 1.2, 2.0944, 2.9])
def test_closed_form_3d_matches_quadrature(gamma):
    m, n_sym, t_sym = quadrature_expectations(gamma, 3)
    exact = closed_expectations(OrientationDistribution.cone(gamma, 3))
    assert exact.m_vol == pytest.approx(m, abs=1e-10)
    assert np.allclose(exact.n_sym, n_sym, atol=1e-10)
    assert np.allclose(exact.t_sym, t_sym, atol=1e-10)


@pytest.mark.parametrize("dim", [2, 3])
@pytest.mark.parametrize("gamma", GAMMAS)
def test_aux_integrals_closed_vs_quadrature(gamma, dim):
    q = aux_integrals(OrientationDistribution.cone(gamma, dim))
    assert q == pytest.approx(cone_aux_closed(gamma, dim), abs=1e-12)


@pytest.mark.parametrize("dim", [2, 3])
@pytest.mark.parametrize("gamma", GAMMAS)
def test_general_expectations_reduce_to_cone(gamma, dim):
    i1, i2 = cone_aux_closed(gamma, dim)
    gen = general_expectations(i1, i2, dim)
    exact = closed_expectations(OrientationDistribution.cone(gamma, dim))
    assert gen.m_vol == pytest.approx(exact.m_vol, abs=1e-14)
    assert np.allclose(gen.n_sym, exact.n_sym, atol=1e-14)
    assert np.allclose(gen.t_sym, exact.t_sym, atol=1e-14)


@pytest.mark.parametrize("dim", [2, 3])
def test_expectations_sum_to_isotropic_trace(dim):
    # N + T = t (x) 1 (x) t before symmetrization, so the sum depends on gamma only through nothing
    for gamma in GAMMAS:
        e = closed_expectations(OrientationDistribution.cone(gamma, dim))
        a, b = tn.isotropic_coefficients(e.n_sym + e.t_sym)
        assert b == pytest.approx(0.0, abs=1e-14)
        assert a == pytest.approx(1.0 / dim, abs=1e-14)


def test_dirac_distributions_aux():
    assert aux_integrals(OrientationDistribution.parallel()) == (1.0, 1.0)
    assert aux_integrals(OrientationDistribution.perpendicular()) == (0.0, -1.0)


def test_tabulated_uniform_matches_cone():
    grid = np.linspace(-0.8, 0.8, 401)
    dist = OrientationDistribution.tabulated(grid, np.ones_like(grid))
    assert aux_integrals(dist) == pytest.approx(cone_aux_closed(0.8, 2), abs=1e-10)


def test_tabulated_validation():
    grid = np.linspace(-1, 1, 11)
    with pytest.raises(ValueError):
        OrientationDistribution.tabulated(grid, np.ones_like(grid), normalize=False)
    with pytest.raises(ValueError):
        OrientationDistribution.tabulated(grid[::-1], np.ones_like(grid))
    with pytest.raises(ValueError):
        OrientationDistribution.cone(4.0)


@pytest.mark.parametrize("dim", [2, 3])
def test_cone_sampler_moments(dim, rng):
    dist = OrientationDistribution.cone(1.1, dim)
    chi = dist.sample_chi(rng, 200_000)
    assert np.abs(chi).max() <= 1.1
    i1, i2 = cone_aux_closed(1.1, dim)
    assert np.cos(chi).mean() == pytest.approx(i1, abs=5e-3)
    assert np.cos(2 * chi).mean() == pytest.approx(i2, abs=5e-3)


def test_tabulated_sampler_follows_density(rng):
    grid = np.linspace(-np.pi, np.pi, 801)
    dens = np.cos(grid / 2) ** 2
    dist = OrientationDistribution.tabulated(grid, dens)
    chi = dist.sample_chi(rng, 200_000)
    i1 = integrate.simpson(np.cos(grid) * dist.density, x=grid)
    assert np.cos(chi).mean() == pytest.approx(i1, abs=5e-3)


@pytest.mark.parametrize("dim", [2, 3])
def test_oracle_agrees_with_closed_form(dim):
    dist = OrientationDistribution.cone(1.7, dim)
    est = expectation_oracle(dist, 200_000, seed=3)
    exact = closed_expectations(dist)
    assert abs(est.m_vol - exact.m_vol) < 5 * est.m_vol_se + 1e-12
    assert np.all(np.abs(est.n_sym - exact.n_sym) <= 5 * est.n_sym_se + 1e-12)
    assert np.all(np.abs(est.t_sym - exact.t_sym) <= 5 * est.t_sym_se + 1e-12)


def test_oracle_deterministic_and_thread_independent():
    dist = OrientationDistribution.cone(0.9, 2)
    a = expectation_oracle(dist, 20_000, seed=11)
    b = expectation_oracle(dist, 20_000, seed=11, threads=3)
    assert a.m_vol == b.m_vol
    assert np.array_equal(a.n_sym, b.n_sym)
    c = expectation_oracle(dist, 20_000, seed=12)
    assert not np.array_equal(a.n_sym, c.n_sym)


def test_oracle_standard_error_scales_with_samples():
    dist = OrientationDistribution.cone(2.0, 2)
    small = expectation_oracle(dist, 10_000, seed=1)
    large = expectation_oracle(dist, 160_000, seed=1)
    ratio = small.m_vol_se / large.m_vol_se
    assert 2.5 < ratio < 6.5  # sqrt(16) = 4


def test_oracle_exact_for_parallel():
    est = expectation_oracle(OrientationDistribution.parallel(3), 1000)
    exact = closed_expectations(OrientationDistribution.cone(0.0, 3))
    assert est.m_vol == pytest.approx(1.0)
    assert np.allclose(est.n_sym, exact.n_sym, atol=0.05)
