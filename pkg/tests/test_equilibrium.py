"""Equilibrium family and Chapman-Enskog truncation.

The order-1 coefficients are pinned here by an independent quadrature
oracle: the truncation's dimensionless moments must reproduce
Abar = -eps (mu / rho T) D(u) and Bbar = -eps (kappa / rho T^1.5) dT e_x
for random states, which fixes both closed-form coefficients.
"""

import numpy as np
import pytest

from conftest import random_mixture
from hybridgas import (
    CEClosure,
    VelocityGrid,
    anisotropic_gaussian,
    ce_truncation,
    conserved_moments,
    discrete_equilibrium,
    discrete_gaussian,
    es_tensor,
    heat_flux,
    maxwellian,
    primitive_moments,
    realizability_moments,
    stress_tensor,
)
from hybridgas.equilibrium import strain_1d
from hybridgas.errors import ConfigError, NewtonDivergence, NonSPDTensor


def test_maxwellian_peak_value():
    # standard normalization: M(v=0; rho=1, u=0, T=1) = (2 pi)^(-3/2)
    vg = VelocityGrid(v_max=8.0, n_per_axis=17)  # odd: node exactly at v = 0
    f = maxwellian(1.0, np.zeros(3), 1.0, vg)[0]
    center = np.argmin(vg.sq)
    assert vg.sq[center] == 0.0
    assert f[center] == pytest.approx(0.06349363593424097, rel=1e-13)


def test_es_tensor_limits_and_guard():
    theta = np.array([[2.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 2.0]])
    T = np.trace(theta) / 3.0
    tt0 = es_tensor(theta[None], np.array([T]), beta=0.0)
    assert np.allclose(tt0[0], T * np.eye(3))
    tt = es_tensor(theta[None], np.array([T]), beta=-0.5)
    assert np.allclose(tt, 1.5 * T * np.eye(3) - 0.5 * theta)
    with pytest.raises(NonSPDTensor):
        es_tensor(np.diag([3.0, 0.0, 0.0])[None], np.array([1.0]), beta=-0.5)


def test_gaussian_with_isotropic_tensor_is_maxwellian(vg16):
    rho, u, T = 1.4, np.array([0.5, -0.2, 0.0]), 0.9
    tt = es_tensor(T * np.eye(3)[None], np.array([T]), 0.0)
    g = anisotropic_gaussian(rho, u, tt, vg16)
    m = maxwellian(rho, u, T, vg16)
    assert np.allclose(g, m, rtol=1e-13, atol=0.0)


def test_gaussian_matches_prescribed_tensor():
    vg = VelocityGrid(v_max=8.0, n_per_axis=32)
    tt = np.array([[1.2, 0.1, 0.0], [0.1, 0.8, 0.05], [0.0, 0.05, 1.0]])
    g = anisotropic_gaussian(1.0, np.array([0.3, 0.0, 0.0]), tt[None], vg)
    assert np.allclose(stress_tensor(g, vg)[0], tt, atol=1e-6)


def test_discrete_equilibrium_matches_moments_to_tolerance(vg16):
    rng = np.random.default_rng(3)
    f = random_mixture(vg16, rng)
    U = conserved_moments(f, vg16)
    feq = discrete_equilibrium(U, vg16)
    Ueq = conserved_moments(feq, vg16)
    scale = np.abs(U).max()
    assert np.abs(Ueq - U).max() < 1e-12 * scale
    assert np.all(feq > 0.0)


def test_discrete_equilibrium_close_to_analytic_sampling():
    vg = VelocityGrid(v_max=8.0, n_per_axis=24)
    m = maxwellian(1.0, np.array([0.5, 0.0, 0.0]), 1.0, vg)
    U = conserved_moments(m, vg)
    feq = discrete_equilibrium(U, vg)
    assert np.abs(feq - m).max() < 1e-8 * m.max()


def test_discrete_equilibrium_minimizes_entropy(vg16):
    # Gibbs: among positive fields with the same discrete invariants the
    # matched exponential-family state has the least sum f log f
    rng = np.random.default_rng(5)
    for _ in range(5):
        f = random_mixture(vg16, rng) * rng.uniform(0.5, 1.5, vg16.n_nodes)
        U = conserved_moments(f, vg16)
        feq = discrete_equilibrium(U, vg16)
        h = (f * np.log(f)).sum() * vg16.weight
        heq = (feq * np.log(feq)).sum() * vg16.weight
        assert heq <= h + 1e-12 * abs(h)


def test_discrete_equilibrium_unreachable_moments_raise(vg16):
    # mean velocity outside the node range cannot be realized
    U = np.array([[1.0, 50.0, 0.0, 0.0, 0.5 * 2500.0 + 1.5]])
    with pytest.raises(NewtonDivergence):
        discrete_equilibrium(U, vg16, max_iter=20)


def test_discrete_gaussian_matches_full_second_moment(vg24):
    theta = np.array([[1.3, 0.15, 0.0], [0.15, 0.9, 0.1], [0.0, 0.1, 1.1]])
    T = np.trace(theta) / 3.0
    tt = es_tensor(theta[None], np.array([T]), beta=-0.4)
    u = np.array([[0.4, -0.1, 0.2]])
    g = discrete_gaussian(np.array([1.2]), u, tt, vg24)
    rho, uu, _ = primitive_moments(g, vg24)
    assert rho[0] == pytest.approx(1.2, abs=1e-12)
    assert np.allclose(uu[0], u[0], atol=1e-12)
    assert np.allclose(stress_tensor(g, vg24)[0], tt[0], atol=1e-11)


def test_weighted_correction_conserves_invariants(vg16):
    # fallback path: analytic anisotropic sample corrected on the invariants
    theta = np.array([[1.4, 0.0, 0.0], [0.0, 0.8, 0.0], [0.0, 0.0, 1.0]])
    T = np.trace(theta) / 3.0
    tt = es_tensor(theta[None], np.array([T]), beta=-0.5)
    base = anisotropic_gaussian(1.0, np.array([0.2, 0.0, 0.0]), tt, vg16)
    E = 0.5 * 1.0 * (0.04 + np.trace(tt[0]))
    U = np.array([[1.0, 0.2, 0.0, 0.0, E]])
    f = discrete_equilibrium(U, vg16, base=base)
    assert np.abs(conserved_moments(f, vg16) - U).max() < 1e-12


def test_transport_coefficient_laws():
    rho, T = 1.7, 0.6
    bgk = CEClosure(order=1, beta=0.0)
    assert bgk.nu(rho, T) == pytest.approx(rho)
    assert bgk.mu(rho, T) == pytest.approx(rho * T / bgk.nu(rho, T))
    assert bgk.kappa(rho, T) == pytest.approx(2.5 * rho * T / bgk.nu(rho, T))
    assert bgk.prandtl == pytest.approx(1.0)

    es = CEClosure(order=1, beta=-0.5)
    assert es.prandtl == pytest.approx(2.0 / 3.0)
    # Pr = cp mu / kappa with cp = 5/2
    assert 2.5 * es.mu(rho, T) / es.kappa(rho, T) == pytest.approx(2.0 / 3.0)
    power = CEClosure(order=1, beta=0.0, nu_omega=0.5)
    assert power.nu(rho, T) == pytest.approx(rho * T**0.5)
    with pytest.raises(ConfigError):
        CEClosure(order=1, beta=1.0)
    with pytest.raises(ConfigError):
        CEClosure(order=2)


def test_truncation_order_zero_is_maxwellian(vg16):
    cl = CEClosure(order=0)
    f0 = ce_truncation(1.0, np.array([0.1, 0.0, 0.0]), 0.8,
                       np.array([0.3, 0.0, 0.0]), 0.2, cl, vg16, eps=1e-2)
    assert np.allclose(f0, maxwellian(1.0, np.array([0.1, 0.0, 0.0]), 0.8, vg16))


def test_truncation_keeps_conserved_moments():
    vg = VelocityGrid(v_max=10.0, n_per_axis=40)
    cl = CEClosure(order=1, beta=0.0)
    rho, u, T = 1.0, np.array([0.2, 0.1, 0.0]), 0.8
    du, dT = np.array([0.4, -0.2, 0.1]), 0.5
    f1 = ce_truncation(rho, u, T, du, dT, cl, vg, eps=1e-2)
    f0 = maxwellian(rho, u, T, vg)
    dU = conserved_moments(f1, vg) - conserved_moments(f0, vg)
    assert np.abs(dU).max() < 1e-8


def test_truncation_moments_reproduce_ns_closure():
    """Quadrature oracle pinning the g1 coefficients."""
    vg = VelocityGrid(v_max=10.0, n_per_axis=40)
    rng = np.random.default_rng(17)
    for beta in (0.0, -0.5):
        cl = CEClosure(order=1, beta=beta)
        for _ in range(8):
            rho = rng.uniform(0.3, 2.0)
            u = rng.uniform(-0.5, 0.5, 3)
            T = rng.uniform(0.5, 1.5)
            du = rng.uniform(-0.5, 0.5, 3)
            dT = rng.uniform(-0.5, 0.5)
            eps = 1e-2
            f1 = ce_truncation(rho, u, T, du, dT, cl, vg, eps=eps)
            b = realizability_moments(f1, vg)
            mu, kappa = cl.mu(rho, T), cl.kappa(rho, T)
            A_exp = -eps * mu / (rho * T) * strain_1d(du[None])[0]
            B_exp = np.array([-eps * kappa / (rho * T**1.5) * dT, 0.0, 0.0])
            assert np.allclose(b.Abar, A_exp, atol=1e-4 * max(np.abs(A_exp).max(), 1e-3))
            assert np.allclose(b.Bbar, B_exp, atol=1e-4 * max(np.abs(B_exp).max(), 1e-3))


def test_truncation_heat_flux_is_fourier():
    vg = VelocityGrid(v_max=10.0, n_per_axis=40)
    for beta in (0.0, -0.5):
        cl = CEClosure(order=1, beta=beta)
        rho, u, T = 1.2, np.array([0.3, 0.0, 0.0]), 0.9
        dT, eps = 0.4, 5e-3
        f1 = ce_truncation(rho, u, T, np.zeros(3), dT, cl, vg, eps=eps)
        q = heat_flux(f1, vg)[0]
        assert q[0] == pytest.approx(-eps * cl.kappa(rho, T) * dT, rel=1e-5)
        assert abs(q[1]) < 1e-12 and abs(q[2]) < 1e-12
