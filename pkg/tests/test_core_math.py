import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dprmp.core_math import (
    PhaseConfig,
    binary_entropy,
    deviation_mu_nu,
    deviation_mu_one,
    expected_photon_number,
    fidelity_mu_nu,
    fidelity_mu_one,
    poisson_prob,
    pseudo_photon_prob,
    pseudo_photon_probs,
    s_k,
    series_term_count,
)

mpmath.mp.dps = 40

even_D = st.integers(1, 15).map(lambda h: 2 * h)
intensity = st.floats(0.0, 1.0)


def mp_pseudo(mu, k, D, terms=80):
    mu = mpmath.mpf(mu)
    return mpmath.exp(-mu) * mpmath.fsum(mu ** (m * D + k) / mpmath.factorial(m * D + k) for m in range(terms))


def mp_lattice(x, D, p, q, m0=0, terms=80):
    x = mpmath.mpf(x)
    return mpmath.fsum(x ** (m * D + p) / mpmath.factorial(m * D + q) for m in range(m0, terms) if m * D + q >= 0)


def test_phase_config_validation():
    for bad in (0, 3, -2, 2.5):
        with pytest.raises((TypeError, ValueError)):
            PhaseConfig(bad)
    with pytest.raises(ValueError):
        PhaseConfig(4, tol=1e-3)


@pytest.mark.parametrize("D", [2, 4, 8, 14])
@pytest.mark.parametrize("mu", [0.0, 0.01, 0.3, 0.5, 2.0])
def test_pseudo_photon_against_mpmath(D, mu):
    cfg = PhaseConfig(D)
    for k in range(D):
        assert pseudo_photon_prob(mu, k, cfg) == pytest.approx(float(mp_pseudo(mu, k, D)), rel=1e-13, abs=1e-300)


def test_d2_closed_forms():
    cfg = PhaseConfig(2)
    for mu in (0.1, 0.5, 3.0):
        assert pseudo_photon_prob(mu, 0, cfg) == pytest.approx(math.exp(-mu) * math.cosh(mu), rel=1e-14)
        assert pseudo_photon_prob(mu, 1, cfg) == pytest.approx(math.exp(-mu) * math.sinh(mu), rel=1e-14)
    assert pseudo_photon_prob(0.5, 0, cfg) == pytest.approx(0.6839397, abs=1e-7)


def test_vacuum_input():
    cfg = PhaseConfig(6)
    probs = pseudo_photon_probs(0.0, cfg)
    assert probs[0] == 1.0 and not probs[1:].any()


def test_negative_intensity_rejected():
    with pytest.raises(ValueError):
        pseudo_photon_prob(-0.1, 0, PhaseConfig(4))
    with pytest.raises(ValueError):
        pseudo_photon_prob(0.1, 4, PhaseConfig(4))


@settings(max_examples=200, deadline=None)
@given(D=even_D, mu=st.floats(0.0, 5.0))
def test_normalization_property(D, mu):
    assert pseudo_photon_probs(mu, PhaseConfig(D)).sum() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(mu=st.floats(0.0, 0.5), k=st.integers(0, 3))
def test_poisson_limit_property(mu, k):
    assert abs(pseudo_photon_prob(mu, k, PhaseConfig(20)) - poisson_prob(mu, k)) < 1e-10


@pytest.mark.parametrize("D,k", [(4, 0), (4, 3), (8, 1), (10, 5)])
@pytest.mark.parametrize("alpha", [0.2, 0.7 + 0.3j, -0.4j])
def test_s_k_fock_identity(D, k, alpha):
    # S_k(alpha) = D * sum_m alpha^(mD+k) / (mD+k)!
    a = mpmath.mpc(alpha)
    ref = D * mpmath.fsum(a ** (m * D + k) / mpmath.factorial(m * D + k) for m in range(60))
    got = s_k(alpha, k, PhaseConfig(D))
    assert abs(got - complex(ref)) < 1e-13 * max(1.0, abs(complex(ref)))


def test_s_k_relates_to_pseudo_probs():
    cfg = PhaseConfig(8)
    mu = 0.2
    for k in range(8):
        assert s_k(mu, k, cfg).real == pytest.approx(8 * math.exp(mu) * pseudo_photon_prob(mu, k, cfg), rel=1e-12)
    assert s_k(mu, 1, cfg).real == pytest.approx(1.6000000000113, rel=1e-12)


def test_fidelity_mu_nu_oracle():
    for D, mu, nu in [(4, 0.2, 0.0), (8, 0.5, 0.1), (2, 0.3, 0.3)]:
        ref = mp_lattice(math.sqrt(mu * nu), D, 0, 0) / mpmath.sqrt(mp_lattice(mu, D, 0, 0) * mp_lattice(nu, D, 0, 0))
        assert fidelity_mu_nu(mu, nu, PhaseConfig(D)) == pytest.approx(float(ref), rel=1e-14)
    # frozen: 1/sqrt(1 + 0.2**4/24) for D=4
    assert fidelity_mu_nu(0.2, 0.0, PhaseConfig(4)) == pytest.approx(0.99996667, abs=1e-8)


@pytest.mark.parametrize("D,mu,nu", [(4, 0.2, 0.0), (8, 0.5, 0.1), (12, 0.3, 0.05), (20, 0.01, 0.001)])
def test_deviation_mu_nu_stable(D, mu, nu):
    # the gap can be ~1e-60, so the reference needs far more digits than a double
    with mpmath.workdps(200):
        x = mpmath.sqrt(mpmath.mpf(mu) * mpmath.mpf(nu))
        F = mp_lattice(x, D, 0, 0) / mpmath.sqrt(mp_lattice(mu, D, 0, 0) * mp_lattice(nu, D, 0, 0))
        ref = float(mpmath.sqrt(1 - F * F))
    assert deviation_mu_nu(mu, nu, PhaseConfig(D)) == pytest.approx(ref, rel=1e-10, abs=1e-300)


def test_fidelity_mu_one_anchor():
    cfg = PhaseConfig(2)
    assert fidelity_mu_one(0.5, cfg) == pytest.approx(0.9224522, abs=1e-7)
    assert deviation_mu_one(0.5, cfg) == pytest.approx(0.386111, abs=1e-6)
    assert fidelity_mu_one(0.5, cfg) == pytest.approx(1 / math.sqrt(math.sinh(1.0)), rel=1e-14)


@pytest.mark.parametrize("D,mu", [(8, 0.05), (12, 0.3), (14, 0.01)])
def test_deviation_mu_one_oracle(D, mu):
    F = 1 / mpmath.sqrt(mp_lattice(2 * mu, D, 0, 1))
    assert deviation_mu_one(mu, PhaseConfig(D)) == pytest.approx(float(mpmath.sqrt(1 - F * F)), rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(D=even_D, mu=intensity, nu=intensity)
def test_fidelity_range_and_symmetry(D, mu, nu):
    cfg = PhaseConfig(D)
    F = fidelity_mu_nu(mu, nu, cfg)
    assert 0 <= F <= 1 + 1e-15
    assert F == pytest.approx(fidelity_mu_nu(nu, mu, cfg), rel=1e-14)
    dev = deviation_mu_nu(mu, nu, cfg)
    assert 0 <= dev <= 1
    assert dev == pytest.approx(math.sqrt(max(0.0, 1 - F * F)), abs=1e-7)


def test_expected_photon_number():
    cfg = PhaseConfig(4)
    assert expected_photon_number(0.0, 1, cfg) == 1.0
    assert expected_photon_number(0.0, 0, cfg) == 0.0
    # leading correction for small mu: n_k - k ~ D mu^D k! / (D+k)!
    n = expected_photon_number(0.3, 1, PhaseConfig(10))
    assert n == pytest.approx(1.0000000000015, rel=1e-13)
    assert n - 1 == pytest.approx(10 * 0.3**10 / math.factorial(11), rel=1e-3)


@pytest.mark.parametrize("D,k,mu", [(4, 0, 0.4), (6, 2, 1.0), (8, 7, 0.3)])
def test_expected_photon_number_oracle(D, k, mu):
    mu_m = mpmath.mpf(mu)
    terms = [(m * D + k, mu_m ** (m * D + k) / mpmath.factorial(m * D + k)) for m in range(60)]
    ref = mpmath.fsum(n * t for n, t in terms) / mpmath.fsum(t for _, t in terms)
    assert expected_photon_number(mu, k, PhaseConfig(D)) == pytest.approx(float(ref), rel=1e-13)


def test_truncation_term_count():
    cfg = PhaseConfig(2)
    assert series_term_count(0.0, cfg) >= 4
    assert series_term_count(10.0, cfg) >= 40


def test_binary_entropy():
    assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.11) == pytest.approx(0.499915958, abs=1e-9)
    with pytest.raises(ValueError):
        binary_entropy(1.2)


@given(x=st.floats(0, 1))
def test_binary_entropy_symmetric(x):
    assert binary_entropy(x) == pytest.approx(binary_entropy(1 - x), abs=1e-14)


@settings(max_examples=150, deadline=None)
@given(
    h=st.integers(1, 8),
    r=st.floats(1e-3, 2.0),
    phi=st.floats(0, 2 * math.pi),
    data=st.data(),
)
def test_s_k_fock_identity_property(h, r, phi, data):
    D = 2 * h
    k = data.draw(st.integers(0, D - 1))
    alpha = r * complex(math.cos(phi), math.sin(phi))
    ref = complex(D * mpmath.fsum(mpmath.mpc(alpha) ** (m * D + k) / mpmath.factorial(m * D + k) for m in range(40)))
    got = s_k(alpha, k, PhaseConfig(D))
    assert abs(got - ref) <= 1e-10 * abs(ref) + 1e-300


def test_s_k_matches_phase_sum_at_moderate_alpha():
    import cmath

    D, alpha = 6, 0.8 * cmath.exp(0.3j)
    direct = sum(
        cmath.exp(2j * math.pi * n * k / D) * cmath.exp(alpha * cmath.exp(-2j * math.pi * n / D))
        for n in range(D)
        for k in [2]
    )
    assert abs(s_k(alpha, 2, PhaseConfig(D)) - direct) < 1e-13
