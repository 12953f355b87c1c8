import math

import numpy as np
import pytest

import markov_jscc as mj
from markov_jscc.measures import ChainSpectra

from conftest import dominant_root_2x2, iid_matrix, random_chain_matrix

THETA_GRID = (-5.0, -1.0, -0.3, 0.3, 0.7, 0.95)


def binary_entropy(p):
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


# -- single-shot ------------------------------------------------------------


def test_down_shot_uniform_independent():
    p = np.full((2, 3), 1.0 / 6.0)
    for theta in THETA_GRID + (0.0,):
        assert mj.h_down_shot(p, theta) == pytest.approx(math.log(2), abs=1e-12)
        assert mj.h_up_shot(p, theta) == pytest.approx(math.log(2), abs=1e-12)
        assert mj.h_two_param_shot(p, theta, -0.5) == pytest.approx(
            math.log(2), abs=1e-12
        )


def test_down_shot_deterministic():
    p = np.array([[0.3, 0.0], [0.0, 0.7]])
    for theta in THETA_GRID:
        assert mj.h_down_shot(p, theta) == pytest.approx(0.0, abs=1e-12)


def test_down_shot_direct_summation(channel12):
    # one step of W(0.1,0.2) from stationarity, singleton side information
    pi = mj.stationary_distribution(channel12.matrix)
    joint = (channel12.matrix.entries * pi[None, :]).reshape(-1, 1)
    theta = 0.5
    expected = math.log(np.sum(joint ** (1 - theta))) / theta
    assert mj.h_down_shot(joint, theta) == pytest.approx(expected, rel=1e-12)


def test_two_param_shot_matches_up_at_equal_orders():
    p = np.array([[0.4, 0.1], [0.2, 0.3]])
    for theta in THETA_GRID:
        assert mj.h_two_param_shot(p, theta, theta) == pytest.approx(
            mj.h_up_shot(p, theta), abs=1e-12
        )


def test_two_param_shot_direct_summation():
    p = np.array([[0.4, 0.1], [0.2, 0.3]])
    theta, theta_prime = 0.3, -0.5
    col = (p ** (1 - theta_prime)).sum(axis=0) ** (1.0 / (1 - theta_prime))
    q = col / col.sum()
    expected = math.log(np.sum(p ** (1 - theta) * q[None, :] ** theta)) / theta
    assert mj.h_two_param_shot(p, theta, theta_prime) == pytest.approx(
        expected, rel=1e-12
    )


def test_order_domain_error():
    p = np.array([[0.5], [0.5]])
    with pytest.raises(mj.DomainError):
        mj.h_down_shot(p, 1.0)
    with pytest.raises(mj.DomainError):
        mj.renyi_entropy([0.5, 0.5], 1.2)


# -- transition-matrix entropies ---------------------------------------------


def test_h_down_tm_iid_equals_single_letter():
    p = np.array([0.7, 0.3])
    chain = mj.JointChannelChain(x_size=2, z_size=1, matrix=iid_matrix(p))
    joint = p.reshape(-1, 1)
    for theta in (0.5, -0.7):
        assert mj.h_down_tm(chain, theta) == pytest.approx(
            mj.h_down_shot(joint, theta), abs=1e-12
        )


def test_h_down_tm_symmetric_chain_is_log2():
    chain = mj.JointChannelChain(x_size=2, z_size=1, matrix=mj.binary_chain(0.5, 0.5))
    for theta in THETA_GRID:
        assert mj.h_down_tm(chain, theta) == pytest.approx(math.log(2), abs=1e-11)


def test_h_down_tm_quadratic_root(channel12, w12):
    theta = 0.25
    expected = math.log(dominant_root_2x2(w12.entries ** (1 - theta))) / theta
    assert mj.h_down_tm(channel12, theta) == pytest.approx(expected, rel=1e-11)


def test_h_up_tm_iid_source_is_renyi_entropy():
    p = np.array([0.6, 0.4])
    chain = mj.JointChannelChain(x_size=2, z_size=1, matrix=iid_matrix(p))
    for theta in (0.4, -1.0):
        assert mj.h_up_tm(chain, theta) == pytest.approx(
            mj.renyi_entropy(p, theta), abs=1e-11
        )


def test_h_up_tm_singleton_quadratic(channel12, w12):
    theta = 0.25
    expected = math.log(dominant_root_2x2(w12.entries**0.75)) / theta
    assert mj.h_up_tm(channel12, theta) == pytest.approx(expected, rel=1e-11)


def test_two_param_tm_matches_up(channel_product):
    for theta in (-1.0, -0.3, 0.3, 0.7):
        assert mj.h_two_param_tm(channel_product, theta, theta) == pytest.approx(
            mj.h_up_tm(channel_product, theta), abs=1e-10
        )


def test_entropy_rate_w12(channel12):
    expected = (2.0 / 3.0) * binary_entropy(0.1) + (1.0 / 3.0) * binary_entropy(0.2)
    assert mj.entropy_rate_tm(channel12) == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(0.383523, abs=5e-7)


def test_entropy_rate_and_dispersion_iid_uniform():
    chain = mj.JointChannelChain(
        x_size=2, z_size=1, matrix=iid_matrix(np.array([0.5, 0.5]))
    )
    assert mj.entropy_rate_tm(chain) == pytest.approx(math.log(2), abs=1e-10)
    assert mj.dispersion_tm(chain) == pytest.approx(0.0, abs=1e-8)


def test_dispersion_iid_matches_variance():
    p = np.array([0.9, 0.1])
    chain = mj.JointChannelChain(x_size=2, z_size=1, matrix=iid_matrix(p))
    logp = np.log(p)
    variance = float(np.sum(p * logp**2) - np.sum(p * logp) ** 2)
    assert mj.dispersion_tm(chain) == pytest.approx(variance, rel=1e-6)


def test_dispersion_expansion_consistency(channel12):
    # (H_down(theta) - H) / theta -> V/2, Richardson over theta and theta/2
    spectra = ChainSpectra(channel12)
    rate = spectra.entropy_rate()
    v = spectra.dispersion()
    for theta in (1e-2, 1e-3):
        g = lambda t: (spectra.h_down(t) - rate) / t
        extrapolated = 2.0 * g(theta / 2.0) - g(theta)
        assert extrapolated == pytest.approx(v / 2.0, rel=1e-4)


def test_h_zero_full_support(channel12):
    assert mj.h_zero_tm(channel12, "down") == pytest.approx(math.log(2), abs=1e-11)
    assert mj.h_zero_tm(channel12, "up") == pytest.approx(math.log(2), abs=1e-11)


def test_h_zero_permutation_chain():
    chain = mj.JointChannelChain(
        x_size=2,
        z_size=1,
        matrix=mj.binary_chain(1.0, 1.0),
        initial=np.array([0.5, 0.5]),
    )
    assert mj.h_zero_tm(chain, "down") == pytest.approx(0.0, abs=1e-12)
    assert mj.h_zero_tm(chain, "up") == pytest.approx(0.0, abs=1e-12)


# -- correction terms ----------------------------------------------------------


def test_delta_zero_order(channel12):
    d = mj.delta_bounds(channel12, 0.0)
    assert d.lower == pytest.approx(0.0, abs=1e-12)
    assert d.upper == pytest.approx(0.0, abs=1e-12)


def test_delta_iid_collapses():
    p = np.array([0.8, 0.2])
    chain = mj.JointChannelChain(x_size=2, z_size=1, matrix=iid_matrix(p))
    for theta in (0.3, -0.7):
        d = mj.delta_bounds(chain, theta)
        assert d.upper == pytest.approx(d.lower, abs=1e-11)
        assert d.upper == pytest.approx(
            math.log(np.sum(p ** (1 - theta))), abs=1e-11
        )


def test_delta_explicit_eigenvector(channel12, w12):
    # independent 2x2 computation of v (transpose eigenvector, min entry 1)
    theta = 0.5
    tilted = w12.entries**0.5
    lam = dominant_root_2x2(tilted)
    t = tilted.T
    v = np.array([1.0, (lam - t[0, 0]) / t[0, 1]])
    v /= v.min()
    pi = mj.stationary_distribution(w12)
    w = pi ** (1 - theta)
    d = mj.delta_bounds(channel12, theta)
    assert d.upper == pytest.approx(math.log(v @ w), rel=1e-10)
    assert d.lower == pytest.approx(math.log(v @ w) - math.log(v.max()), rel=1e-10)


def test_correction_ordering(channel12, channel_product):
    for chain in (channel12, channel_product):
        for theta in THETA_GRID:
            for terms in (
                mj.delta_bounds(chain, theta),
                mj.xi_bounds(chain, theta),
                mj.zeta_bounds(chain, theta, -0.4),
            ):
                assert terms.lower <= terms.upper + 1e-12


def test_relabeling_invariance():
    matrix = random_chain_matrix(3, 11)
    perm = np.array([2, 0, 1])
    p = np.eye(3)[perm]
    permuted = mj.StochasticMatrix(p @ matrix.entries @ p.T)
    a = mj.JointChannelChain(x_size=3, z_size=1, matrix=matrix)
    b = mj.JointChannelChain(x_size=3, z_size=1, matrix=permuted)
    for theta in (0.4, -0.8):
        assert mj.h_down_tm(a, theta) == pytest.approx(
            mj.h_down_tm(b, theta), rel=1e-10
        )
        da, db = mj.delta_bounds(a, theta), mj.delta_bounds(b, theta)
        assert da.upper == pytest.approx(db.upper, abs=1e-9)
        assert da.lower == pytest.approx(db.lower, abs=1e-9)
    assert mj.entropy_rate_tm(a) == pytest.approx(mj.entropy_rate_tm(b), rel=1e-9)
