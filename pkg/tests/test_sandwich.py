"""Correction-term sandwiches checked against exact n-fold enumeration."""

import numpy as np
import pytest

import markov_jscc as mj

from conftest import SEED_2STATE, SEED_3STATE, iid_matrix, random_chain_matrix

THETAS = (0.3, -0.3, 0.7, -0.7)


def worst_margin(rows):
    return min(min(r.lower_margin, r.upper_margin) for r in rows)


def test_sandwich_w12(channel12):
    rows = mj.sandwich_check(channel12, THETAS, THETAS, n_max=6)
    assert rows and worst_margin(rows) >= -1e-9


@pytest.mark.parametrize("dim,seed", [(2, SEED_2STATE), (3, SEED_3STATE)])
def test_sandwich_random_chains(dim, seed):
    chain = mj.JointChannelChain(
        x_size=dim, z_size=1, matrix=random_chain_matrix(dim, seed)
    )
    rows = mj.sandwich_check(chain, THETAS, THETAS, n_max=6)
    assert rows and worst_margin(rows) >= -1e-9


def test_sandwich_strongly_non_hidden_product(channel_product):
    rows = mj.sandwich_check(channel_product, THETAS, THETAS, n_max=5)
    assert any(r.prop == 2 for r in rows) and any(r.prop == 3 for r in rows)
    assert worst_margin(rows) >= -1e-9


def test_sandwich_iid_chain_is_tight():
    chain = mj.JointChannelChain(
        x_size=2, z_size=1, matrix=iid_matrix(np.array([0.75, 0.25]))
    )
    rows = mj.sandwich_check(chain, THETAS, THETAS, n_max=4)
    for row in rows:
        assert row.lower_margin == pytest.approx(0.0, abs=1e-9)
        assert row.upper_margin == pytest.approx(0.0, abs=1e-9)


def test_sandwich_zero_order_is_exact(channel12):
    rows = mj.sandwich_check(channel12, (0.0,), (0.0,), n_max=3)
    for row in rows:
        assert row.lower_margin == pytest.approx(0.0, abs=1e-11)
        assert row.upper_margin == pytest.approx(0.0, abs=1e-11)


def test_sandwich_violation_raises(channel12, monkeypatch):
    # shrink the upper corrections so the check must trip
    original = mj.ChainSpectra.delta

    def squeezed(self, theta, initial=None):
        terms = original(self, theta, initial)
        return mj.CorrectionTerms(lower=terms.lower, upper=terms.lower - 0.5)

    monkeypatch.setattr(mj.ChainSpectra, "delta", squeezed)
    with pytest.raises(mj.SandwichViolationError) as info:
        mj.sandwich_check(channel12, (0.3,), (), n_max=2)
    assert info.value.prop == 1
    assert info.value.n == 2
    assert info.value.margin < -1e-9


def test_nfold_basics(channel12):
    one = mj.nfold_joint(channel12, 1)
    assert one.table == pytest.approx(channel12.initial)

    iid_chain = mj.JointChannelChain(
        x_size=2, z_size=1, matrix=iid_matrix(np.array([0.3, 0.7]))
    )
    three = mj.nfold_joint(iid_chain, 3)
    p = np.array([0.3, 0.7])
    expected = np.einsum("i,j,k->ijk", p, p, p).reshape(-1)
    assert three.table == pytest.approx(expected, abs=1e-15)


def test_nfold_marginals_match_matrix_powers(channel12):
    n = 4
    joint = mj.nfold_joint(channel12, n)
    table = joint.table.reshape((channel12.dim,) * n)
    w = channel12.matrix.entries
    pi = channel12.initial
    for step in range(n):
        axes = tuple(i for i in range(n) if i != step)
        marginal = table.sum(axis=axes)
        expected = np.linalg.matrix_power(w, step) @ pi
        assert marginal == pytest.approx(expected, abs=1e-12)
    assert joint.table.sum() == pytest.approx(1.0, abs=1e-10)


def test_nfold_too_large(channel12):
    with pytest.raises(mj.TooLargeError):
        mj.nfold_joint(channel12, 25)
