import math

import numpy as np
import pytest

import markov_jscc as mj
from markov_jscc.finite_bounds import _QueryContext
from markov_jscc.measures import ChainSpectra
from markov_jscc.tilted import TiltedFamily

from conftest import iid_matrix


@pytest.fixture(scope="module")
def ctx(source12, channel12):
    return _QueryContext(source12, channel12)


def query(source12, channel12, k, n):
    return mj.BoundQuery(source=source12, channel=channel12, k=k, n=n)


# -- ground truth at oracle scale ---------------------------------------------


def test_bounds_sandwich_exhaustive_truth(source12, channel12):
    # k = 2 source symbols over n = 3 channel uses: r = 0.5 is admissible
    p_m = mj.nfold_joint(source12, 2).table
    noise = mj.nfold_joint(channel12, 3).as_xz_matrix()
    table = mj.conditional_additive_table(noise, x_digits=3)
    log_truth = math.log(mj.exhaustive_min_error(p_m, table).min_error)

    q = query(source12, channel12, 2, 3)
    for direct in (mj.direct_bound_a1(q), mj.direct_bound_a2(q)):
        assert direct.log_prob_bound >= log_truth
    for converse in (mj.converse_bound_a1(q), mj.converse_bound_a2(q)):
        if not converse.vacuous:
            assert converse.log_prob_bound <= log_truth


def test_bounds_sandwich_exhaustive_truth_n4(source12, channel12):
    p_m = mj.nfold_joint(source12, 2).table
    noise = mj.nfold_joint(channel12, 4).as_xz_matrix()
    table = mj.conditional_additive_table(noise, x_digits=4)
    log_truth = math.log(mj.exhaustive_min_error(p_m, table).min_error)

    q = query(source12, channel12, 2, 4)
    assert mj.direct_bound_a2(q).log_prob_bound >= log_truth
    converse = mj.converse_bound_a2(q)
    if not converse.vacuous:
        assert converse.log_prob_bound <= log_truth


def test_direct_vacuous_at_full_rate():
    # noiseless channel, uniform iid source, k = n: zero margin
    source = mj.SourceChain(m_size=2, matrix=iid_matrix(np.array([0.5, 0.5])))
    channel = mj.JointChannelChain(
        x_size=2,
        z_size=1,
        matrix=mj.StochasticMatrix(np.eye(2)),
        initial=np.array([0.5, 0.5]),
    )
    q = mj.BoundQuery(source=source, channel=channel, k=4, n=4)
    result = mj.direct_bound_a1(q)
    assert result.vacuous
    assert result.log_prob_bound >= -1e-9


def test_direct_a2_zero_endpoint_feasible(source12, channel12):
    # s = 0 contributes xi(0) = 0, so the infimum is never above zero
    q = query(source12, channel12, 2, 3)
    assert mj.direct_bound_a2(q).log_prob_bound <= 1e-12


# -- ordering and structure on the reference family ---------------------------


def test_converse_dominates_direct(source12, channel12, ctx):
    n = 2000
    for k in (1300, 1450, 1600):
        q = query(source12, channel12, k, n)
        direct = mj.direct_bound_a2(q, _ctx=ctx)
        converse = mj.converse_bound_a2(q, _ctx=ctx)
        assert not direct.vacuous and not converse.vacuous
        # lower bound on log P below the upper bound
        assert converse.log_prob_bound <= direct.log_prob_bound


def test_direct_bound_nondecreasing_in_k(source12, channel12, ctx):
    n = 2000
    values = []
    for k in range(1200, 1601, 100):
        q = query(source12, channel12, k, n)
        result = mj.direct_bound_a2(q, _ctx=ctx)
        assert not result.vacuous
        values.append(result.log_prob_bound)
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))


def test_witness_reproduces_value_direct(source12, channel12, ctx):
    q = query(source12, channel12, 1500, 2000)
    result = mj.direct_bound_a2(q, _ctx=ctx)
    s = result.witness["s"]
    src = ChainSpectra(source12)
    ch = ChainSpectra(channel12)
    fam = TiltedFamily(source12, channel12, q.rate_ratio, "up")
    corr = src.xi(s).upper + ch.xi(s).upper
    replayed = (-q.n * s * q.rate + (q.n - 1) * fam.value(s) + corr) / (1.0 - s)
    assert replayed == pytest.approx(result.log_prob_bound, abs=1e-9)


def test_witness_reproduces_value_converse(source12, channel12, ctx):
    q = query(source12, channel12, 1500, 2000)
    result = mj.converse_bound_a2(q, _ctx=ctx)
    again = mj.converse_bound_a2(q)
    assert again.log_prob_bound == pytest.approx(result.log_prob_bound, abs=1e-9)
    assert again.witness == result.witness


def test_rate_out_of_range(source12, channel12):
    # k = n pushes r = 1: rate floor 2H = 0.767 exceeds log 2
    q = query(source12, channel12, 2000, 2000)
    with pytest.raises(mj.RateOutOfRangeError):
        mj.converse_bound_a2(q)


def test_converse_vacuous_at_tiny_n(source12, channel12):
    # admissible rate but far too short a block for the log argument
    q = query(source12, channel12, 2, 3)
    result = mj.converse_bound_a1(q)
    assert result.vacuous or result.log_prob_bound < 0


# -- curves ---------------------------------------------------------------------


def test_bound_curve_shape(source12, channel12):
    curve = mj.bound_curve(
        source12, channel12, 2000, 1300, 1500, 100, ("direct_a2", "converse_a2")
    )
    assert len(curve.rows) == 6
    ks = [row.k for row in curve.rows]
    assert ks == [1300, 1300, 1400, 1400, 1500, 1500]
    assert all(row.error is None for row in curve.rows)


def test_bound_curve_empty_kinds(source12, channel12):
    curve = mj.bound_curve(source12, channel12, 2000, 1300, 1500, 100, ())
    assert curve.rows == ()


def test_bound_curve_flags_inadmissible_rows(source12, channel12):
    curve = mj.bound_curve(
        source12, channel12, 100, 80, 95, 15, ("converse_a2",)
    )
    flagged = [row for row in curve.rows if row.error is not None]
    assert flagged  # r above the admissible ceiling is reported, not dropped
    for row in flagged:
        assert row.vacuous and row.log_prob_bound is None
        assert row.error == "RateOutOfRangeError"


def test_bound_curve_over_n(source12, channel12):
    curve = mj.bound_curve_over_n(
        source12, channel12, (1000, 2000), 0.75, ("direct_a2",)
    )
    assert [row.n for row in curve.rows] == [1000, 2000]
    assert [row.k for row in curve.rows] == [750, 1500]
    values = [-row.log_prob_bound / row.n for row in curve.rows]
    assert values[1] > values[0]  # approaching the exponent from below


def test_query_validation(source12, channel12):
    with pytest.raises(ValueError):
        mj.BoundQuery(source=source12, channel=channel12, k=1, n=5)
    with pytest.raises(ValueError):
        mj.BoundQuery(source=source12, channel=channel12, k=3, n=1)
