import math

import numpy as np
import pytest

import markov_jscc as mj

# Seeds for the randomly generated acceptance chains; recorded here so the
# suite is fully reproducible.
SEED_2STATE = 20250810
SEED_3STATE = 20250811


def random_chain_matrix(dim: int, seed: int) -> mj.StochasticMatrix:
    """Strictly positive column-stochastic matrix (irreducible, aperiodic)."""
    rng = np.random.default_rng(seed)
    m = rng.uniform(0.05, 1.0, size=(dim, dim))
    m /= m.sum(axis=0)
    return mj.StochasticMatrix(m)


def iid_matrix(p) -> mj.StochasticMatrix:
    p = np.asarray(p, dtype=float)
    return mj.StochasticMatrix(np.column_stack([p] * p.size))


def dominant_root_2x2(m: np.ndarray) -> float:
    """Closed-form largest eigenvalue of a 2x2 matrix."""
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return (tr + math.sqrt(tr * tr - 4.0 * det)) / 2.0


def dominant_root_poly(m: np.ndarray) -> float:
    """Largest real root of the characteristic polynomial (dims <= 4)."""
    roots = np.roots(np.poly(m))
    real = roots[np.abs(roots.imag) < 1e-9].real
    return float(real.max())


def product_channel(wx: np.ndarray, wz: np.ndarray) -> mj.JointChannelChain:
    """X x Z chain W(x,z|x',z') = W_X(x|x') W_Z(z|z'); strongly non-hidden
    when W_X has column-permutation symmetry."""
    prod = np.einsum("xa,zb->xzab", wx, wz).reshape(
        wx.shape[0] * wz.shape[0], wx.shape[0] * wz.shape[0]
    )
    return mj.JointChannelChain(
        x_size=wx.shape[0], z_size=wz.shape[0], matrix=mj.StochasticMatrix(prod)
    )


@pytest.fixture(scope="session")
def w12():
    return mj.binary_chain(0.1, 0.2)


@pytest.fixture(scope="session")
def source12(w12):
    return mj.SourceChain(m_size=2, matrix=w12)


@pytest.fixture(scope="session")
def channel12(w12):
    return mj.JointChannelChain(x_size=2, z_size=1, matrix=w12)


@pytest.fixture(scope="session")
def channel_product():
    return product_channel(
        mj.binary_chain(0.15, 0.15).entries, mj.binary_chain(0.1, 0.3).entries
    )
