"""Finite-alphabet nonnegative-matrix machinery.

Transition matrices are stored column-stochastically: ``entries[to, from]``
is the probability of moving from column state to row state, so the printed
form of the binary family ``W(p, q) = [[1-p, q], [p, 1-q]]`` is used as-is.

Chains over a product alphabet X x Z flatten the pair (x, z) to the state
index ``x * z_size + z``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AssumptionViolatedError,
    NonConvergenceError,
    PeriodicChainError,
    ReducibleMatrixError,
)

COLUMN_SUM_TOL = 1e-12
ASSUMPTION_TOL = 1e-10
PERRON_RESIDUAL_TOL = 1e-12
PERRON_ITERATION_CAP = 10**6

# Grid standing in for "all theta < 0" in the strongly-non-hidden check;
# the condition is an algebraic identity in the entries, so a handful of
# generic points catches violations.
DEFAULT_ASSUMPTION2_GRID = (-0.05, -0.5, -1.0, -2.0, -5.0, -10.0)


def _as_square_array(matrix) -> np.ndarray:
    a = np.asarray(getattr(matrix, "entries", matrix), dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def _support_closure(support: np.ndarray) -> np.ndarray:
    """Boolean reachability closure of a support pattern (>= 1 step allowed)."""
    dim = support.shape[0]
    reach = support | np.eye(dim, dtype=bool)
    steps = 1
    while steps < dim:
        reach = reach @ reach
        steps *= 2
    return reach


def is_irreducible(matrix) -> bool:
    """True when the support graph of the matrix is strongly connected."""
    support = _as_square_array(matrix) > 0
    return bool(_support_closure(support).all())


def is_aperiodic(matrix) -> bool:
    """Primitivity test for an irreducible support pattern (Wielandt bound)."""
    support = _as_square_array(matrix) > 0
    dim = support.shape[0]
    power = support
    for _ in range((dim - 1) ** 2 + 1):
        if power.all():
            return True
        power = power @ support
    return bool(power.all())


def _is_uniform_diagonal(a: np.ndarray) -> bool:
    """True for c*I with c > 0: reducible, but admitted by the eigensolver
    because every positive vector is a Perron vector (identity noise chain)."""
    if np.any(a[~np.eye(a.shape[0], dtype=bool)] != 0.0):
        return False
    diag = np.diag(a)
    return bool(diag[0] > 0 and np.all(diag == diag[0]))


@dataclass(frozen=True)
class StochasticMatrix:
    """Column-stochastic nonnegative square matrix over a finite alphabet."""

    entries: np.ndarray

    def __post_init__(self):
        a = _as_square_array(self.entries)
        if a.shape[0] < 1:
            raise ValueError("dimension must be at least 1")
        if np.any(a < 0):
            raise ValueError("entries must be nonnegative")
        colsums = a.sum(axis=0)
        bad = np.abs(colsums - 1.0) > COLUMN_SUM_TOL
        if np.any(bad):
            j = int(np.argmax(bad))
            raise ValueError(
                f"column {j} sums to {colsums[j]!r}, not 1 within {COLUMN_SUM_TOL}"
            )
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def binary_chain(p: float, q: float) -> StochasticMatrix:
    """The two-state family W(p, q) = [[1-p, q], [p, 1-q]]."""
    return StochasticMatrix(np.array([[1.0 - p, q], [p, 1.0 - q]]))


@dataclass(frozen=True)
class PerronResult:
    """Dominant eigenpair, right vector normalized to minimum entry 1."""

    eigenvalue: float
    right_vector: np.ndarray
    residual: float


def _dominant_eigenpair(a: np.ndarray, cap: int = PERRON_ITERATION_CAP):
    """Power method for the dominant eigenpair of a nonnegative matrix.

    A diagonal shift makes the iteration matrix primitive, and repeated
    squaring of the normalized shifted matrix reaches the rank-one limit in
    ~40 doublings; a short polishing loop then drives the residual of the
    original matrix to near machine precision.
    """
    dim = a.shape[0]
    if dim == 1:
        return float(a[0, 0]), np.ones(1), 0.0
    if _is_uniform_diagonal(a):
        return float(a[0, 0]), np.ones(dim), 0.0

    shift = float(a.max())
    shifted = a + shift * np.eye(dim)
    m = shifted / shifted.max()
    for _ in range(60):
        m = m @ m
        peak = m.max()
        if not np.isfinite(peak) or peak <= 0.0:
            raise NonConvergenceError("power squaring degenerated")
        m /= peak

    v = m @ np.ones(dim)
    v /= v.max()
    lam = 0.0
    residual = np.inf
    iterations = 0
    while iterations < cap:
        w = shifted @ v
        lam = float(v @ w / (v @ v))
        residual = float(np.max(np.abs(w - lam * v)))
        if residual <= 2e-14 * lam:
            break
        peak = w.max()
        if peak <= 0.0:
            raise NonConvergenceError("iteration vector collapsed")
        v = w / peak
        iterations += 1

    eigenvalue = lam - shift
    if eigenvalue <= 0.0:
        raise NonConvergenceError("dominant eigenvalue did not come out positive")
    if residual > PERRON_RESIDUAL_TOL * lam:
        raise NonConvergenceError(
            f"residual {residual:.3e} above {PERRON_RESIDUAL_TOL:.0e} x eigenvalue"
        )
    return eigenvalue, v, residual


def perron_eigenpair(matrix, transposed: bool = False) -> PerronResult:
    """Perron-Frobenius eigenpair of a nonnegative irreducible matrix.

    With ``transposed=True`` the right eigenvector of the transpose is
    returned (the vector v with min-entry 1 used by the correction terms).
    Scalar multiples of the identity are admitted despite being reducible:
    every positive vector is then a Perron vector and ones is the canonical
    choice.
    """
    a = _as_square_array(matrix)
    if np.any(a < 0):
        raise ValueError("matrix must be nonnegative")
    if not (is_irreducible(a) or _is_uniform_diagonal(a)):
        raise ReducibleMatrixError("support graph is not strongly connected")
    eigenvalue, v, residual = _dominant_eigenpair(a.T if transposed else a)
    vmin = v.min()
    if not vmin > 0:
        raise NonConvergenceError("eigenvector has nonpositive entries")
    return PerronResult(eigenvalue=eigenvalue, right_vector=v / vmin, residual=residual)


def perron_log_eigenpair(log_entries: np.ndarray, transposed: bool = False):
    """(log eigenvalue, min-normalized vector) from a matrix given in logs.

    Entries may be ``-inf`` (structural zeros). The max-entry factoring keeps
    the linear-space solve well scaled even when the raw entries would
    overflow, as the up-type tilted matrices do near theta = 1.
    """
    log_entries = np.asarray(log_entries, dtype=float)
    peak = log_entries.max()
    if not np.isfinite(peak):
        raise ValueError("log-matrix has no finite entries")
    with np.errstate(under="ignore"):
        a = np.exp(log_entries - peak)
    eigenvalue, v, _ = _dominant_eigenpair(a.T if transposed else a)
    vmin = v.min()
    if not vmin > 0:
        raise NonConvergenceError("eigenvector has nonpositive entries")
    return peak + np.log(eigenvalue), v / vmin


def stationary_distribution(matrix) -> np.ndarray:
    """Stationary distribution of an irreducible aperiodic column-stochastic
    matrix, satisfying W pi = pi with all entries positive."""
    a = _as_square_array(matrix)
    if not is_irreducible(a):
        raise ReducibleMatrixError("chain is reducible; no unique stationary law")
    if not is_aperiodic(a):
        raise PeriodicChainError("chain is periodic")
    result = perron_eigenpair(a, transposed=False)
    pi = result.right_vector / result.right_vector.sum()
    residual = np.max(np.abs(a @ pi - pi))
    if residual > COLUMN_SUM_TOL:
        raise NonConvergenceError(f"stationary fixed-point residual {residual:.3e}")
    return pi


def _validate_initial(initial, dim: int) -> np.ndarray:
    p = np.asarray(initial, dtype=float)
    if p.shape != (dim,):
        raise ValueError(f"initial distribution must have length {dim}")
    if np.any(p < 0) or abs(p.sum() - 1.0) > COLUMN_SUM_TOL:
        raise ValueError("initial distribution must be nonnegative and sum to 1")
    return p


def _check_chain_support(a: np.ndarray):
    if not (is_irreducible(a) or _is_uniform_diagonal(a)):
        raise ReducibleMatrixError("chain support is not strongly connected")


@dataclass(frozen=True)
class JointChannelChain:
    """Markovian noise process on X x Z driving a conditional additive channel.

    X is the cyclic group Z/|X|Z (the additive coordinate) and Z the side
    information seen by the receiver. ``initial`` is the law of the first
    (X, Z) pair; when omitted it defaults to the stationary distribution.
    Irreducible periodic chains and identity-like chains are accepted, but
    then an explicit initial distribution is required.
    """

    x_size: int
    z_size: int
    matrix: StochasticMatrix
    initial: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.x_size < 1 or self.z_size < 1:
            raise ValueError("alphabet sizes must be positive")
        if self.matrix.dim != self.x_size * self.z_size:
            raise ValueError(
                f"matrix dimension {self.matrix.dim} != x_size*z_size "
                f"{self.x_size * self.z_size}"
            )
        _check_chain_support(self.matrix.entries)
        initial = self.initial
        if initial is None:
            initial = stationary_distribution(self.matrix)
        initial = _validate_initial(initial, self.matrix.dim)
        initial = initial.copy()
        initial.setflags(write=False)
        object.__setattr__(self, "initial", initial)

    @property
    def dim(self) -> int:
        return self.matrix.dim

    @property
    def singleton(self) -> bool:
        return self.z_size == 1

    def state_index(self, x: int, z: int) -> int:
        return x * self.z_size + z

    def split_view(self) -> np.ndarray:
        """Entries reshaped to [x, z, x_from, z_from]."""
        x, z = self.x_size, self.z_size
        return self.matrix.entries.reshape(x, z, x, z)


@dataclass(frozen=True)
class SourceChain:
    """Markovian message source on a finite alphabet M."""

    m_size: int
    matrix: StochasticMatrix
    initial: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.m_size != self.matrix.dim:
            raise ValueError("m_size must match the matrix dimension")
        _check_chain_support(self.matrix.entries)
        initial = self.initial
        if initial is None:
            initial = stationary_distribution(self.matrix)
        initial = _validate_initial(initial, self.matrix.dim)
        initial = initial.copy()
        initial.setflags(write=False)
        object.__setattr__(self, "initial", initial)

    def as_joint(self) -> JointChannelChain:
        """View the source as a singleton-Z chain so that all spectral
        information measures share one code path."""
        return JointChannelChain(
            x_size=self.m_size, z_size=1, matrix=self.matrix, initial=self.initial
        )


@dataclass(frozen=True)
class Assumption1Result:
    holds: bool
    marginal: np.ndarray | None  # W_Y[z, z'] when the chain is non-hidden


def check_assumption1(chain: JointChannelChain) -> Assumption1Result:
    """Non-hidden check: the x-column sums must not depend on the previous
    x-coordinate, which makes Z itself Markovian with marginal W_Y."""
    view = chain.split_view()
    colsum = view.sum(axis=0)  # [z, x_from, z_from]
    spread = colsum.max(axis=1) - colsum.min(axis=1)
    if spread.max() > ASSUMPTION_TOL:
        return Assumption1Result(False, None)
    return Assumption1Result(True, colsum.mean(axis=1))


def tilted_marginal(chain: JointChannelChain, theta: float) -> np.ndarray:
    """The matrix W_theta[z, z'] = sum_x W(x, z | x', z')^(1-theta).

    Defined only for strongly non-hidden chains, where the sum does not
    depend on x'.
    """
    if chain.singleton:
        raise AssumptionViolatedError(
            "tilted marginal is undefined for singleton-Z chains"
        )
    view = chain.split_view()
    tilted = (view ** (1.0 - theta)).sum(axis=0)  # [z, x_from, z_from]
    spread = tilted.max(axis=1) - tilted.min(axis=1)
    if spread.max() > ASSUMPTION_TOL:
        raise AssumptionViolatedError(
            f"tilted column sums depend on x' at theta={theta}"
        )
    return tilted.mean(axis=1)


def check_assumption2(
    chain: JointChannelChain, theta_grid=DEFAULT_ASSUMPTION2_GRID
) -> bool:
    """Strongly-non-hidden check on a grid of negative tilting orders.

    Singleton-Z chains satisfy the assumption by definition; otherwise the
    non-hidden condition must hold together with x'-independence of the
    tilted column sums at every grid point.
    """
    if chain.singleton:
        return True
    if not check_assumption1(chain).holds:
        return False
    try:
        for theta in theta_grid:
            tilted_marginal(chain, theta)
    except AssumptionViolatedError:
        return False
    return True
