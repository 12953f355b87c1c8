"""Conditional Renyi entropies and finite-length correction terms.

Two layers live here. The single-shot layer works on explicit probability
tables and is deliberately naive (direct summation): it doubles as the
independent oracle for the spectral layer. The transition-matrix layer
expresses every order-(1-theta) entropy as the log of a Perron-Frobenius
eigenvalue of a tilted matrix, with dedicated limit paths at theta = 0
(entropy rate / dispersion) and theta = 1 (order-zero entropies).

All logarithms are natural.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AssumptionViolatedError, DomainError
from .markov import (
    JointChannelChain,
    SourceChain,
    check_assumption1,
    perron_log_eigenpair,
    tilted_marginal,
)

# Derivative steps for the log-eigenvalue curves. One Richardson level is
# applied on top of central differences; steps are sized so that truncation
# and eigensolver rounding stay balanced near 1e-10.
D1_STEP = 1e-4
D2_STEP = 1e-3


def _central_d1(f, x: float, h: float) -> float:
    d = lambda hh: (f(x + hh) - f(x - hh)) / (2.0 * hh)
    return (4.0 * d(h / 2.0) - d(h)) / 3.0


def _central_d2(f, x: float, h: float) -> float:
    fx = f(x)
    d = lambda hh: (f(x + hh) - 2.0 * fx + f(x - hh)) / (hh * hh)
    return (4.0 * d(h / 2.0) - d(h)) / 3.0


def _check_order(theta: float):
    if not theta < 1.0:
        raise DomainError(f"order parameter must satisfy theta < 1, got {theta}")


def _logsumexp(values: np.ndarray) -> float:
    peak = values.max()
    if not np.isfinite(peak):
        return float(peak)
    return float(peak + np.log(np.exp(values - peak).sum()))


# ---------------------------------------------------------------------------
# single-shot measures on explicit tables
# ---------------------------------------------------------------------------


def renyi_entropy(p, theta: float) -> float:
    """H_{1-theta}(P) = (1/theta) log sum P^(1-theta); Shannon at theta = 0."""
    _check_order(theta)
    p = np.asarray(p, dtype=float)
    mask = p > 0
    if theta == 0.0:
        return float(-(p[mask] * np.log(p[mask])).sum())
    return float(np.log((p[mask] ** (1.0 - theta)).sum()) / theta)


def conditional_renyi(p_xy, q_y, theta: float) -> float:
    """H_{1-theta}(P_XY | Q_Y) by direct summation over the table.

    At theta = 0 the limit value H(X|Y) - D(P_Y || Q_Y) is returned.
    """
    _check_order(theta)
    p = np.asarray(p_xy, dtype=float)
    q = np.asarray(q_y, dtype=float)
    mask = p > 0
    qb = np.broadcast_to(q[None, :], p.shape)[mask]
    pv = p[mask]
    if np.any(qb <= 0):
        raise DomainError("reference distribution vanishes on the support of P_Y")
    if theta == 0.0:
        return float((pv * (np.log(qb) - np.log(pv))).sum())
    return _logsumexp((1.0 - theta) * np.log(pv) + theta * np.log(qb)) / theta


def tilted_y_marginal(p_xy, theta: float) -> np.ndarray:
    """The reference law P_Y^(1-theta): normalized (1-theta)-norms of the
    columns P_XY(., y)."""
    _check_order(theta)
    p = np.asarray(p_xy, dtype=float)
    with np.errstate(divide="ignore"):
        logcol = np.where(p > 0, np.log(np.where(p > 0, p, 1.0)), -np.inf)
    lognorm = np.array(
        [_logsumexp((1.0 - theta) * logcol[:, y]) / (1.0 - theta) for y in range(p.shape[1])]
    )
    log_total = _logsumexp(lognorm)
    return np.exp(lognorm - log_total)


def h_down_shot(p_xy, theta: float) -> float:
    p = np.asarray(p_xy, dtype=float)
    return conditional_renyi(p, p.sum(axis=0), theta)


def h_up_shot(p_xy, theta: float) -> float:
    if theta == 0.0:
        return h_down_shot(p_xy, 0.0)
    return conditional_renyi(p_xy, tilted_y_marginal(p_xy, theta), theta)


def h_two_param_shot(p_xy, theta: float, theta_prime: float) -> float:
    _check_order(theta_prime)
    return conditional_renyi(p_xy, tilted_y_marginal(p_xy, theta_prime), theta)


def renyi_divergence(p, q, s: float) -> float:
    """D_{1+s}(P || Q) = (1/s) log sum P^(1+s) Q^(-s) for s != 0."""
    if s == 0.0:
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        mask = p > 0
        return float((p[mask] * (np.log(p[mask]) - np.log(q[mask]))).sum())
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    if np.any(q[mask] <= 0):
        return np.inf
    return _logsumexp((1.0 + s) * np.log(p[mask]) - s * np.log(q[mask])) / s


def mutual_info_up(p_x, w_yx, s: float) -> float:
    """Gallager-style order-(1-s) mutual information I^up of a channel
    w_yx[y, x] driven by the input law p_x."""
    if s == 0.0:
        raise DomainError("mutual_info_up needs s != 0")
    p_x = np.asarray(p_x, dtype=float)
    w = np.asarray(w_yx, dtype=float)
    inner = (p_x[None, :] * np.where(w > 0, w, 0.0) ** (1.0 - s)).sum(axis=1)
    total = (inner ** (1.0 / (1.0 - s))).sum()
    return float(-(1.0 - s) / s * np.log(total))


# ---------------------------------------------------------------------------
# transition-matrix measures
# ---------------------------------------------------------------------------


def _as_joint(chain) -> JointChannelChain:
    if isinstance(chain, SourceChain):
        return chain.as_joint()
    return chain


@dataclass(frozen=True)
class CorrectionTerms:
    """Two-sided O(1) constants sandwiching an n-fold entropy."""

    lower: float
    upper: float


class ChainSpectra:
    """Memoized tilted eigen-solutions and correction terms of one chain.

    Instances cache by tilting order; the caches are plain dicts, so share
    an instance only within one worker.
    """

    def __init__(self, chain):
        self.chain = _as_joint(chain)
        w = self.chain.matrix.entries
        self._support = w > 0
        with np.errstate(divide="ignore"):
            self._logw = np.where(self._support, np.log(np.where(self._support, w, 1.0)), -np.inf)
        self._marginal = None  # W_Y, built lazily for non-singleton chains
        self._down_cache: dict = {}
        self._up_cache: dict = {}
        self._nu_cache: dict = {}
        self._tilted_marginal_cache: dict = {}

    # -- tilted building blocks ---------------------------------------------

    def _y_marginal_log(self) -> np.ndarray:
        if self._marginal is None:
            result = check_assumption1(self.chain)
            if not result.holds:
                raise AssumptionViolatedError("chain is not non-hidden (Assumption 1)")
            with np.errstate(divide="ignore"):
                self._marginal = np.where(
                    result.marginal > 0,
                    np.log(np.where(result.marginal > 0, result.marginal, 1.0)),
                    -np.inf,
                )
        return self._marginal

    def _log_tilted_marginal(self, theta: float) -> np.ndarray:
        """log W_theta[z, z'] for strongly non-hidden chains (log 0 = -inf)."""
        cached = self._tilted_marginal_cache.get(theta)
        if cached is None:
            wt = tilted_marginal(self.chain, theta)
            with np.errstate(divide="ignore"):
                cached = np.where(wt > 0, np.log(np.where(wt > 0, wt, 1.0)), -np.inf)
            self._tilted_marginal_cache[theta] = cached
        return cached

    def down_pair(self, theta: float):
        """(log lambda_theta, v_theta) of the down-tilted joint matrix
        W^(1-theta) W_Y^theta, v taken from the transpose and min-normalized."""
        cached = self._down_cache.get(theta)
        if cached is None:
            logm = (1.0 - theta) * self._logw
            if not self.chain.singleton:
                x, z = self.chain.x_size, self.chain.z_size
                logwy = self._y_marginal_log()
                add = np.broadcast_to(logwy[None, :, None, :], (x, z, x, z))
                logm = logm + theta * add.reshape(logm.shape)
                logm = np.where(self._support, logm, -np.inf)
            cached = perron_log_eigenpair(logm, transposed=True)
            self._down_cache[theta] = cached
        return cached

    def up_pair(self, theta: float):
        """(log kappa_theta, v_theta) of the K matrix for non-hidden chains."""
        cached = self._up_cache.get(theta)
        if cached is None:
            logk = self._log_tilted_marginal(theta) / (1.0 - theta)
            cached = perron_log_eigenpair(logk, transposed=True)
            self._up_cache[theta] = cached
        return cached

    def nu_pair(self, theta: float, theta_prime: float):
        """(log nu, v) of N_{theta, theta'} = W_theta * W_theta'^(theta/(1-theta'))."""
        key = (theta, theta_prime)
        cached = self._nu_cache.get(key)
        if cached is None:
            la = self._log_tilted_marginal(theta)
            lb = self._log_tilted_marginal(theta_prime)
            logn = np.where(np.isfinite(la), la + (theta / (1.0 - theta_prime)) * lb, -np.inf)
            cached = perron_log_eigenpair(logn, transposed=True)
            self._nu_cache[key] = cached
        return cached

    # -- entropies ------------------------------------------------------------

    def log_lambda_down(self, theta: float) -> float:
        return self.down_pair(theta)[0]

    def h_down(self, theta: float) -> float:
        _check_order(theta)
        if theta == 0.0:
            return self.entropy_rate()
        return self.log_lambda_down(theta) / theta

    def theta_h_up(self, theta: float) -> float:
        """theta * H^{W,up}_{1-theta}, smooth through theta = 0."""
        _check_order(theta)
        if self.chain.singleton:
            return self.log_lambda_down(theta)
        return (1.0 - theta) * self.up_pair(theta)[0]

    def h_up(self, theta: float) -> float:
        _check_order(theta)
        if theta == 0.0:
            return self.entropy_rate()
        return self.theta_h_up(theta) / theta

    def theta_h_two_param(self, theta: float, theta_prime: float) -> float:
        """theta * H^W_{1-theta, 1-theta'}, smooth through theta = 0."""
        _check_order(theta)
        _check_order(theta_prime)
        if self.chain.singleton:
            return self.log_lambda_down(theta)
        lognu = self.nu_pair(theta, theta_prime)[0]
        return lognu - theta * (theta_prime / (1.0 - theta_prime)) * self.h_up(theta_prime)

    def h_two_param(self, theta: float, theta_prime: float) -> float:
        if theta == 0.0:
            if self.chain.singleton:
                return self.entropy_rate()
            d = _central_d1(lambda t: self.nu_pair(t, theta_prime)[0], 0.0, D1_STEP)
            return d - (theta_prime / (1.0 - theta_prime)) * self.h_up(theta_prime)
        return self.theta_h_two_param(theta, theta_prime) / theta

    def entropy_rate(self) -> float:
        return _central_d1(self.log_lambda_down, 0.0, D1_STEP)

    def dispersion(self) -> float:
        return _central_d2(self.log_lambda_down, 0.0, D2_STEP)

    def h_zero_down(self) -> float:
        """theta -> 1 limit of H^{W,down}: log Perron eigenvalue of the
        support pattern times the Y-marginal."""
        logm = np.where(self._support, 0.0, -np.inf)
        if not self.chain.singleton:
            x, z = self.chain.x_size, self.chain.z_size
            add = np.broadcast_to(self._y_marginal_log()[None, :, None, :], (x, z, x, z))
            logm = np.where(self._support, add.reshape(logm.shape), -np.inf)
        return perron_log_eigenpair(logm, transposed=True)[0]

    def h_zero_up(self) -> float:
        """theta -> 1 limit of H^{W,up}: log Perron eigenvalue of the
        per-column x-support counts (K-matrix limit)."""
        if self.chain.singleton:
            logm = np.where(self._support, 0.0, -np.inf)
            return perron_log_eigenpair(logm, transposed=True)[0]
        view = self.chain.split_view() > 0
        counts = view.sum(axis=0).astype(float)  # [z, x', z']
        spread = counts.max(axis=1) - counts.min(axis=1)
        if spread.max() > 0:
            raise AssumptionViolatedError("support counts depend on x'")
        counts = counts.mean(axis=1)
        with np.errstate(divide="ignore"):
            logm = np.where(counts > 0, np.log(np.where(counts > 0, counts, 1.0)), -np.inf)
        return perron_log_eigenpair(logm, transposed=True)[0]

    # -- correction terms ------------------------------------------------------

    def _initial(self, initial) -> np.ndarray:
        if initial is None:
            return self.chain.initial
        p = np.asarray(initial, dtype=float)
        if p.shape != (self.chain.dim,):
            raise ValueError("initial distribution has the wrong length")
        return p

    def _log_w_down(self, theta: float, initial) -> np.ndarray:
        """log w_theta(x, z) = (1-theta) log P(x, z) + theta log P_Z(z)."""
        p = self._initial(initial)
        with np.errstate(divide="ignore"):
            logp = np.where(p > 0, np.log(np.where(p > 0, p, 1.0)), -np.inf)
        if self.chain.singleton:
            return (1.0 - theta) * logp
        pz = p.reshape(self.chain.x_size, self.chain.z_size).sum(axis=0)
        with np.errstate(divide="ignore"):
            logpz = np.where(pz > 0, np.log(np.where(pz > 0, pz, 1.0)), -np.inf)
        add = np.broadcast_to(
            logpz[None, :], (self.chain.x_size, self.chain.z_size)
        ).reshape(-1)
        return np.where(np.isfinite(logp), (1.0 - theta) * logp + theta * add, -np.inf)

    def _log_col_tilt(self, theta: float, initial) -> np.ndarray:
        """log sum_x P(x, z)^(1-theta) per side state z."""
        p = self._initial(initial).reshape(self.chain.x_size, self.chain.z_size)
        with np.errstate(divide="ignore"):
            logp = np.where(p > 0, np.log(np.where(p > 0, p, 1.0)), -np.inf)
        return np.array(
            [_logsumexp((1.0 - theta) * logp[:, z]) for z in range(self.chain.z_size)]
        )

    @staticmethod
    def _pair_terms(v: np.ndarray, logw: np.ndarray) -> tuple[float, float]:
        """(log(v . w), log max v) with w supplied in logs."""
        return _logsumexp(np.log(v) + logw), float(np.log(v.max()))

    def delta(self, theta: float, initial=None) -> CorrectionTerms:
        _check_order(theta)
        _, v = self.down_pair(theta)
        logdot, logmax = self._pair_terms(v, self._log_w_down(theta, initial))
        return CorrectionTerms(lower=logdot - logmax, upper=logdot)

    def xi(self, theta: float, initial=None) -> CorrectionTerms:
        """Correction pair for the up-type sandwich.

        In the singleton branch the paper's displayed pair must be divided
        by (1-theta): the sandwiched quantity theta/(1-theta) H_{1-theta}(X^n)
        equals log(1^T W_theta^{n-1} w_theta)/(1-theta), so the O(1) error of
        the eigen approximation carries the same factor. The n-fold
        enumeration oracle confirms the factored form and rejects the
        unfactored one.
        """
        _check_order(theta)
        if self.chain.singleton:
            d = self.delta(theta, initial)
            return CorrectionTerms(
                lower=d.lower / (1.0 - theta), upper=d.upper / (1.0 - theta)
            )
        _, v = self.up_pair(theta)
        logw = self._log_col_tilt(theta, initial) / (1.0 - theta)
        logdot, logmax = self._pair_terms(v, logw)
        return CorrectionTerms(lower=logdot - logmax, upper=logdot)

    def zeta(self, theta: float, theta_prime: float, initial=None) -> CorrectionTerms:
        _check_order(theta)
        _check_order(theta_prime)
        if self.chain.singleton:
            return self.delta(theta, initial)
        _, v = self.nu_pair(theta, theta_prime)
        logw = self._log_col_tilt(theta, initial) + (
            theta / (1.0 - theta_prime)
        ) * self._log_col_tilt(theta_prime, initial)
        logdot, logmax = self._pair_terms(v, logw)
        xi_p = self.xi(theta_prime, initial)
        if theta < 0.0:
            return CorrectionTerms(
                lower=logdot - logmax - theta * xi_p.lower,
                upper=logdot - theta * xi_p.upper,
            )
        return CorrectionTerms(
            lower=logdot - logmax - theta * xi_p.upper,
            upper=logdot - theta * xi_p.lower,
        )


# Functional wrappers: each builds a transient spectra object, so repeated
# calls re-solve. Performance-sensitive callers hold a ChainSpectra.


def h_down_tm(chain, theta: float) -> float:
    return ChainSpectra(chain).h_down(theta)


def h_up_tm(chain, theta: float) -> float:
    return ChainSpectra(chain).h_up(theta)


def h_two_param_tm(chain, theta: float, theta_prime: float) -> float:
    return ChainSpectra(chain).h_two_param(theta, theta_prime)


def entropy_rate_tm(chain) -> float:
    return ChainSpectra(chain).entropy_rate()


def dispersion_tm(chain) -> float:
    return ChainSpectra(chain).dispersion()


def h_zero_tm(chain, variant: str = "down") -> float:
    spectra = ChainSpectra(chain)
    if variant == "down":
        return spectra.h_zero_down()
    if variant == "up":
        return spectra.h_zero_up()
    raise ValueError(f"unknown variant {variant!r}")


def delta_bounds(chain, theta: float, initial=None) -> CorrectionTerms:
    return ChainSpectra(chain).delta(theta, initial)


def xi_bounds(chain, theta: float, initial=None) -> CorrectionTerms:
    return ChainSpectra(chain).xi(theta, initial)


def zeta_bounds(chain, theta: float, theta_prime: float, initial=None) -> CorrectionTerms:
    return ChainSpectra(chain).zeta(theta, theta_prime, initial)
