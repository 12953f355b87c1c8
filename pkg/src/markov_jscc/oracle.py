"""Independent brute-force verification at small scale.

Nothing here touches the spectral machinery except to read the values under
test: path distributions are enumerated exactly, single-shot bounds are
evaluated by direct summation, and the true minimum error probability is
found by trying every encoder with exact MAP decoding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SandwichViolationError, TooLargeError
from .markov import JointChannelChain, SourceChain, check_assumption2
from .measures import (
    ChainSpectra,
    conditional_renyi,
    h_down_shot,
    h_two_param_shot,
    h_up_shot,
    mutual_info_up,
    renyi_entropy,
)

ORACLE_SIZE_CAP = 10**7
ENCODER_ENUMERATION_CAP = 10**6


def _as_joint(chain) -> JointChannelChain:
    if isinstance(chain, SourceChain):
        return chain.as_joint()
    return chain


@dataclass(frozen=True)
class ExplicitJoint:
    """Exact path distribution of an n-fold chain, flat mixed-radix indexed
    with the first symbol most significant."""

    table: np.ndarray
    base: int
    x_size: int
    z_size: int
    n: int

    def as_xz_matrix(self) -> np.ndarray:
        """Reshape to a 2-D joint table over (X^n, Z^n)."""
        idx = np.arange(self.table.size)
        xidx = np.zeros_like(idx)
        zidx = np.zeros_like(idx)
        for i in range(self.n):
            digit = (idx // self.base ** (self.n - 1 - i)) % self.base
            xidx = xidx * self.x_size + digit // self.z_size
            zidx = zidx * self.z_size + digit % self.z_size
        out = np.zeros((self.x_size**self.n, self.z_size**self.n))
        out[xidx, zidx] = self.table
        return out


def nfold_joint(chain, n: int) -> ExplicitJoint:
    """Exact n-step path distribution P(s_1) prod W(s_{i+1} | s_i)."""
    chain = _as_joint(chain)
    base = chain.dim
    if base**n > ORACLE_SIZE_CAP:
        raise TooLargeError(f"{base}^{n} paths exceed the {ORACLE_SIZE_CAP} cap")
    table = chain.initial.copy()
    step_from_last = chain.matrix.entries.T  # [from, to]
    for _ in range(1, n):
        last = np.arange(table.size) % base
        table = (table[:, None] * step_from_last[last]).reshape(-1)
    return ExplicitJoint(
        table=table, base=base, x_size=chain.x_size, z_size=chain.z_size, n=n
    )


@dataclass(frozen=True)
class SandwichMargin:
    prop: int
    theta: float
    theta_prime: float | None
    n: int
    lower_margin: float
    upper_margin: float


def sandwich_check(
    chain,
    theta_grid,
    theta_prime_grid,
    n_max: int,
    tol: float = 1e-9,
) -> list[SandwichMargin]:
    """Check the three correction-term sandwiches against exact n-fold
    enumeration for n = 2..n_max.

    The middle terms come from the single-shot entropies of the enumerated
    path distribution; the outer terms from the spectral entropies plus the
    delta/xi/zeta pairs. Raises SandwichViolationError as soon as a margin
    drops below -tol.
    """
    chain = _as_joint(chain)
    spectra = ChainSpectra(chain)
    run_up = chain.singleton or check_assumption2(chain)
    rows = []

    def record(prop, theta, theta_prime, n, lo, mid, hi):
        row = SandwichMargin(
            prop=prop,
            theta=theta,
            theta_prime=theta_prime,
            n=n,
            lower_margin=mid - lo,
            upper_margin=hi - mid,
        )
        rows.append(row)
        worst = min(row.lower_margin, row.upper_margin)
        if worst < -tol:
            raise SandwichViolationError(
                f"proposition {prop} sandwich failed at theta={theta} "
                f"theta'={theta_prime} n={n}: margin {worst:.3e}",
                prop=prop,
                theta=theta,
                theta_prime=theta_prime,
                n=n,
                margin=worst,
            )

    for n in range(2, n_max + 1):
        p2 = nfold_joint(chain, n).as_xz_matrix()
        for theta in theta_grid:
            mid = theta * h_down_shot(p2, theta)
            main = (n - 1) * spectra.log_lambda_down(theta)
            d = spectra.delta(theta)
            record(1, theta, None, n, main + d.lower, mid, main + d.upper)
            if not run_up:
                continue
            mid = theta / (1.0 - theta) * h_up_shot(p2, theta)
            main = (n - 1) * spectra.theta_h_up(theta) / (1.0 - theta)
            x = spectra.xi(theta)
            record(2, theta, None, n, main + x.lower, mid, main + x.upper)
            for theta_prime in theta_prime_grid:
                mid = theta * h_two_param_shot(p2, theta, theta_prime)
                main = (n - 1) * spectra.theta_h_two_param(theta, theta_prime)
                zz = spectra.zeta(theta, theta_prime)
                record(3, theta, theta_prime, n, main + zz.lower, mid, main + zz.upper)
    return rows


# ---------------------------------------------------------------------------
# single-shot bounds on explicit distributions
# ---------------------------------------------------------------------------


def single_shot_direct(p_m, p_xz, s: float, form: str = "down") -> float:
    """Upper bounds (e^{H(M)+H(X|Z)} / |X|)^s and the s/(1-s) up-form for the
    conditional additive channel built from the noise law p_xz[x, z]."""
    p_xz = np.asarray(p_xz, dtype=float)
    log_x = np.log(p_xz.shape[0])
    if form == "down":
        if not 0.0 < s < 1.0:
            raise DomainError("down-form needs s in (0, 1)")
        exponent = s * (renyi_entropy(p_m, s) + h_down_shot(p_xz, s) - log_x)
    elif form == "up":
        if not 0.0 <= s <= 0.5:
            raise DomainError("up-form needs s in [0, 1/2]")
        exponent = s / (1.0 - s) * (
            renyi_entropy(p_m, s) + h_up_shot(p_xz, s) - log_x
        )
    else:
        raise ValueError(f"unknown form {form!r}")
    return float(np.exp(exponent))


def single_shot_converse(p_m, p_xz, q_z, c: float) -> float:
    """P{ P_M(M) P_XZ(X,Z) <= (c/|X|) Q_Z(Z) } - c, a lower bound on the
    minimum error of the induced conditional additive channel."""
    if c <= 0:
        raise DomainError("c must be positive")
    p_m = np.asarray(p_m, dtype=float)
    p_xz = np.asarray(p_xz, dtype=float)
    q_z = np.asarray(q_z, dtype=float)
    x_size = p_xz.shape[0]
    value = p_m[:, None, None] * p_xz[None, :, :]
    threshold = (c / x_size) * q_z[None, None, :]
    return float(value[value <= threshold].sum() - c)


def single_shot_converse_renyi(
    p_m, p_xz, q_z, s: float, rho: float, sigma: float
) -> float:
    """One evaluation point of the Renyi-divergence converse on log P_j.

    Any (s > 0, rho, sigma >= 0) with all tilting arguments below 1 yields a
    valid lower bound; infeasible points (nonpositive log argument) return
    -inf.
    """
    if s <= 0 or sigma < 0:
        raise DomainError("need s > 0 and sigma >= 0")
    p_xz = np.asarray(p_xz, dtype=float)
    log_x = np.log(p_xz.shape[0])

    def u_fn(t: float) -> float:
        return t * renyi_entropy(p_m, t) + t * conditional_renyi(p_xz, q_z, t)

    for arg in (rho * (1.0 + s), rho, rho - sigma * (1.0 - rho)):
        if not arg < 1.0:
            raise DomainError(f"tilting argument {arg} outside (-inf, 1)")
    inner = (
        u_fn(rho - sigma * (1.0 - rho)) - (1.0 + sigma) * u_fn(rho) + sigma * log_x
    ) / (1.0 + sigma)
    log_argument = 1.0 - 2.0 * np.exp(inner)
    if log_argument <= 0.0:
        return -np.inf
    return float(
        (1.0 + s)
        / s
        * (-u_fn(rho * (1.0 + s)) / (1.0 + s) + u_fn(rho) + np.log(log_argument))
    )


# -- general-channel single-shot lemmas (direct summation) -------------------


def _bar_output(p_x, w_yx) -> np.ndarray:
    return np.asarray(w_yx, dtype=float) @ np.asarray(p_x, dtype=float)


def eq3_direct(p_m, p_x, w_yx, c: float) -> float:
    """Threshold + 1/c random-coding bound for a general channel w_yx[y, x]."""
    p_m = np.asarray(p_m, dtype=float)
    p_x = np.asarray(p_x, dtype=float)
    w = np.asarray(w_yx, dtype=float)
    bar = _bar_output(p_x, w)
    joint = p_m[:, None, None] * p_x[None, :, None] * w.T[None, :, :]  # [m, x, y]
    ref = p_x[None, :, None] * bar[None, None, :]
    return float(joint[joint <= c * ref].sum() + 1.0 / c)


def eq4_direct(p_m, p_x, w_yx, c: float) -> float:
    """Two-term form with the counting measure over messages; minimized at
    c = 1."""
    p_m = np.asarray(p_m, dtype=float)
    p_x = np.asarray(p_x, dtype=float)
    w = np.asarray(w_yx, dtype=float)
    bar = _bar_output(p_x, w)
    joint = p_m[:, None, None] * p_x[None, :, None] * w.T[None, :, :]
    ref = np.broadcast_to(p_x[None, :, None] * bar[None, None, :], joint.shape)
    below = joint < c * ref
    return float(joint[below].sum() + ref[~below].sum())


def eq5_direct(p_m, p_x, w_yx, s: float) -> float:
    """Exponential form of the eq4 bound at c = 1 (the quantity the proof
    actually produces: P_X enters linearly, not tilted)."""
    if not 0.0 < s < 1.0:
        raise DomainError("need s in (0, 1)")
    p_m = np.asarray(p_m, dtype=float)
    p_x = np.asarray(p_x, dtype=float)
    w = np.asarray(w_yx, dtype=float)
    bar = _bar_output(p_x, w)
    msg = (p_m[p_m > 0] ** (1.0 - s)).sum()
    chan = (
        p_x[None, :] * np.where(w.T > 0, w.T, 0.0) ** (1.0 - s) * bar[:, None].T ** s
    )
    return float(msg * chan.sum())


def eq6_gallager(p_m, p_x, w_yx, s: float) -> float:
    """Joint source-channel Gallager bound exp{(s/(1-s))(H_{1-s}(M) - I_up)}."""
    if not 0.0 < s <= 0.5:
        raise DomainError("need s in (0, 1/2]")
    h_m = renyi_entropy(p_m, s)
    i_up = mutual_info_up(p_x, w_yx, s)
    return float(np.exp(s / (1.0 - s) * (h_m - i_up)))


def eq_a_direct(p_m, p_xz, c: float) -> float:
    """Conditional-additive specialization of eq3: threshold on
    P_M(M) P_{X|Z}(X|Z) against c/|X|."""
    if c <= 0:
        raise DomainError("c must be positive")
    p_m = np.asarray(p_m, dtype=float)
    p_xz = np.asarray(p_xz, dtype=float)
    x_size = p_xz.shape[0]
    p_z = p_xz.sum(axis=0)
    cond = np.divide(p_xz, p_z[None, :], out=np.zeros_like(p_xz), where=p_z > 0)
    value = p_m[:, None, None] * p_xz[None, :, :]
    level = p_m[:, None, None] * cond[None, :, :]
    return float(value[level <= c / x_size].sum() + 1.0 / c)


def eq2_converse(p_m, w_yx, encoder, q_y, c: float) -> float:
    """Meta-converse lower bound on the error of one explicit code."""
    if c <= 0:
        raise DomainError("c must be positive")
    p_m = np.asarray(p_m, dtype=float)
    w = np.asarray(w_yx, dtype=float)
    q_y = np.asarray(q_y, dtype=float)
    total = 0.0
    for m, pm in enumerate(p_m):
        wy = w[:, encoder[m]]
        total += pm * wy[pm * wy <= c * q_y].sum()
    return float(total - c)


# ---------------------------------------------------------------------------
# exhaustive code search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CodeSearchResult:
    """True minimum average error over all encoders with MAP decoding."""

    min_error: float
    best_encoder: tuple


def conditional_additive_table(p_xz, x_digits: int = 1) -> np.ndarray:
    """Channel table W[(x, z), x'] = P_XZ(x - x', z) for the group
    (Z/bZ)^x_digits, with digitwise subtraction."""
    p_xz = np.asarray(p_xz, dtype=float)
    x_total, z_total = p_xz.shape
    base = round(x_total ** (1.0 / x_digits))
    if base**x_digits != x_total:
        raise ValueError("x-alphabet size is not a clean digit power")
    xs = np.arange(x_total)
    diff = np.zeros((x_total, x_total), dtype=int)
    for d in range(x_digits):
        power = base ** (x_digits - 1 - d)
        di = (xs[:, None] // power) % base
        dj = (xs[None, :] // power) % base
        diff = diff * base + (di - dj) % base
    table = p_xz[diff]  # [x, x', z]
    return table.transpose(0, 2, 1).reshape(x_total * z_total, x_total)


def code_error(p_m, channel_table, encoder) -> float:
    """Average error of the given encoder under exact MAP decoding."""
    p_m = np.asarray(p_m, dtype=float)
    w = np.asarray(channel_table, dtype=float)
    scored = p_m[None, :] * w[:, list(encoder)]
    return float(1.0 - scored.max(axis=1).sum())


def exhaustive_min_error(p_m, channel_table, block: int = 4096) -> CodeSearchResult:
    """Enumerate every encoder M -> X; MAP decoding is exactly optimal for a
    fixed encoder, so the minimum over the enumeration is the true P_j."""
    p_m = np.asarray(p_m, dtype=float)
    w = np.asarray(channel_table, dtype=float)
    m_size = p_m.size
    x_size = w.shape[1]
    count = x_size**m_size
    if count > ENCODER_ENUMERATION_CAP:
        raise TooLargeError(f"{x_size}^{m_size} encoders exceed the enumeration cap")
    best_success = -1.0
    best_index = 0
    for start in range(0, count, block):
        idx = np.arange(start, min(start + block, count))
        encoders = np.empty((idx.size, m_size), dtype=int)
        rem = idx.copy()
        for pos in range(m_size - 1, -1, -1):
            encoders[:, pos] = rem % x_size
            rem //= x_size
        scored = p_m[None, None, :] * w[:, encoders]  # [y, batch, m]
        success = scored.max(axis=2).sum(axis=0)
        arg = int(np.argmax(success))
        if success[arg] > best_success:
            best_success = float(success[arg])
            best_index = int(idx[arg])
    digits = []
    rem = best_index
    for _ in range(m_size):
        digits.append(rem % x_size)
        rem //= x_size
    best_encoder = tuple(reversed(digits))
    return CodeSearchResult(
        min_error=float(1.0 - best_success), best_encoder=best_encoder
    )
