"""The convex tilted family U(theta), its derivative u, and the monotone
inverses theta(a) and a(R) with the rate function R(a).

U combines the source Renyi entropy rate with one of three channel
variants: the down entropy, the up entropy, or the two-parameter entropy
at a frozen second order. All three are expressed through log-eigenvalue
curves, so U is smooth through theta = 0 and U(0) = 0 exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import AssumptionViolatedError, DomainError, OutOfRangeError
from .markov import JointChannelChain, SourceChain, check_assumption1, check_assumption2
from .measures import ChainSpectra, _central_d1

# The paper's limits theta -> -inf and theta -> 1 are not numerically
# reachable; the search interval is truncated here and the domain endpoints
# a_lower / a_upper are approximated by u at the truncation points.
THETA_MIN = -50.0
THETA_MAX = 1.0 - 1e-6

U_DERIV_STEP = 1e-3
INVERSION_RTOL = 1e-10
BISECTION_CAP = 200

VARIANTS = ("down", "up", "fixed")


class TiltedFamily:
    """Bound context for a (source, channel, rate ratio, variant) tuple.

    Eigen-solutions are memoized per tilting order inside the two
    ChainSpectra members; instances are not safe to share across workers.
    """

    def __init__(
        self,
        source: SourceChain,
        channel: JointChannelChain,
        rate_ratio: float,
        variant: str = "down",
        theta_prime: float | None = None,
    ):
        if rate_ratio <= 0:
            raise ValueError("rate ratio must be positive")
        if variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if variant == "fixed":
            if theta_prime is None or not theta_prime < 1.0:
                raise DomainError("fixed variant needs theta_prime < 1")
        elif theta_prime is not None:
            raise ValueError("theta_prime only applies to the fixed variant")
        if variant == "down":
            if not (channel.singleton or check_assumption1(channel).holds):
                raise AssumptionViolatedError("down variant needs Assumption 1")
        else:
            if not check_assumption2(channel):
                raise AssumptionViolatedError("up/fixed variants need Assumption 2")
        self.source = source
        self.channel = channel
        self.rate_ratio = float(rate_ratio)
        self.variant = variant
        self.theta_prime = theta_prime
        self.source_spectra = ChainSpectra(source)
        self.channel_spectra = ChainSpectra(channel)
        self._endpoints = None

    # -- the convex function and its derivative -------------------------------

    def _channel_term(self, theta: float) -> float:
        ch = self.channel_spectra
        if self.variant == "down":
            return ch.log_lambda_down(theta)
        if self.variant == "up":
            return ch.theta_h_up(theta)
        return ch.theta_h_two_param(theta, self.theta_prime)

    def value(self, theta: float) -> float:
        """U(theta) = r theta H_{1-theta}(M) + theta H_{1-theta}(X|Z)."""
        if not theta < 1.0:
            raise DomainError(f"theta must be below 1, got {theta}")
        return self.rate_ratio * self.source_spectra.log_lambda_down(
            theta
        ) + self._channel_term(theta)

    def derivative(self, theta: float) -> float:
        """u(theta) = dU/dtheta by Richardson-extrapolated central differences,
        with the step shrunk near the upper domain edge."""
        h = U_DERIV_STEP * max(1.0, abs(theta))
        headroom = (1.0 - 1e-9 - theta) / 2.0
        if headroom <= 0:
            raise DomainError(f"theta {theta} too close to 1")
        h = min(h, headroom)
        return _central_d1(self.value, theta, h)

    # -- domain endpoints ------------------------------------------------------

    def _domain(self):
        if self._endpoints is None:
            self._endpoints = (
                self.derivative(THETA_MIN),
                self.derivative(THETA_MAX),
            )
        return self._endpoints

    @property
    def a_lower(self) -> float:
        return self._domain()[0]

    @property
    def a_upper(self) -> float:
        return self._domain()[1]

    def rate_floor(self) -> float:
        """u(0) = r H(M) + H(X|Z): below this rate the exponents vanish."""
        return self.derivative(0.0)

    def rate_ceiling(self) -> float:
        """r H_0(M) + H_0(X|Z) with the channel order-zero entropy matching
        the variant."""
        src = self.source_spectra.h_zero_down()
        if self.variant == "down":
            ch = self.channel_spectra.h_zero_down()
        elif self.variant == "up":
            ch = self.channel_spectra.h_zero_up()
        else:
            raise DomainError("rate ceiling is undefined for the fixed variant")
        return self.rate_ratio * src + ch

    # -- monotone inversions ---------------------------------------------------

    def theta_of_a(self, a: float) -> float:
        """The unique theta with u(theta) = a, by bisection on the
        nondecreasing derivative."""
        lo, hi = THETA_MIN, THETA_MAX
        if not (self.a_lower < a < self.a_upper):
            raise OutOfRangeError(
                f"a={a} outside the derivative range "
                f"({self.a_lower}, {self.a_upper})"
            )
        tol = INVERSION_RTOL * max(1.0, abs(a))
        for _ in range(BISECTION_CAP):
            mid = 0.5 * (lo + hi)
            residual = self.derivative(mid) - a
            if abs(residual) <= tol:
                return mid
            if residual < 0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * max(1.0, abs(mid)):
                return mid
        return 0.5 * (lo + hi)

    def rate_of_a(self, a: float) -> float:
        """R(a) = (1 - theta(a)) a + U(theta(a))."""
        theta = self.theta_of_a(a)
        return (1.0 - theta) * a + self.value(theta)

    def _rate_at_theta(self, theta: float) -> float:
        return (1.0 - theta) * self.derivative(theta) + self.value(theta)

    def theta_of_rate(self, rate: float) -> float:
        """theta(a(R)): bisection on the increasing map
        theta -> (1 - theta) u(theta) + U(theta)."""
        lo, hi = THETA_MIN, THETA_MAX
        f_lo = self._rate_at_theta(lo)
        f_hi = self._rate_at_theta(hi)
        if not (f_lo < rate <= f_hi):
            raise OutOfRangeError(
                f"rate {rate} outside the attainable interval ({f_lo}, {f_hi}]"
            )
        tol = INVERSION_RTOL * max(1.0, abs(rate))
        for _ in range(BISECTION_CAP):
            mid = 0.5 * (lo + hi)
            residual = self._rate_at_theta(mid) - rate
            if abs(residual) <= tol:
                return mid
            if residual < 0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * max(1.0, abs(mid)):
                return mid
        return 0.5 * (lo + hi)

    def a_of_rate(self, rate: float) -> float:
        """Inverse of the rate function; round-trips with rate_of_a."""
        return self.derivative(self.theta_of_rate(rate))

    def convexity_gap(self, grid: np.ndarray) -> float:
        """Worst chord violation of U on the given grid (should be >= ~-1e-9;
        positive values mean strictly convex)."""
        values = np.array([self.value(t) for t in grid])
        worst = np.inf
        for i in range(1, len(grid) - 1):
            t = (grid[i] - grid[i - 1]) / (grid[i + 1] - grid[i - 1])
            chord = (1.0 - t) * values[i - 1] + t * values[i + 1]
            worst = min(worst, chord - values[i])
        return float(worst)
