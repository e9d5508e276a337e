"""Special functions used by the analytic bounds.

Everything here is a pure scalar function on Python floats.
"""
import math
from dataclasses import dataclass

from .errors import DomainError

INV_E = math.exp(-1.0)
LN2 = math.log(2.0)


@dataclass(frozen=True)
class RealInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    def contains(self, x):
        return self.lo <= x <= self.hi

    def midpoint(self):
        return self.lo + 0.5 * (self.hi - self.lo)


def _check_finite(x, name="x"):
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")


def lambert_w0(x):
    """Principal branch of Lambert W: the w >= -1 with w * exp(w) == x.

    Halley iteration from a branch-point series (near -1/e) or a log-based
    guess, safeguarded by a bracket; falls back to bisection whenever the
    Halley step leaves the bracket.
    """
    x = float(x)
    _check_finite(x)
    if x < -INV_E:
        # tolerate representation error of -1/e itself
        if x < -INV_E - 4e-17:
            raise DomainError(f"lambert_w0 undefined for x < -1/e, got {x}")
        return -1.0
    if x == 0.0:
        return 0.0
    if x == -INV_E:
        return -1.0

    # bracket: f(w) = w e^w - x is increasing on [-1, inf)
    if x < 0:
        lo, hi = -1.0, 0.0
    else:
        lo, hi = 0.0, max(1.0, math.log(x))
    if x < -0.25:
        q = math.sqrt(max(0.0, 2.0 * (math.e * x + 1.0)))
        w = -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q ** 3
    elif x < 3.0:
        w = math.log1p(x) * (1.0 - math.log1p(math.log1p(x)) / (2.0 + math.log1p(x)))
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    w = min(max(w, lo), hi)

    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        if f == 0.0:
            return w
        if f > 0:
            hi = min(hi, w)
        else:
            lo = max(lo, w)
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1) if wp1 != 0.0 else 0.0
        if denom != 0.0:
            w_new = w - f / denom
        else:
            w_new = math.nan
        if not (lo < w_new < hi):
            w_new = 0.5 * (lo + hi)
        if abs(w_new - w) <= 4e-16 * max(1.0, abs(w_new)):
            return w_new
        w = w_new
    return w


def chernoff_phi(delta):
    """(1 + d) ln(1 + d) - d, the exponent of the multiplicative Chernoff bound."""
    delta = float(delta)
    _check_finite(delta, "delta")
    if delta < 0:
        raise DomainError(f"chernoff_phi needs delta >= 0, got {delta}")
    if delta < 1e-2:
        # alternating series sum_{j>=2} (-1)^j d^j / (j (j - 1)); avoids cancellation
        total, power = 0.0, delta
        for j in range(2, 14):
            power *= delta
            total += (power if j % 2 == 0 else -power) / (j * (j - 1))
        return total
    return (1.0 + delta) * math.log1p(delta) - delta


def chernoff_phi_inv(y, max_iter=200):
    """Inverse of :func:`chernoff_phi` on [0, inf), by monotone bisection.

    Bisects until the bracket cannot be split any further in double precision
    or ``max_iter`` halvings have been spent.
    """
    y = float(y)
    _check_finite(y, "y")
    if y < 0:
        raise DomainError(f"chernoff_phi_inv needs y >= 0, got {y}")
    if y == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while chernoff_phi(hi) < y:
        lo, hi = hi, 2.0 * hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if chernoff_phi(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def h_lambert(x):
    """Closed-form inverse of chernoff_phi: exp(W((x - 1)/e) + 1) - 1, for x > 1."""
    x = float(x)
    _check_finite(x)
    if x <= 1.0:
        raise DomainError(f"h_lambert needs x > 1, got {x}")
    return math.expm1(lambert_w0((x - 1.0) / math.e) + 1.0)


def binary_entropy(x):
    """-x ln x - (1 - x) ln(1 - x) in nats, with value 0 at the endpoints."""
    x = float(x)
    _check_finite(x)
    if x < 0.0 or x > 1.0:
        raise DomainError(f"binary_entropy needs 0 <= x <= 1, got {x}")
    y = 1.0 - x
    a = x * math.log(x) if x > 0.0 else 0.0
    b = y * math.log(y) if y > 0.0 else 0.0
    return -(a + b)


def log_binomial(n, i):
    """ln C(n, i) via lgamma."""
    if n < 0 or i < 0:
        raise DomainError(f"log_binomial needs nonnegative arguments, got ({n}, {i})")
    if i > n:
        raise DomainError(f"log_binomial needs i <= n, got ({n}, {i})")
    i = min(i, n - i)
    if i == 0:
        return 0.0
    return math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1)


def log_sum_exp(logs):
    """Stable ln(sum(exp(v))) for an iterable of logs; -inf terms are skipped."""
    logs = [v for v in logs if v != -math.inf]
    if not logs:
        return -math.inf
    top = max(logs)
    return top + math.log(math.fsum(math.exp(v - top) for v in logs))
