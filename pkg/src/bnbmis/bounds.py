"""Average-case bounds on search-tree size for G(n, p).

Exponents are returned per vertex (the bound is ``exp(n * value)``) unless a
function says otherwise. Three regimes share one quantity k = n * p.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import (
    LN2,
    binary_entropy,
    chernoff_phi,
    chernoff_phi_inv,
    h_lambert,
    lambert_w0,
    log_binomial,
    log_sum_exp,
)


@dataclass(frozen=True)
class RegimeParams:
    n: int
    p: float

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"n must be >= 0, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p}")

    @classmethod
    def from_k(cls, n, k):
        return cls(n, k / n)

    @property
    def k(self):
        return self.n * self.p

    # the same product under the names used for the other two regimes
    f_n = k
    phi_n = k


@dataclass(frozen=True)
class BoundCurvePoint:
    k: float
    lam: float
    gamma: float
    x_star: float


@dataclass(frozen=True)
class PotentialSplit:
    n: int
    f_n: float
    delta_n: float
    c_n: float


def _positive(value, name):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be > 0, got {value}")


def _probability(p, name="p"):
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {p}")


def log_expected_is_count(n, p):
    _probability(p)
    if p == 1.0:
        return math.log(n + 1)
    if p == 0.0:
        return n * LN2
    log_q = math.log1p(-p)
    return log_sum_exp(log_binomial(n, i) + i * (i - 1) / 2 * log_q for i in range(n + 1))


def expected_is_count(n, p):
    """E[#independent sets] = sum_i C(n, i) (1 - p)^C(i, 2), summed in log space."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if p == 1.0:
        return float(n + 1)
    if p == 0.0:
        return math.ldexp(1.0, n)
    return math.exp(log_expected_is_count(n, p))


def expected_exhaustive_nodes(n, p):
    """Expected exhaustive tree size: one expected-count term per prefix level."""
    return math.fsum(expected_is_count(i, p) for i in range(n + 1))


def g_of_k(k):
    """(2 W(k) + W(k)^2) / (2k); the exhaustive upper-bound base is exp(g)."""
    _positive(k, "k")
    w = lambert_w0(k)
    return (2.0 * w + w * w) / (2.0 * k)


def exhaustive_lower_exponent(k):
    """(2 W(k/e) + W(k/e)^2) / (2k); tends to 1/e as k -> 0."""
    _positive(k, "k")
    w = lambert_w0(k / math.e)
    return (2.0 * w + w * w) / (2.0 * k)


def fixed_p_upper_exponent(n, p):
    """Total exponent ln(n)^2 / (-2 ln(1 - p)) for constant p.

    This is max_i of i ln n + ln(1-p) i^2 / 2, attained at i = ln n / -ln(1-p).
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    _positive(n, "n")
    ln_n = math.log(n)
    return ln_n * ln_n / (-2.0 * math.log1p(-p))


def subexp_upper_exponent(n, phi_n):
    """Total exponent n (2 ln phi + ln^2 phi) / (2 phi) for p = phi(n)/n."""
    if not phi_n > 1.0:
        raise DomainError(f"phi_n must be > 1, got {phi_n}")
    lp = math.log(phi_n)
    return n * (2.0 * lp + lp * lp) / (2.0 * phi_n)


def delta_n(f_n):
    """phi^-1(2 ln 2 / f_n), the Chernoff deviation of the small-potentials split."""
    _positive(f_n, "f_n")
    return chernoff_phi_inv(2.0 * LN2 / f_n)


def delta_n_closed_form(f_n):
    """Same value through the Lambert-W closed form; needs 2 ln 2 / f_n > 1."""
    _positive(f_n, "f_n")
    return h_lambert(2.0 * LN2 / f_n)


def c_n(n, f_n):
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    _positive(f_n, "f_n")
    d = delta_n(f_n)
    c = 1.0 / (1.0 + (1.0 + d) * ((n - 1) / n) * f_n)
    return PotentialSplit(n=n, f_n=f_n, delta_n=d, c_n=c)


def c_n_limit(f_n):
    """The n -> infinity limit of C_n at fixed f_n."""
    _positive(f_n, "f_n")
    return 1.0 / (1.0 + (1.0 + delta_n(f_n)) * f_n)


def large_potentials_exponent(n, f_n, h):
    """h n ln(ln(1/f)) / ln(1/f): shape of the large-potentials bound (h supplied)."""
    _positive(f_n, "f_n")
    if f_n >= 1.0 / math.e:
        raise DomainError("needs ln(1/f_n) > 1, i.e. f_n < 1/e")
    inv = math.log(1.0 / f_n)
    return h * n * math.log(inv) / inv


def large_potentials_entropy_exponent(n, f_n):
    """n H(1 - C_n), the entropy bound on the large-potential node count."""
    split = c_n(n, f_n)
    x = 1.0 - split.c_n
    if not x < 0.5:
        raise DomainError(f"entropy bound needs 1 - C_n < 1/2, got {x}")
    return n * binary_entropy(x)


def _check_tail_args(N, p):
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    _probability(p)


def binomial_log_pmf(N, p, j):
    if p == 0.0:
        return 0.0 if j == 0 else -math.inf
    if p == 1.0:
        return 0.0 if j == N else -math.inf
    return log_binomial(N, j) + j * math.log(p) + (N - j) * math.log1p(-p)


def binomial_upper_tail(N, p, threshold):
    """Exact P(Bin(N, p) >= threshold) by log-space summation."""
    _check_tail_args(N, p)
    lo = max(0, math.ceil(threshold))
    if lo > N:
        return 0.0
    if lo == 0:
        return 1.0
    return min(1.0, math.exp(log_sum_exp(binomial_log_pmf(N, p, j) for j in range(lo, N + 1))))


def chernoff_tail_bound(N, p, threshold):
    """exp(-N p phi(delta)) with delta = threshold / (N p) - 1."""
    _check_tail_args(N, p)
    mu = N * p
    if threshold < mu:
        raise DomainError(f"threshold {threshold} is below the mean {mu}")
    if mu == 0.0:
        return 1.0 if threshold <= 0 else 0.0
    delta = threshold / mu - 1.0
    return math.exp(-mu * chernoff_phi(delta))


EXACT_TAIL_MAX_N = 200


@dataclass(frozen=True)
class PotentialCount:
    value: float
    tail: float
    exact_tail: bool

    def __float__(self):
        return self.value


def w_n_u_detail(n, p, u):
    if not 1 <= u <= n:
        raise DomainError(f"need 1 <= u <= n, got u={u}, n={n}")
    _probability(p)
    N = n * (n - 1) // 2
    threshold = n * n / (2.0 * u) - n / 2.0
    exact = n <= EXACT_TAIL_MAX_N
    if exact:
        tail = binomial_upper_tail(N, p, threshold)
    elif threshold <= N * p:
        tail = 1.0
    else:
        tail = chernoff_tail_bound(N, p, threshold)
    if tail == 0.0:
        return PotentialCount(0.0, 0.0, exact)
    fixed = n - u
    log_q = math.log1p(-p) if p < 1.0 else -math.inf
    logs = []
    for i in range(fixed, n + 1):
        s = i - fixed
        pairs = s * (s - 1) // 2
        if pairs and log_q == -math.inf:
            continue
        logs.append(log_binomial(i, s) + (pairs * log_q if pairs else 0.0))
    return PotentialCount(math.exp(log_sum_exp(logs)) * tail, tail, exact)


def w_n_u(n, p, u):
    """Bound on the expected number of nodes with potential u.

    sum_{i=n-u}^{n} C(i, s) (1-p)^C(s,2) * P(m >= n^2/(2u) - n/2), s = i-(n-u).
    The edge-count tail is exact up to n = 200 and a Chernoff bound beyond
    (see :func:`w_n_u_detail` for the flag).
    """
    return w_n_u_detail(n, p, u).value


def mu_of_lambda(lam, k):
    """2 ln 2 + lam - (k + 1) + (lam - 1) ln(k / (lam - 1))."""
    if not lam > 1.0:
        raise DomainError(f"lambda must be > 1, got {lam}")
    _positive(k, "k")
    return 2.0 * LN2 + lam - (k + 1.0) + (lam - 1.0) * math.log(k / (lam - 1.0))


def lambda_of_k(k):
    """Root of mu_of_lambda above k + 1: 1 + k (1 + phi^-1(2 ln 2 / k))."""
    _positive(k, "k")
    return 1.0 + k * (1.0 + chernoff_phi_inv(2.0 * LN2 / k))


def lambda_caption_approx(k):
    """The rough linear approximation 4(k + 1)/3 + 1 shown alongside the curve."""
    return 4.0 * (k + 1.0) / 3.0 + 1.0


def _check_unit_open(x):
    if not 0.0 < x < 1.0:
        raise DomainError(f"x must lie in (0, 1), got {x}")


def t1_exponent(x, k):
    """Small-potentials exponent per vertex at u = x n: max(mu(1/x)/2, 0)."""
    _check_unit_open(x)
    return max(mu_of_lambda(1.0 / x, k) / 2.0, 0.0)


def t2_exponent(x, k):
    """Large-potentials exponent per vertex at u = x n: max(H(x) - k x^2 / 2, 0)."""
    _check_unit_open(x)
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    return max(binary_entropy(x) - k * x * x / 2.0, 0.0)


def psi_n(n, u, k):
    """n ln n - u ln u - (n-u) ln(n-u) - k u^2 / (2n)."""
    def xlx(v):
        return v * math.log(v) if v > 0 else 0.0
    return xlx(n) - xlx(u) - xlx(n - u) - k * u * u / (2.0 * n)


def _min_exponent_grid(x, k):
    """Vectorised min(t1, t2) over an array of x in (0, 1)."""
    lam = 1.0 / x
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = 2.0 * LN2 + lam - (k + 1.0) + (lam - 1.0) * np.log(k / (lam - 1.0))
        t1 = np.maximum(mu / 2.0, 0.0)
        h = -(x * np.log(x) + (1.0 - x) * np.log1p(-x))
    t2 = np.maximum(h - k * x * x / 2.0, 0.0)
    return np.minimum(t1, t2)


def max_min_exponent(k, points=4096, rounds=6):
    """Maximise min(t1_exponent, t2_exponent) over x in (0, 1).

    A log-spaced scan over [1e-9, 1) followed by repeated local zooms around
    the best point. Returns (x_star, exponent).
    """
    _positive(k, "k")
    lo_x = 1e-9
    xs = np.concatenate([
        np.geomspace(lo_x, 0.5, points // 2, endpoint=False),
        1.0 - np.geomspace(0.5, lo_x, points // 2),
    ])
    vals = _min_exponent_grid(xs, k)
    for _ in range(rounds):
        i = int(np.argmax(vals))
        left = xs[max(i - 1, 0)]
        right = xs[min(i + 1, len(xs) - 1)]
        if right <= left:
            break
        xs = np.linspace(left, right, points)
        vals = _min_exponent_grid(xs, k)
    i = int(np.argmax(vals))
    return float(xs[i]), float(vals[i])


def gamma_of_k(k):
    """Branch-and-bound growth base for p = k/n.

    gamma = exp(max over x of min(t1_exponent(x, k), t2_exponent(x, k))).
    """
    _positive(k, "k")
    x_star, best = max_min_exponent(k)
    return BoundCurvePoint(k=k, lam=lambda_of_k(k), gamma=math.exp(best), x_star=x_star)
