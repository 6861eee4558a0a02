"""
The Matsuoka distribution M(p) on the unit interval.

Density f_p(x) = 2 sqrt(-p^3 ln(x) / pi) x^(p-1) for 0 < x < 1. Equivalently
-ln(X) ~ Gamma(shape 3/2, scale 1/p), which drives sampling, the MLE/UMVUE
and most closed forms below.
"""

import logging
import math
from typing import Optional, Union

import numpy as np
from pydantic import ValidationError
from scipy import integrate, optimize, special, stats

from ..models import (
    ClosedFormCheck,
    ClosedFormDiagnostics,
    EntropyKind,
    EntropyOrders,
    MatsuokaParams,
    MleFit,
    ReliabilityPair,
    ShapeInfo,
)
from .errors import ConvergenceError, DomainError
from .special_fn import gamma, inv_upper_inc_gamma, lower_inc_gamma, upper_inc_gamma

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)
GAMMA_3_2 = SQRT_PI / 2.0
LOG_2_OVER_SQRT_PI = math.log(2.0) - 0.5 * math.log(math.pi)

MGF_REL_TOL = 1e-15
MGF_MAX_TERMS = 100_000
MGF_SERIES_MIN_T = -1.0
EXPECTILE_XTOL = 1e-12
EXPECTILE_MAX_ITER = 200

ParamsLike = Union[MatsuokaParams, float]


def as_params(params: ParamsLike) -> MatsuokaParams:
    """Accept a MatsuokaParams or a bare p and validate it."""
    if isinstance(params, MatsuokaParams):
        return params
    try:
        return MatsuokaParams(p=params)
    except ValidationError as exc:
        raise DomainError(f"invalid Matsuoka parameter p={params!r}: p must be finite and > 0") from exc


def _out(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def _inside(x: np.ndarray) -> np.ndarray:
    return (x > 0.0) & (x < 1.0)


def _points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise DomainError("evaluation points must not be NaN")
    return x


# ---------------------------------------------------------------------------
# Density, distribution, quantile
# ---------------------------------------------------------------------------


def log_pdf(params: ParamsLike, x):
    """ln f_p(x); -inf outside (0, 1)."""
    p = as_params(params).p
    x = _points(x)
    out = np.full(x.shape, -np.inf)
    mask = _inside(x)
    lx = np.log(x[mask])
    out[mask] = LOG_2_OVER_SQRT_PI + 0.5 * (3.0 * math.log(p) + np.log(-lx)) + (p - 1.0) * lx
    return _out(out)


def pdf(params: ParamsLike, x):
    """
    Density of M(p).

    Zero outside (0, 1) and at both endpoints. For p < 1 the density is
    unbounded as x -> 0+, but the value at exactly 0 is reported as 0.
    """
    return _out(np.exp(np.asarray(log_pdf(params, x))))


def cdf(params: ParamsLike, x):
    """F_p(x) = (2/sqrt(pi)) Gamma(3/2, -p ln x) on (0, 1)."""
    p = as_params(params).p
    x = _points(x)
    out = np.where(x >= 1.0, 1.0, 0.0)
    mask = _inside(x)
    if np.any(mask):
        out[mask] = upper_inc_gamma(1.5, -p * np.log(x[mask])) / GAMMA_3_2
    return _out(out)


def sf(params: ParamsLike, x):
    """Survival function 1 - F_p(x) = (2/sqrt(pi)) gamma(3/2, -p ln x) on (0, 1)."""
    p = as_params(params).p
    x = _points(x)
    out = np.where(x <= 0.0, 1.0, 0.0)
    mask = _inside(x)
    if np.any(mask):
        out[mask] = lower_inc_gamma(1.5, -p * np.log(x[mask])) / GAMMA_3_2
    return _out(out)


def quantile(params: ParamsLike, q):
    """
    Inverse of ``cdf``: exp{-Gamma^-1(3/2, q sqrt(pi)/2) / p} for 0 < q < 1.

    The endpoints map to 0 and 1.
    """
    p = as_params(params).p
    q = np.asarray(q, dtype=float)
    if np.any(np.isnan(q)) or np.any((q < 0.0) | (q > 1.0)):
        raise DomainError("quantile level q must lie in [0, 1]")
    out = np.where(q >= 1.0, 1.0, 0.0)
    flat_q = q.reshape(-1)
    flat_out = out.reshape(-1)
    for i, level in enumerate(flat_q):
        if 0.0 < level < 1.0:
            flat_out[i] = math.exp(-inv_upper_inc_gamma(1.5, level * GAMMA_3_2) / p)
    return _out(flat_out.reshape(q.shape))


def sample(params: ParamsLike, n: int, seed: Optional[int] = None) -> np.ndarray:
    """
    Draw n variates as exp(-G) with G ~ Gamma(3/2, scale 1/p).

    The generator is created per call from ``seed``; identical seeds give
    identical sequences. Values are clamped into the open unit interval.
    """
    p = as_params(params).p
    if int(n) < 1:
        raise DomainError(f"sample size must be >= 1, got {n!r}")
    if seed is not None and int(seed) < 0:
        raise DomainError(f"seed must be a non-negative integer, got {seed!r}")
    rng = np.random.default_rng(seed)
    g = rng.gamma(shape=1.5, scale=1.0 / p, size=int(n))
    x = np.exp(-g)
    return np.clip(x, np.finfo(float).tiny, np.nextafter(1.0, 0.0))


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------


def raw_moment(params: ParamsLike, k: float) -> float:
    """E(X^k) = (p/(p+k))^(3/2) for k > -p."""
    p = as_params(params).p
    if not k > -p:
        raise DomainError(f"raw moment needs k > -p, got k={k!r} with p={p:g}")
    return (p / (p + k)) ** 1.5


def mean(params: ParamsLike) -> float:
    return raw_moment(params, 1.0)


def variance(params: ParamsLike) -> float:
    p = as_params(params).p
    return (p / (p + 2.0)) ** 1.5 - (p / (p + 1.0)) ** 3


def central_moment(params: ParamsLike, k: int) -> float:
    """E[(X - mu)^k] for k in {2, 3, 4} from the raw moments."""
    params = as_params(params)
    mu = mean(params)
    m = [raw_moment(params, j) for j in range(5)]
    if k == 2:
        return m[2] - mu**2
    if k == 3:
        return m[3] - 3.0 * mu * m[2] + 2.0 * mu**3
    if k == 4:
        return m[4] - 4.0 * mu * m[3] + 6.0 * mu**2 * m[2] - 3.0 * mu**4
    raise DomainError(f"central moment order must be 2, 3 or 4, got {k!r}")


def skewness(params: ParamsLike) -> float:
    """Pearson's moment coefficient of skewness."""
    p = as_params(params).p
    num = (
        p**1.5 / (p + 3.0) ** 1.5
        - 3.0 * p**3 / ((p + 1.0) * (p + 2.0)) ** 1.5
        + 2.0 * p**4.5 / (p + 1.0) ** 4.5
    )
    return num / variance(p) ** 1.5


def kurtosis(params: ParamsLike) -> float:
    """E[(X - mu)^4] / Var(X)^2 (not excess)."""
    params = as_params(params)
    return central_moment(params, 4) / variance(params) ** 2


def _kurtosis_as_printed(p: float) -> float:
    num = (
        p**1.5 / (p + 4.0) ** 1.5
        - 4.0 * p**3 / ((p + 1.0) * (p + 3.0)) ** 1.5
        + 6.0 * p**4.5 / ((p + 1.0) * (p + 2.0)) ** 1.5
        - 3.0 * p**6 / (p + 1.0) ** 6
    )
    return num / variance(p) ** 2


def mode(params: ParamsLike) -> Optional[float]:
    """Interior mode e^(-1/(2(p-1))) for p > 1; None when the density is J-shaped (p <= 1)."""
    p = as_params(params).p
    if p <= 1.0:
        return None
    return math.exp(-1.0 / (2.0 * (p - 1.0)))


def shape(params: ParamsLike) -> ShapeInfo:
    """Classify the density as J-shaped (p <= 1) or unimodal."""
    params = as_params(params)
    m = mode(params)
    if m is None:
        return ShapeInfo(j_shaped=True)
    return ShapeInfo(j_shaped=False, mode=m, mode_height=pdf(params, m))


def _mgf_quadrature(p: float, t: float) -> float:
    # u = p (-ln X) ~ Gamma(3/2, 1); the integrand is positive, so no cancellation
    def integrand(u: float) -> float:
        return math.exp(t * math.exp(-u / p)) * math.sqrt(u) * math.exp(-u) / GAMMA_3_2

    value, _ = integrate.quad(integrand, 0.0, np.inf, limit=400, epsabs=0.0, epsrel=1e-13)
    return float(value)


def mgf(params: ParamsLike, t: float) -> float:
    """
    M_X(t) = p^(3/2) sum_n t^n / (n! (p+n)^(3/2)).

    The series is summed for t > MGF_SERIES_MIN_T, where its terms cannot
    cancel badly. Below that the alternating series loses every digit, and
    E exp(tX) is integrated over -ln X instead.
    """
    p = as_params(params).p
    t = float(t)
    if not math.isfinite(t):
        raise DomainError(f"mgf argument must be finite, got {t!r}")
    if t < MGF_SERIES_MIN_T:
        return _mgf_quadrature(p, t)
    total = 0.0
    term_factor = 1.0  # t^n / n!
    for n in range(MGF_MAX_TERMS):
        if n > 0:
            term_factor *= t / n
        term = term_factor * (p / (p + n)) ** 1.5
        total += term
        if n > abs(t) and abs(term) <= MGF_REL_TOL * abs(total):
            return total
    raise ConvergenceError(f"mgf series did not settle for t={t:g}", iterations=MGF_MAX_TERMS)


def incomplete_moment(params: ParamsLike, k: float, y: float) -> float:
    """m_k(y) = int_0^y x^k f_p(x) dx for 0 < y < 1."""
    p = as_params(params).p
    if not k > -p:
        raise DomainError(f"incomplete moment needs k > -p, got k={k!r}")
    if not 0.0 < y < 1.0:
        raise DomainError(f"incomplete moment needs 0 < y < 1, got y={y!r}")
    c = 2.0 * p**1.5 / (SQRT_PI * (p + k) ** 1.5)
    return c * upper_inc_gamma(1.5, -(p + k) * math.log(y))


def mean_deviations(params: ParamsLike) -> tuple[float, float]:
    """(E|X - mu|, E|X - M|) with M the median."""
    params = as_params(params)
    mu = mean(params)
    med = quantile(params, 0.5)
    delta_mean = 2.0 * mu * cdf(params, mu) - 2.0 * incomplete_moment(params, 1.0, mu)
    delta_median = mu - 2.0 * incomplete_moment(params, 1.0, med)
    return max(delta_mean, 0.0), max(delta_median, 0.0)


def expectile(params: ParamsLike, alpha: float) -> float:
    """
    The alpha-expectile, root of
    e = (1-a)/a * mu + (2a-1)/a * [C gamma(3/2, -(p+1) ln e) + e F_p(e)],
    with C = 2 p^(3/2) / (sqrt(pi) (p+1)^(3/2)).
    """
    params = as_params(params)
    p = params.p
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"expectile level must lie in (0, 1), got {alpha!r}")
    mu = mean(params)
    if alpha == 0.5:
        return mu
    c = 2.0 * p**1.5 / (SQRT_PI * (p + 1.0) ** 1.5)

    def residual(e: float) -> float:
        upper_tail = c * lower_inc_gamma(1.5, -(p + 1.0) * math.log(e)) + e * cdf(params, e)
        return e - ((1.0 - alpha) / alpha * mu + (2.0 * alpha - 1.0) / alpha * upper_tail)

    lo, hi = np.finfo(float).tiny, np.nextafter(1.0, 0.0)
    try:
        root, info = optimize.brentq(
            residual, lo, hi, xtol=EXPECTILE_XTOL, maxiter=EXPECTILE_MAX_ITER, full_output=True, disp=False
        )
    except ValueError as exc:
        raise ConvergenceError(f"expectile residual has no sign change for alpha={alpha:g}") from exc
    if not info.converged:
        raise ConvergenceError(
            f"expectile solver did not converge for alpha={alpha:g}", iterations=info.iterations
        )
    return float(root)


# ---------------------------------------------------------------------------
# Entropy
# ---------------------------------------------------------------------------


def m_alpha(params: ParamsLike, alpha: float) -> float:
    """
    int f_p(x)^alpha dx = (2/sqrt(pi))^alpha p^(3 alpha/2) Gamma(alpha/2 + 1) / (alpha(p-1)+1)^(alpha/2+1).

    Finite only when alpha(p-1) + 1 > 0.
    """
    p = as_params(params).p
    if not alpha > 0:
        raise DomainError(f"entropy order alpha must be > 0, got {alpha!r}")
    rate = alpha * (p - 1.0) + 1.0
    if rate <= 0.0:
        raise DomainError(f"integral of f^alpha diverges: alpha(p-1)+1 = {rate:g} <= 0")
    log_value = (
        alpha * (math.log(2.0) - 0.5 * math.log(math.pi))
        + 1.5 * alpha * math.log(p)
        + math.lgamma(alpha / 2.0 + 1.0)
        - (alpha / 2.0 + 1.0) * math.log(rate)
    )
    return math.exp(log_value)


def _m_alpha_as_printed(p: float, alpha: float) -> float:
    return alpha**-1.5 * p ** (3.0 - alpha / 2.0) * gamma(alpha + 1.5) / (p - alpha + 1.0) ** (alpha + 1.5)


def differential_entropy(params: ParamsLike) -> float:
    """-E ln f_p(X) = ln(sqrt(pi)/2) - ln p - psi(3/2)/2 + 3(p-1)/(2p)."""
    p = as_params(params).p
    return (
        0.5 * math.log(math.pi)
        - math.log(2.0)
        - math.log(p)
        - 0.5 * float(special.digamma(1.5))
        + 1.5 * (p - 1.0) / p
    )


def entropy(
    params: ParamsLike,
    kind: EntropyKind = "shannon",
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
) -> float:
    """
    Shannon, differential, Renyi, Tsallis or Sharma-Mittal entropy of M(p).

    ``shannon`` is the log-scale measure -E(ln X) = 3/(2p) used throughout
    the frontier literature. ``differential`` is -E(ln f_p(X)), the limit of
    the Renyi and Tsallis entropies as alpha -> 1; the two differ.

    Args:
        params: Distribution parameter
        kind: Entropy family
        alpha: Order for renyi, tsallis and sharma_mittal
        beta: Second order for sharma_mittal

    Returns:
        Entropy value
    """
    params = as_params(params)
    if kind == "shannon":
        return 1.5 / params.p
    if kind == "differential":
        return differential_entropy(params)
    if kind not in ("renyi", "tsallis", "sharma_mittal"):
        raise DomainError(f"unknown entropy kind {kind!r}")
    if alpha is None or (kind == "sharma_mittal" and beta is None):
        raise DomainError(f"{kind} entropy needs alpha" + (" and beta" if kind == "sharma_mittal" else ""))
    try:
        orders = EntropyOrders(alpha=alpha, beta=beta if kind == "sharma_mittal" else None)
    except ValidationError as exc:
        raise DomainError(f"invalid entropy orders alpha={alpha!r} beta={beta!r}") from exc
    m = m_alpha(params, orders.alpha)
    if kind == "renyi":
        return math.log(m) / (1.0 - orders.alpha)
    if kind == "tsallis":
        return (m - 1.0) / (1.0 - orders.alpha)
    b = orders.beta
    return (m ** ((1.0 - b) / (1.0 - orders.alpha)) - 1.0) / (1.0 - b)


# ---------------------------------------------------------------------------
# Reliability and order statistics
# ---------------------------------------------------------------------------


def reliability(pair: Union[ReliabilityPair, tuple[float, float]]) -> float:
    """P(X > Y) for independent X ~ M(p), Y ~ M(q)."""
    if not isinstance(pair, ReliabilityPair):
        try:
            pair = ReliabilityPair(p=pair[0], q=pair[1])
        except ValidationError as exc:
            raise DomainError(f"invalid reliability pair {pair!r}") from exc
    s = pair.s
    return (2.0 / math.pi) * ((2.0 * s - 1.0) * math.sqrt(s * (1.0 - s)) + math.asin(math.sqrt(s)))


def _check_order(n: int, r: int) -> None:
    if int(n) < 1 or not 1 <= int(r) <= int(n):
        raise DomainError(f"order statistic needs 1 <= r <= n, got n={n!r}, r={r!r}")


def order_stat_cdf(params: ParamsLike, n: int, r: int, x):
    """P(X_(r) <= x): probability that at least r of n draws fall below x."""
    _check_order(n, r)
    f_cdf = np.asarray(cdf(params, x))
    return _out(np.asarray(stats.binom.sf(int(r) - 1, int(n), f_cdf), dtype=float))


def order_stat_pdf(params: ParamsLike, n: int, r: int, x):
    """Density r C(n,r) f(x) F(x)^(r-1) (1-F(x))^(n-r)."""
    _check_order(n, r)
    dens = np.asarray(pdf(params, x))
    f_cdf = np.asarray(cdf(params, x))
    return _out(int(n) * dens * stats.binom.pmf(int(r) - 1, int(n) - 1, f_cdf))


# ---------------------------------------------------------------------------
# Estimation
# ---------------------------------------------------------------------------


def log_likelihood(params: ParamsLike, data) -> float:
    """Log-likelihood of an i.i.d. sample."""
    return float(np.sum(np.asarray(log_pdf(params, np.asarray(data, dtype=float)))))


def fit_mle(data) -> MleFit:
    """
    Closed-form MLE and UMVUE of p.

    Args:
        data: Observations strictly inside (0, 1), at least two

    Returns:
        MleFit with p_mle = -3n/(2 sum ln x) and p_umvue = -(3n-2)/(2 sum ln x)
    """
    x = np.asarray(data, dtype=float).reshape(-1)
    if x.size < 2:
        raise DomainError(f"fit needs at least 2 observations, got {x.size}")
    bad = np.flatnonzero(~_inside(x))
    if bad.size:
        raise DomainError(f"observations must lie in (0, 1); first offending index {int(bad[0])}")
    n = int(x.size)
    sum_log = float(np.sum(np.log(x)))
    return MleFit(
        n=n,
        sum_log=sum_log,
        p_mle=-3.0 * n / (2.0 * sum_log),
        p_umvue=-(3.0 * n - 2.0) / (2.0 * sum_log),
    )


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


def _quad_unit(fn) -> float:
    value, _ = integrate.quad(fn, 0.0, 1.0, limit=400, epsabs=1e-13, epsrel=1e-12)
    return float(value)


def closed_form_diagnostics(params: ParamsLike, alpha: float = 2.0, n: int = 50) -> ClosedFormDiagnostics:
    """
    Compare printed closed forms with the implemented ones and with quadrature.

    Covers the M_alpha integral, the kurtosis display, the UMVUE variance
    factor at sample size n and the orientation of the quantile display
    (whose printed exponent has the wrong sign).
    """
    params = as_params(params)
    p = params.p
    if int(n) < 2:
        raise DomainError(f"diagnostics sample size must be >= 2, got {n!r}")
    n = int(n)
    checks = []

    if alpha * (p - 1.0) + 1.0 > 0.0:
        quad_m = _quad_unit(lambda x: pdf(params, x) ** alpha)
        checks.append(
            ClosedFormCheck(
                name=f"M_alpha(alpha={alpha:g})",
                printed=_m_alpha_as_printed(p, alpha) if p - alpha + 1.0 > 0 else math.nan,
                implemented=m_alpha(params, alpha),
                quadrature=quad_m,
            )
        )

    mu = mean(params)
    quad_c4 = _quad_unit(lambda x: (x - mu) ** 4 * pdf(params, x))
    quad_c2 = _quad_unit(lambda x: (x - mu) ** 2 * pdf(params, x))
    checks.append(
        ClosedFormCheck(
            name="kurtosis",
            printed=_kurtosis_as_printed(p),
            implemented=kurtosis(params),
            quadrature=quad_c4 / quad_c2**2,
        )
    )

    # p_umvue / p = (a - 1)/U with U = p S ~ Gamma(a, 1), a = 3n/2
    a = 1.5 * n
    u_law = stats.gamma(a)
    second, _ = integrate.quad(
        lambda u: ((a - 1.0) / u) ** 2 * u_law.pdf(u),
        float(u_law.ppf(1e-15)),
        float(u_law.isf(1e-15)),
        limit=400,
        epsabs=0.0,
        epsrel=1e-12,
    )
    checks.append(
        ClosedFormCheck(
            name=f"Var(p_umvue)/p^2(n={n})",
            printed=3.0 / (3.0 * n - 4.0),
            implemented=MleFit(n=n, sum_log=-1.0, p_mle=1.0, p_umvue=1.0).umvue_variance_factor,
            quadrature=second - 1.0,
        )
    )

    half = inv_upper_inc_gamma(1.5, 0.5 * GAMMA_3_2)
    checks.append(
        ClosedFormCheck(
            name="cdf(quantile(0.5))",
            printed=cdf(params, math.exp(half / p)),
            implemented=cdf(params, quantile(params, 0.5)),
            quadrature=0.5,
        )
    )
    for check in checks:
        if check.printed_error > 1e-8:
            logger.info("printed closed form %s differs from quadrature by %.3g", check.name, check.printed_error)
    return ClosedFormDiagnostics(p=p, checks=checks)
