"""Regularized incomplete gamma function and the chi-square distribution.

P(s, x) is evaluated by its power series when ``x < s + 1`` and through the
complement Q(s, x) = 1 - P(s, x), computed with a Lentz continued fraction,
otherwise. Both branches converge quickly in their own region and neither
subtracts nearly equal quantities.
"""

import math

from .errors import ConvergenceError, DomainError

EPS = 1e-16
TINY = 1e-300
MAX_ITER = 10_000


def _log_prefactor(s, x):
    # log(x^s e^-x / Gamma(s))
    return s * math.log(x) - x - math.lgamma(s)


def _series_p(s, x):
    term = 1.0 / s
    total = term
    a = s
    for _ in range(MAX_ITER):
        a += 1.0
        term *= x / a
        total += term
        if abs(term) < abs(total) * EPS:
            return total * math.exp(_log_prefactor(s, x))
    raise ConvergenceError(f"gamma series did not converge for s={s}, x={x}")


def _continued_fraction_q(s, x):
    # modified Lentz for Q(s,x) = e^-x x^s / Gamma(s) * 1/(x+1-s- 1(1-s)/(x+3-s- ...))
    b = x + 1.0 - s
    c = 1.0 / TINY
    d = 1.0 / b
    h = d
    for i in range(1, MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < TINY:
            d = TINY
        c = b + an / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return math.exp(_log_prefactor(s, x)) * h
    raise ConvergenceError(f"gamma continued fraction did not converge for s={s}, x={x}")


def _check_gamma_args(s, x):
    if not s > 0 or math.isinf(s):
        raise DomainError(f"shape s must be positive and finite, got {s}")
    if not x >= 0:
        raise DomainError(f"x must be nonnegative, got {x}")


def regularized_gamma_p(s, x):
    """Lower regularized incomplete gamma function P(s, x).

    Parameters
    ----------
    s : float
        Shape, ``s > 0``.
    x : float
        Upper integration limit, ``x >= 0``. ``inf`` is accepted and gives 1.

    Returns
    -------
    float
        ``gamma(s, x) / Gamma(s)`` in [0, 1].
    """
    s = float(s)
    x = float(x)
    _check_gamma_args(s, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < s + 1.0:
        return min(1.0, _series_p(s, x))
    return max(0.0, 1.0 - _continued_fraction_q(s, x))


def regularized_gamma_q(s, x):
    """Upper regularized incomplete gamma function Q(s, x) = 1 - P(s, x)."""
    s = float(s)
    x = float(x)
    _check_gamma_args(s, x)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < s + 1.0:
        return max(0.0, 1.0 - _series_p(s, x))
    return min(1.0, _continued_fraction_q(s, x))


def _check_df(df):
    if isinstance(df, bool) or int(df) != df or df < 1:
        raise DomainError(f"degrees of freedom must be a positive integer, got {df}")
    return int(df)


def chi2_cdf(x, df):
    """Chi-square distribution function with ``df`` degrees of freedom."""
    df = _check_df(df)
    if not x >= 0:
        raise DomainError(f"x must be nonnegative, got {x}")
    return regularized_gamma_p(df / 2.0, x / 2.0)


def chi2_sf(x, df):
    """Survival function ``1 - chi2_cdf(x, df)``, accurate in the upper tail."""
    df = _check_df(df)
    if not x >= 0:
        raise DomainError(f"x must be nonnegative, got {x}")
    return regularized_gamma_q(df / 2.0, x / 2.0)


def chi2_pdf(x, df):
    df = _check_df(df)
    if x < 0:
        return 0.0
    k = df / 2.0
    if x == 0.0:
        if df == 1:
            return math.inf
        return 0.5 if df == 2 else 0.0
    return math.exp((k - 1.0) * math.log(x) - x / 2.0 - k * math.log(2.0) - math.lgamma(k))


def chi2_quantile(p, df, max_iter=500):
    """Inverse of :func:`chi2_cdf`.

    A bracket ``[lo, hi]`` with ``cdf(lo) <= p <= cdf(hi)`` is kept at all
    times; Newton steps are taken when they land inside it and bisection is
    used otherwise. For ``p > 1/2`` the residual is measured on the survival
    function so upper quantiles keep full relative accuracy.
    """
    df = _check_df(df)
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    return _solve_quantile(p, 1.0 - p, df, max_iter)


def chi2_isf(q, df, max_iter=500):
    """Inverse survival function: ``x`` with ``chi2_sf(x, df) = q``.

    Use this instead of ``chi2_quantile(1 - q, df)`` when ``q`` is tiny, where
    ``1 - q`` would round to 1.
    """
    df = _check_df(df)
    q = float(q)
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    return _solve_quantile(1.0 - q, q, df, max_iter)


def _solve_quantile(p, q, df, max_iter):
    upper = q < 0.5

    def residual(x):
        # positive when x is above the quantile
        if upper:
            return q - chi2_sf(x, df)
        return chi2_cdf(x, df) - p

    lo, hi = 0.0, max(1.0, float(df))
    while residual(hi) < 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise ConvergenceError("could not bracket chi-square quantile")

    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f = residual(x)
        if f == 0.0:
            return x
        if f > 0.0:
            hi = x
        else:
            lo = x
        dens = chi2_pdf(x, df)
        step_ok = False
        if dens > 0.0 and math.isfinite(dens):
            x_new = x - f / dens
            step_ok = lo < x_new < hi
        if not step_ok:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 4.0 * EPS * max(x_new, TINY) or hi - lo <= 4.0 * EPS * hi:
            return x_new
        x = x_new
    raise ConvergenceError(f"chi-square quantile did not converge (p={p}, df={df})", iterations=max_iter)
