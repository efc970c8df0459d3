"""Bayesian selection among simple hypotheses, and Dirichlet posterior means.

The posterior over hypotheses is taken as exactly proportional to
``P(g_a) exp(-n K(fD || g_a))``: the rate expression normalized over the
finite set. Everything is accumulated in log space since ``exp(-n K)``
underflows for moderate ``n``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .simplex import Distribution, probs_of, relative_entropy


@dataclass(frozen=True, eq=False)
class HypothesisSet:
    """Competing models ``g_a`` with strictly positive prior weights.

    Priors need not be normalized; they are rescaled to sum to one.
    """

    models: tuple
    priors: Distribution

    def __post_init__(self):
        models = tuple(m if isinstance(m, Distribution) else Distribution(m) for m in self.models)
        if not models:
            raise DomainError("at least one hypothesis is required")
        sizes = {m.m for m in models}
        if len(sizes) != 1:
            raise DomainError(f"models have different lengths {sorted(sizes)}")
        w = np.asarray(probs_of(self.priors) if isinstance(self.priors, Distribution) else self.priors,
                       dtype=np.float64)
        if w.shape != (len(models),):
            raise DomainError(f"{w.size} priors for {len(models)} models")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise DomainError("prior weights must be finite and strictly positive")
        object.__setattr__(self, "models", models)
        object.__setattr__(self, "priors", Distribution(w / w.sum()))

    @classmethod
    def uniform(cls, models):
        return cls(tuple(models), np.ones(len(models)))

    @property
    def q(self):
        return len(self.models)


def _divergences(h, fD):
    p = probs_of(fD)
    if p.size != h.models[0].m:
        raise DomainError(f"data has {p.size} categories, models have {h.models[0].m}")
    return np.array([relative_entropy(p, g) for g in h.models])


def _check_n(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n}")
    return int(n)


def posterior_over_hypotheses(h, fD, n):
    """Posterior ``P(g_a | D) ∝ P(g_a) exp(-n K(fD||g_a))``.

    Hypotheses that give zero probability to an observed category get
    posterior zero. If all of them do, :class:`DomainError` is raised.
    """
    n = _check_n(n)
    k = _divergences(h, fD)
    finite = np.isfinite(k)
    if not finite.any():
        raise DomainError("every hypothesis excludes some observed category")
    logw = np.full(k.shape, -np.inf)
    logw[finite] = np.log(h.priors.probs[finite]) - n * k[finite]
    logw -= logw[finite].max()
    w = np.exp(logw)
    return Distribution(w / w.sum())


def penalized_score(h, fD, n):
    """``K(fD||g_a) - ln P(g_a) / n``; smaller is better, ``argmin`` is the MAP choice."""
    n = _check_n(n)
    return _divergences(h, fD) - np.log(h.priors.probs) / n


def select(h, fD, n):
    """Index of the MAP hypothesis (lowest index on ties)."""
    return int(np.argmin(penalized_score(h, fD, n)))


@dataclass(frozen=True, eq=False)
class DirichletParams:
    alpha_vec: np.ndarray

    def __post_init__(self):
        a = np.array(self.alpha_vec, dtype=np.float64)
        if a.ndim != 1 or a.size == 0 or not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise DomainError("Dirichlet parameters must be a nonempty vector of positive reals")
        a.setflags(write=False)
        object.__setattr__(self, "alpha_vec", a)

    @classmethod
    def from_guess(cls, pi, alpha_total):
        """Parameters with prior guess ``pi`` and total strength ``alpha_total``."""
        if not alpha_total > 0 or math.isinf(alpha_total):
            raise DomainError("alpha_total must be positive and finite")
        return cls(alpha_total * probs_of(pi))

    @property
    def alpha_total(self):
        return float(self.alpha_vec.sum())

    @property
    def pi(self):
        return Distribution(self.alpha_vec / self.alpha_total)


def dirichlet_posterior_mean(d, counts):
    """Posterior mean ``lam * pi + (1 - lam) * fD`` with ``lam = alpha / (alpha + n)``.

    >>> dirichlet_posterior_mean(DirichletParams([1.0, 1.0]), [2, 0]).probs.tolist()
    [0.75, 0.25]
    """
    counts = np.asarray(counts, dtype=np.float64)
    if counts.shape != d.alpha_vec.shape:
        raise DomainError(f"{counts.size} counts for {d.alpha_vec.size} categories")
    if np.any(counts < 0) or not np.all(np.isfinite(counts)):
        raise DomainError("counts must be nonnegative")
    n = counts.sum()
    pi = d.alpha_vec / d.alpha_total
    if n == 0:
        return Distribution(pi)
    lam = d.alpha_total / (d.alpha_total + n)
    return Distribution(lam * pi + (1.0 - lam) * counts / n)
