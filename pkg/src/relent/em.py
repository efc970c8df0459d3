"""EM for finite mixtures with fixed components, as alternating KL projections.

The complete-data space has cells ``(J, q)``: group ``J`` observed, component
``q`` latent. The E-step projects the current joint ``g_Jq = rho_q h^q_J``
onto the distributions whose ``J``-margin equals the observed ``F`` (a
rescaling within groups); the M-step projects back onto the mixture family by
reading off ``rho_q = sum_J f_Jq``. Composing both gives the multiplicative
update ``rho_q <- rho_q sum_J h^q_J F_J / G_J``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError
from .simplex import Distribution, probs_of, relative_entropy

RHO_FLOOR = 1e-15
DESCENT_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class MixtureProblem:
    components: np.ndarray  # shape (c, M), one fixed distribution per row
    observed: Distribution

    def __post_init__(self):
        H = np.array([probs_of(h) for h in self.components], dtype=np.float64)
        if H.ndim != 2 or H.shape[0] < 1:
            raise DomainError("need at least one component distribution")
        F = self.observed if isinstance(self.observed, Distribution) else Distribution(self.observed)
        if F.m != H.shape[1]:
            raise DomainError(f"observed has {F.m} groups, components have {H.shape[1]}")
        uncovered = (F.probs > 0) & (H.sum(axis=0) == 0)
        if np.any(uncovered):
            raise DomainError(f"observed groups {np.flatnonzero(uncovered).tolist()} lie outside every component")
        H.setflags(write=False)
        object.__setattr__(self, "components", H)
        object.__setattr__(self, "observed", F)

    @property
    def c(self):
        return self.components.shape[0]

    @property
    def M(self):
        return self.components.shape[1]


@dataclass
class EMTrace:
    rho: Distribution
    divergence_path: list
    iterations: int
    converged: bool

    def to_dict(self):
        return {
            "rho": self.rho.probs.tolist(),
            "divergence_path": list(self.divergence_path),
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _rho(p, rho):
    r = probs_of(rho)
    if r.shape != (p.c,):
        raise DomainError(f"rho has {r.size} weights for {p.c} components")
    return r


def mixture_predict(p, rho):
    """Additive mixture ``G_J = sum_q rho_q h^q_J``."""
    return Distribution(_rho(p, rho) @ p.components)


def em_step(p, rho):
    G = rho @ p.components
    ratio = np.zeros_like(G)
    np.divide(p.observed.probs, G, out=ratio, where=G > 0)
    return rho * (p.components @ ratio)


def em_fit(p, rho0=None, tol=1e-10, max_iter=10_000):
    """Fit mixture weights by EM, stopping on ``max |rho' - rho| < tol``.

    Non-convergence is reported through ``converged=False`` rather than an
    exception. ``rho0`` defaults to uniform and must be strictly positive, since
    a zero weight never moves under the multiplicative update.
    """
    rho = np.full(p.c, 1.0 / p.c) if rho0 is None else _rho(p, rho0).copy()
    if np.any(rho <= 0):
        raise DomainError("initial weights must be strictly positive")
    F = p.observed.probs
    path = [relative_entropy(F, rho @ p.components)]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        new = np.maximum(em_step(p, rho), RHO_FLOOR)
        new /= new.sum()
        path.append(relative_entropy(F, new @ p.components))
        delta = np.max(np.abs(new - rho))
        rho = new
        if delta < tol:
            converged = True
            break
    return EMTrace(Distribution(rho), path, it, converged)


@dataclass
class AltMinTrace:
    f: np.ndarray
    g: np.ndarray
    divergence_path: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def alternating_minimize(project_F, project_G, g0, tol=1e-10, max_iter=10_000):
    """Alternate ``f = project_F(g)`` and ``g = project_G(f)`` from ``g0``.

    ``divergence_path`` records ``K(f_n||g_n)`` with ``f_n = project_F(g_n)``. A
    projection that raises the objective by more than 1e-12 violates its
    contract and raises :class:`ConvergenceError`. Stops when ``g`` moves by
    less than ``tol`` (max-norm).
    """
    g = np.asarray(probs_of(g0), dtype=np.float64)
    path = []
    prev = np.inf
    f = g
    it = 0
    for it in range(1, max_iter + 1):
        f = np.asarray(project_F(g), dtype=np.float64)
        k_e = relative_entropy(f, g)
        if k_e > prev + DESCENT_SLACK:
            raise ConvergenceError(f"F-projection increased the objective ({prev} -> {k_e})", iterations=it)
        g_new = np.asarray(project_G(f), dtype=np.float64)
        k_m = relative_entropy(f, g_new)
        if k_m > k_e + DESCENT_SLACK:
            raise ConvergenceError(f"G-projection increased the objective ({k_e} -> {k_m})", iterations=it)
        path.append(k_e)
        prev = k_m
        moved = np.max(np.abs(g_new - g))
        g = g_new
        if moved < tol:
            return AltMinTrace(f, g, path, it, True)
    return AltMinTrace(f, g, path, it, False)


def em_projections(p):
    """E- and M-step projections on the ``(M, c)`` complete-data table, plus a starting point."""
    H = p.components
    F = p.observed.probs

    def project_F(g):
        # rescale within each observed group J to match F_J
        G = g.sum(axis=1)
        ratio = np.zeros_like(G)
        np.divide(F, G, out=ratio, where=G > 0)
        return g * ratio[:, None]

    def project_G(f):
        rho = f.sum(axis=0)
        return H.T * rho[None, :]

    def start(rho0=None):
        rho = np.full(p.c, 1.0 / p.c) if rho0 is None else _rho(p, rho0)
        return H.T * rho[None, :]

    return project_F, project_G, start
