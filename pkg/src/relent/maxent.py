"""Maximum-entropy projections ``argmin_{f in D} K(f || f^M)``.

Linear constraint sets give exponential tilts of the prior,
``f_j ∝ f^M_j exp(sum_a lambda_a a^a_j)``. A single constraint is solved by
safeguarded Newton on the tilt parameter; several constraints by damped
Newton on the convex dual ``ln Z(lambda) - lambda . target``, falling back to
cyclic one-dimensional updates when Newton stalls.

The closed-form special cases (unobserved category, coarse-grained
observations, symmetric observations) and the Boltzmann-Gibbs law live here
too, along with a Monte-Carlo check of the large-deviation rate.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, InfeasibleError
from .simplex import Distribution, Partition, SquareTable, probs_of, relative_entropy

FEAS_TOL = 1e-12


@dataclass(frozen=True)
class LinearConstraint:
    """Known average ``sum_j f_j a_j = target`` of an observable ``a``."""

    coeffs: np.ndarray
    target: float

    def __post_init__(self):
        a = np.array(self.coeffs, dtype=np.float64)
        if a.ndim != 1 or a.size == 0 or not np.all(np.isfinite(a)):
            raise DomainError("constraint coefficients must be a nonempty finite vector")
        target = float(self.target)
        if not math.isfinite(target):
            raise DomainError("constraint target must be finite")
        slack = FEAS_TOL * max(1.0, float(np.max(np.abs(a))))
        if not a.min() - slack <= target <= a.max() + slack:
            raise InfeasibleError(f"target {target} outside [{a.min()}, {a.max()}]")
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)
        object.__setattr__(self, "target", target)

    def residual(self, f):
        return float(np.dot(probs_of(f).ravel(), self.coeffs) - self.target)


@dataclass(frozen=True)
class MaxentResult:
    projected: Distribution
    multipliers: np.ndarray
    divergence: float
    iterations: int = 0
    converged: bool = True
    # True when the solution sits on a face of the simplex (infinite multiplier)
    boundary: bool = False


def _tilt(log_prior, a, theta):
    z = log_prior + theta * a
    z -= z.max()
    w = np.exp(z)
    return w / w.sum()


def tilted_mean(fM, coeffs, theta):
    """Mean of ``coeffs`` under the prior tilted by ``exp(theta * coeffs)``."""
    p = probs_of(fM)
    a = np.asarray(coeffs, dtype=np.float64)
    s = p > 0
    return float(np.dot(_tilt(np.log(p[s]), a[s], theta), a[s]))


def maxent_linear(fM, c, tol=1e-12, max_iter=500):
    """Project the prior onto ``{f : sum f_j a_j = target}``.

    Returns the tilt ``f_j = fM_j exp(theta a_j) / Z(theta)`` with the mean
    matched to ``tol``. Targets at the extremes of ``a`` over the support of
    the prior give the limit distribution on the extremal categories, with
    ``multipliers = [+-inf]`` and ``boundary=True``.
    """
    p = probs_of(fM)
    if p.ndim != 1:
        p = p.ravel()
    a = c.coeffs
    if a.size != p.size:
        raise DomainError(f"constraint has {a.size} coefficients for {p.size} categories")
    s = p > 0
    a_s = a[s]
    lo_a, hi_a = a_s.min(), a_s.max()
    scale = max(1.0, float(np.max(np.abs(a_s))))
    target = c.target
    if target < lo_a - FEAS_TOL * scale or target > hi_a + FEAS_TOL * scale:
        raise InfeasibleError(
            f"target {target} not attainable on the prior support (range [{lo_a}, {hi_a}])"
        )
    if hi_a - lo_a <= FEAS_TOL * scale:
        if abs(target - lo_a) <= FEAS_TOL * scale:
            return MaxentResult(Distribution(p), np.array([0.0]), 0.0)
        raise InfeasibleError("constraint is constant on the prior support")

    for extreme, sign in ((hi_a, 1.0), (lo_a, -1.0)):
        if abs(target - extreme) <= FEAS_TOL * scale:
            mask = s & (np.abs(a - extreme) <= FEAS_TOL * scale)
            out = np.where(mask, p, 0.0)
            f = Distribution(out / out.sum())
            return MaxentResult(f, np.array([sign * math.inf]), relative_entropy(f, p), boundary=True)

    log_p = np.log(p[s])

    def gap(theta):
        q = _tilt(log_p, a_s, theta)
        mean = np.dot(q, a_s)
        var = np.dot(q, (a_s - mean) ** 2)
        return mean - target, var

    lo, hi = -1.0, 1.0
    while gap(hi)[0] < 0:
        lo, hi = hi, hi * 2.0
    while gap(lo)[0] > 0:
        lo, hi = lo * 2.0, lo

    theta = 0.0 if lo < 0.0 < hi else 0.5 * (lo + hi)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        g, var = gap(theta)
        if abs(g) <= tol:
            converged = True
            break
        if g > 0:
            hi = theta
        else:
            lo = theta
        step_ok = False
        if var > 0:
            cand = theta - g / var
            step_ok = lo < cand < hi
        theta = cand if step_ok else 0.5 * (lo + hi)
        if hi - lo <= 1e-15 * max(1.0, abs(theta)):
            converged = abs(gap(theta)[0]) <= max(tol, 1e-13 * scale)
            break
    if not converged:
        raise ConvergenceError(f"tilt parameter did not converge in {max_iter} steps", iterations=it)
    out = np.zeros_like(p)
    out[s] = _tilt(log_p, a_s, theta)
    f = Distribution(out)
    return MaxentResult(f, np.array([theta]), relative_entropy(f, p), iterations=it)


def _stack(cs, m):
    if not cs:
        raise DomainError("at least one constraint is required")
    A = np.vstack([c.coeffs for c in cs])
    if A.shape[1] != m:
        raise DomainError(f"constraints have {A.shape[1]} coefficients for {m} categories")
    b = np.array([c.target for c in cs])
    return A, b


def maxent_multi(fM, cs, tol=1e-10, max_iter=10_000):
    """Project the prior onto the intersection of several linear constraints.

    The dual ``psi(lam) = ln sum_j fM_j exp(lam . A_j) - lam . b`` is minimized
    with damped Newton (least-squares steps, so redundant constraints such as
    row and column sums that both fix the total are fine). If a line search
    fails, cyclic single-coordinate updates take over.

    A feasible problem keeps ``psi >= ln(min fM_j)`` on the prior support;
    falling below that bound certifies infeasibility.
    """
    p = probs_of(fM)
    if p.ndim != 1:
        p = p.ravel()
    A, b = _stack(cs, p.size)
    s = p > 0
    As = A[:, s]
    log_p = np.log(p[s])
    floor = log_p.min()
    scale = max(1.0, float(np.max(np.abs(As))))
    for row, target in zip(As, b):
        if target < row.min() - FEAS_TOL * scale or target > row.max() + FEAS_TOL * scale:
            raise InfeasibleError(f"target {target} not attainable on the prior support")

    def state(lam):
        z = log_p + lam @ As
        zmax = z.max()
        w = np.exp(z - zmax)
        Z = w.sum()
        q = w / Z
        psi = math.log(Z) + zmax - lam @ b
        return psi, q

    q_n = len(cs)
    lam = np.zeros(q_n)
    psi, q = state(lam)
    it = 0
    converged = False
    use_newton = True
    for it in range(1, max_iter + 1):
        grad = As @ q - b
        if np.max(np.abs(grad)) <= tol:
            converged = True
            break
        if psi < floor - 1e-9:
            raise InfeasibleError("constraints are jointly infeasible (dual is unbounded below)")
        if use_newton:
            centred = As - (As @ q)[:, None]
            H = (centred * q) @ centred.T
            step = np.linalg.lstsq(H, -grad, rcond=1e-13)[0]
            t = 1.0
            slope = grad @ step
            accepted = False
            while t > 1e-12 and slope < 0:
                cand = lam + t * step
                psi_c, q_c = state(cand)
                if psi_c <= psi + 1e-4 * t * slope:
                    lam, psi, q = cand, psi_c, q_c
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                use_newton = False
            continue
        # cyclic coordinate ascent (one Newton step per coordinate)
        for k in range(q_n):
            mean = As[k] @ q
            var = q @ (As[k] - mean) ** 2
            if var <= 0:
                continue
            delta = -(mean - b[k]) / var
            t = 1.0
            while t > 1e-12:
                cand = lam.copy()
                cand[k] += t * delta
                psi_c, q_c = state(cand)
                if psi_c <= psi:
                    lam, psi, q = cand, psi_c, q_c
                    break
                t *= 0.5
        if np.max(np.abs(lam)) > 1e8:
            raise InfeasibleError("multipliers diverged; constraints are infeasible or degenerate")
    if not converged:
        raise ConvergenceError(
            f"dual solver did not reach tol={tol} in {max_iter} iterations", iterations=max_iter
        )
    out = np.zeros_like(p)
    out[s] = q
    f = Distribution(out)
    return MaxentResult(f, lam, relative_entropy(f, p), iterations=it)


def boltzmann_gibbs(E, beta):
    """``exp(-beta E_j) / Z(beta)``, evaluated with a max shift."""
    E = np.asarray(E, dtype=np.float64)
    if E.ndim != 1 or E.size == 0 or not np.all(np.isfinite(E)):
        raise DomainError("energies must be a nonempty finite vector")
    if not math.isfinite(beta):
        raise DomainError("beta must be finite")
    z = -beta * E
    z -= z.max()
    w = np.exp(z)
    return Distribution(w / w.sum())


def maxent_unobserved(fM, j0):
    """Prior conditioned on category ``j0`` not occurring."""
    p = probs_of(fM)
    if not 0 <= j0 < p.size:
        raise DomainError(f"category {j0} out of range")
    if p[j0] >= 1.0:
        raise InfeasibleError("the excluded category carries all the prior mass")
    out = p.copy()
    out[j0] = 0.0
    out /= 1.0 - p[j0]
    f = Distribution(out)
    return MaxentResult(f, np.array([-math.inf]), -math.log1p(-p[j0]), boundary=p[j0] > 0)


def maxent_coarse(fM, partition, FD):
    """Prior rescaled within groups to match observed group totals ``F^D``."""
    p = probs_of(fM)
    if not isinstance(partition, Partition):
        partition = Partition(partition)
    FD = probs_of(FD)
    if partition.m != p.size or FD.size != partition.n_groups:
        raise DomainError("partition does not match the prior or group totals")
    FM = partition.aggregate(p)
    bad = (FM == 0) & (FD > 0)
    if np.any(bad):
        raise InfeasibleError(f"groups {np.flatnonzero(bad).tolist()} observed but impossible under the prior")
    ratio = np.zeros_like(FM)
    np.divide(FD, FM, out=ratio, where=FM > 0)
    f = Distribution(p * ratio[partition.group_of])
    with np.errstate(divide="ignore"):
        mult = np.where(FM > 0, np.log(ratio, where=ratio > 0, out=np.full_like(ratio, -np.inf)), 0.0)
    return MaxentResult(f, mult, relative_entropy(FD, FM))


def maxent_symmetric(fM):
    """Prior projected onto symmetric tables: ``sqrt(f_jk f_kj) / Z``."""
    if not isinstance(fM, SquareTable):
        fM = SquareTable(probs_of(fM))
    g = np.sqrt(fM.probs * fM.probs.T)
    Z = g.sum()
    if Z <= 0:
        raise InfeasibleError("prior has no symmetric mass (Z = 0)")
    f = fM._like(g / Z)
    return MaxentResult(f, np.array([]), relative_entropy(f.probs, fM.probs))


# gravity-model constraint families on flattened m x m flow tables

def origin_constraints(row_targets):
    """Fixed origin profiles: one constraint ``sum_k f_jk = row_targets[j]`` per row."""
    row_targets = np.asarray(row_targets, dtype=np.float64)
    m = row_targets.size
    out = []
    for j in range(m):
        a = np.zeros((m, m))
        a[j, :] = 1.0
        out.append(LinearConstraint(a.ravel(), row_targets[j]))
    return out


def destination_constraints(col_targets):
    col_targets = np.asarray(col_targets, dtype=np.float64)
    m = col_targets.size
    out = []
    for k in range(m):
        a = np.zeros((m, m))
        a[:, k] = 1.0
        out.append(LinearConstraint(a.ravel(), col_targets[k]))
    return out


def distance_constraint(d, mean_distance):
    """Fixed average trip distance (or cost) over a symmetric distance matrix."""
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DomainError("distance matrix must be square")
    return LinearConstraint(d.ravel(), mean_distance)


def stayers_constraint(m, proportion):
    return LinearConstraint(np.eye(m).ravel(), proportion)


def balance_constraints(m):
    """Balanced flows: inflow equals outflow at every place."""
    out = []
    for alpha in range(m):
        a = np.zeros((m, m))
        a[alpha, :] += 1.0
        a[:, alpha] -= 1.0
        out.append(LinearConstraint(a.ravel(), 0.0))
    return out


@dataclass
class SanovReport:
    n_values: list
    trials: int
    method: str
    event: str
    threshold: float
    hits: list
    estimates: list
    rates: list
    flagged: list
    fitted_rate: float
    theoretical_rate: float
    seed: int
    batches: int
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "n_values": list(self.n_values),
            "trials": self.trials,
            "method": self.method,
            "event": self.event,
            "threshold": self.threshold,
            "hits": list(self.hits),
            "estimates": list(self.estimates),
            "rates": list(self.rates),
            "flagged": list(self.flagged),
            "fitted_rate": self.fitted_rate,
            "theoretical_rate": self.theoretical_rate,
            "seed": self.seed,
            "batches": self.batches,
            "notes": list(self.notes),
        }


def _batch_sizes(trials, batches):
    base, extra = divmod(trials, batches)
    return [base + (1 if b < extra else 0) for b in range(batches)]


def _run_batch(args):
    seed, n_index, b, size, n, sample_probs, a, threshold, upper, log_ratio = args
    rng = np.random.default_rng([seed, n_index, b])
    counts = rng.multinomial(n, sample_probs, size=size)
    mean = counts @ a / n
    if upper:
        event = mean >= threshold - 1e-12
    else:
        event = mean <= threshold + 1e-12
    hits = int(event.sum())
    if log_ratio is None:
        return hits, float(hits)
    lw = counts[event] @ log_ratio
    return hits, float(np.exp(lw).sum())


def sanov_mc_check(fM, c, n_values, trials, seed, method="tilted", batches=1, threads=1):
    """Monte-Carlo estimate of ``P(mean of a over n draws crosses target)``.

    The event is one-sided: ``mean >= target`` when the target exceeds the
    prior mean, ``mean <= target`` otherwise. Its probability decays like
    ``exp(-n K(f~||fM))`` with ``f~`` the maxent projection. ``fitted_rate``
    is the least-squares slope of ``-ln p_n`` against ``n``.

    ``method="direct"`` counts hits among samples from ``fM``; rare events give
    zero hits, which are flagged. ``method="tilted"`` draws from ``f~`` and
    reweights each sample by its likelihood ratio, an unbiased estimator of
    the same probability that stays usable far into the tail.

    Batches use independent streams seeded by ``(seed, n_index, batch)`` and
    are summed in order, so results do not depend on ``threads``.
    """
    if trials < 1:
        raise DomainError("trials must be positive")
    if batches < 1 or batches > trials:
        raise DomainError("batches must lie in [1, trials]")
    if method not in ("direct", "tilted"):
        raise DomainError(f"unknown method {method!r}")
    p = probs_of(fM)
    a = c.coeffs
    proj = maxent_linear(p, c)
    tilde = proj.projected.probs
    prior_mean = float(p @ a)
    upper = c.target >= prior_mean
    if method == "tilted":
        sample_probs = tilde
        s = tilde > 0
        log_ratio = np.zeros_like(p)
        log_ratio[s] = np.log(p[s]) - np.log(tilde[s])
    else:
        sample_probs = p
        log_ratio = None

    hits, estimates, rates, flagged = [], [], [], []
    sizes = _batch_sizes(int(trials), int(batches))
    for n_index, n in enumerate(n_values):
        if n < 1:
            raise DomainError("sample sizes must be positive")
        jobs = [(seed, n_index, b, size, int(n), sample_probs, a, c.target, upper, log_ratio)
                for b, size in enumerate(sizes)]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                results = list(ex.map(_run_batch, jobs))
        else:
            results = [_run_batch(j) for j in jobs]
        h = sum(r[0] for r in results)
        est = sum(r[1] for r in results) / trials
        hits.append(h)
        estimates.append(est)
        flagged.append(h == 0)
        rates.append(-math.log(est) / n if est > 0 else math.inf)

    good = [i for i, fl in enumerate(flagged) if not fl]
    notes = []
    if len(good) >= 2:
        ns = np.array([n_values[i] for i in good], dtype=float)
        y = np.array([-math.log(estimates[i]) for i in good])
        slope = float(np.polyfit(ns, y, 1)[0])
    else:
        slope = math.nan
        notes.append("fewer than two sample sizes with hits; slope not fitted")
    if any(flagged):
        notes.append("zero hits at some sample sizes")
    return SanovReport(
        n_values=[int(n) for n in n_values],
        trials=int(trials),
        method=method,
        event="mean >= threshold" if upper else "mean <= threshold",
        threshold=c.target,
        hits=hits,
        estimates=estimates,
        rates=rates,
        flagged=flagged,
        fitted_rate=slope,
        theoretical_rate=proj.divergence,
        seed=int(seed),
        batches=int(batches),
        notes=notes,
    )
