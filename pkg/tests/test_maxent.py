import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from relent.errors import DomainError, InfeasibleError
from relent.estimators import fit_quasi_symmetry, fit_symmetry
from relent.maxent import (
    LinearConstraint,
    boltzmann_gibbs,
    destination_constraints,
    distance_constraint,
    maxent_coarse,
    maxent_linear,
    maxent_multi,
    maxent_symmetric,
    maxent_unobserved,
    origin_constraints,
    sanov_mc_check,
    stayers_constraint,
    tilted_mean,
)
from relent.simplex import Partition, coarse_grain, entropy

from conftest import random_simplex

DICE = np.full(6, 1 / 6)
FACES = np.arange(1, 7, dtype=float)


def _kl(p, q):
    p, q = np.ravel(p), np.ravel(q)
    s = p > 0
    return float(np.sum(p[s] * np.log(p[s] / q[s])))


def _feasible_directions(a):
    """Orthonormal basis of vectors orthogonal to both 1 and a."""
    m = a.size
    q, _ = np.linalg.qr(np.column_stack([np.ones(m), a, np.eye(m)]))
    return q[:, 2:]


class TestConstraint:
    def test_infeasible_target(self):
        with pytest.raises(InfeasibleError):
            LinearConstraint(FACES, 6.5)

    def test_residual(self):
        c = LinearConstraint(FACES, 4.0)
        assert c.residual(DICE) == pytest.approx(-0.5)


class TestLinear:
    def test_prior_mean_gives_zero_tilt(self):
        r = maxent_linear(DICE, LinearConstraint(FACES, 3.5))
        assert r.multipliers[0] == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(r.projected.probs, DICE, atol=1e-14)

    def test_dice_against_brentq(self):
        theta = brentq(lambda t: np.dot(FACES, np.exp(t * FACES)) / np.exp(t * FACES).sum() - 4.0, -5, 5, xtol=1e-15)
        r = maxent_linear(DICE, LinearConstraint(FACES, 4.0))
        assert r.multipliers[0] == pytest.approx(theta, abs=1e-10)
        w = np.exp(theta * FACES)
        np.testing.assert_allclose(r.projected.probs, w / w.sum(), atol=1e-12)

    def test_dice_frozen(self):
        # frozen from the brentq oracle above
        r = maxent_linear(DICE, LinearConstraint(FACES, 4.0))
        assert r.multipliers[0] == pytest.approx(0.174629, abs=1e-6)
        np.testing.assert_allclose(
            r.projected.probs, [0.103065, 0.122731, 0.146148, 0.174034, 0.207240, 0.246782], atol=1e-6
        )
        assert r.projected.probs @ FACES == pytest.approx(4.0, abs=1e-12)

    def test_upper_boundary(self):
        r = maxent_linear(DICE, LinearConstraint(FACES, 6.0))
        assert r.boundary and r.multipliers[0] == math.inf
        np.testing.assert_array_equal(r.projected.probs, [0, 0, 0, 0, 0, 1])
        assert r.divergence == pytest.approx(math.log(6))

    def test_lower_boundary_ties(self):
        a = np.array([1.0, 1.0, 2.0, 3.0])
        r = maxent_linear([0.1, 0.3, 0.3, 0.3], LinearConstraint(a, 1.0))
        np.testing.assert_allclose(r.projected.probs, [0.25, 0.75, 0, 0])
        assert r.multipliers[0] == -math.inf

    def test_degenerate_constraint(self):
        a = np.array([2.0, 2.0, 5.0])
        with pytest.raises(InfeasibleError):
            maxent_linear([0.5, 0.5, 0.0], LinearConstraint(a, 3.0))
        r = maxent_linear([0.5, 0.5, 0.0], LinearConstraint(a, 2.0))
        np.testing.assert_allclose(r.projected.probs, [0.5, 0.5, 0.0])

    @given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
    def test_convex_pythagoras(self, seed, frac):
        rng = np.random.default_rng(seed)
        m = 6
        fM = random_simplex(rng, m, 0.01)
        a = rng.normal(size=m)
        target = a.min() + frac * (a.max() - a.min())
        r = maxent_linear(fM, LinearConstraint(a, target))
        ft = r.projected.probs
        assert abs(ft @ a - target) <= 1e-10
        basis = _feasible_directions(a)
        v = basis @ rng.normal(size=basis.shape[1])
        neg = v < 0
        tmax = np.min(ft[neg] / -v[neg]) if neg.any() else 1.0
        f = ft + 0.9 * tmax * v
        assert f @ a == pytest.approx(target, abs=1e-10)
        assert _kl(f, fM) == pytest.approx(_kl(f, ft) + _kl(ft, fM), abs=1e-8)

    @given(st.integers(0, 2**32 - 1))
    def test_tilted_mean_monotone(self, seed):
        rng = np.random.default_rng(seed)
        fM = random_simplex(rng, 5, 0.01)
        a = rng.normal(size=5)
        means = [tilted_mean(fM, a, t) for t in np.linspace(-3, 3, 61)]
        assert np.all(np.diff(means) > 0)

    def test_maximizes_entropy_under_uniform_prior(self):
        rng = np.random.default_rng(5)
        r = maxent_linear(DICE, LinearConstraint(FACES, 4.5))
        ft = r.projected.probs
        h = entropy(ft)
        basis = _feasible_directions(FACES)
        for _ in range(2000):
            v = basis @ rng.normal(size=basis.shape[1])
            neg = v < 0
            t = rng.uniform(0, 1) * np.min(ft[neg] / -v[neg])
            assert entropy(ft + t * v) <= h + 1e-9


class TestMulti:
    def test_single_constraint_reduces(self):
        c = LinearConstraint(FACES, 4.0)
        a = maxent_linear(DICE, c).projected.probs
        b = maxent_multi(DICE, [c]).projected.probs
        np.testing.assert_allclose(a, b, atol=1e-9)

    def test_gravity_product_form(self):
        rng = np.random.default_rng(21)
        m = 4
        prior = rng.dirichlet(np.ones(m * m))
        rows, cols = rng.dirichlet(np.ones(m)), rng.dirichlet(np.ones(m))
        cs = origin_constraints(rows) + destination_constraints(cols)[:-1]
        r = maxent_multi(prior, cs)
        f = r.projected.probs.reshape(m, m)
        np.testing.assert_allclose(f.sum(1), rows, atol=1e-10)
        np.testing.assert_allclose(f.sum(0), cols, atol=1e-10)
        # log(f / prior) = u_j + v_k: double-centred residual vanishes
        lr = np.log(f / prior.reshape(m, m))
        resid = lr - lr.mean(1, keepdims=True) - lr.mean(0, keepdims=True) + lr.mean()
        assert np.max(np.abs(resid)) < 1e-8

    def test_quasi_symmetric_prior_stays_quasi_symmetric(self):
        rng = np.random.default_rng(4)
        m = 4
        a, b = rng.uniform(0.5, 2, m), rng.uniform(0.5, 2, m)
        c = rng.uniform(0.5, 2, (m, m))
        prior = np.outer(a, b) * (c + c.T)
        prior /= prior.sum()
        pts = rng.uniform(size=(m, 2))
        d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
        mean_d = float((prior * d).sum()) * 0.8
        cs = origin_constraints(prior.sum(1) * 0.5 + 0.5 / m)[:-1] + [distance_constraint(d, mean_d)]
        f = maxent_multi(prior.ravel(), cs).projected.probs.reshape(m, m)
        assert (f * d).sum() == pytest.approx(mean_d, abs=1e-9)
        # a QS table is its own QS fit
        np.testing.assert_allclose(fit_quasi_symmetry(f, tol=1e-13).fitted.probs, f, atol=1e-10)
        assert fit_symmetry(f).divergence > 1e-6

    def test_stayers(self):
        m = 3
        prior = np.full(m * m, 1 / m**2)
        f = maxent_multi(prior, [stayers_constraint(m, 0.6)]).projected.probs.reshape(m, m)
        assert np.trace(f) == pytest.approx(0.6, abs=1e-10)
        np.testing.assert_allclose(np.diag(f), 0.2, atol=1e-10)

    def test_infeasible_pair(self):
        cs = [LinearConstraint([1, 0, 0], 0.8), LinearConstraint([0, 1, 0], 0.5)]
        with pytest.raises(InfeasibleError):
            maxent_multi([1 / 3] * 3, cs)


class TestClosedForms:
    def test_gibbs(self):
        np.testing.assert_allclose(boltzmann_gibbs([0.0, math.log(2)], 1.0).probs, [2 / 3, 1 / 3])
        np.testing.assert_allclose(boltzmann_gibbs([3.0, 1.0, 2.0], 0.0).probs, [1 / 3] * 3)
        np.testing.assert_allclose(boltzmann_gibbs([3.0, 1.0, 1.0, 2.0], 1e6).probs, [0, 0.5, 0.5, 0])

    def test_gibbs_is_maxent_of_uniform(self):
        E = np.array([0.3, 1.2, -0.5, 2.0])
        g = boltzmann_gibbs(E, 1.7).probs
        r = maxent_linear(np.full(4, 0.25), LinearConstraint(-E, float(-(g @ E))))
        np.testing.assert_allclose(r.projected.probs, g, atol=1e-12)
        assert r.multipliers[0] == pytest.approx(1.7, abs=1e-9)

    def test_unobserved(self):
        r = maxent_unobserved([0.5, 0.5], 0)
        np.testing.assert_allclose(r.projected.probs, [0.0, 1.0])
        assert r.divergence == pytest.approx(math.log(2))
        r = maxent_unobserved([0.0, 0.4, 0.6], 0)
        assert r.divergence == 0.0
        with pytest.raises(InfeasibleError):
            maxent_unobserved([1.0, 0.0], 0)

    @given(st.integers(0, 2**32 - 1))
    def test_unobserved_formula(self, seed):
        rng = np.random.default_rng(seed)
        fM = random_simplex(rng, 5, 0.01)
        r = maxent_unobserved(fM, 2)
        assert r.divergence == pytest.approx(-math.log(1 - fM[2]), abs=1e-12)
        assert r.divergence == pytest.approx(_kl(r.projected.probs, fM), abs=1e-12)

    def test_coarse(self):
        r = maxent_coarse([0.25, 0.25, 0.5], Partition([0, 0, 1]), [0.8, 0.2])
        np.testing.assert_allclose(r.projected.probs, [0.4, 0.4, 0.2])
        fM = np.array([0.1, 0.2, 0.3, 0.4])
        p = Partition([0, 1, 1, 0])
        np.testing.assert_allclose(maxent_coarse(fM, p, coarse_grain(fM, p).probs).projected.probs, fM)

    @given(st.integers(0, 2**32 - 1))
    def test_coarse_divergence(self, seed):
        rng = np.random.default_rng(seed)
        fM = random_simplex(rng, 6, 0.01)
        p = Partition([0, 1, 2, 0, 1, 2])
        FD = rng.dirichlet(np.ones(3))
        r = maxent_coarse(fM, p, FD)
        assert r.divergence == pytest.approx(_kl(FD, coarse_grain(fM, p).probs), abs=1e-12)
        assert r.divergence == pytest.approx(_kl(r.projected.probs, fM), abs=1e-12)

    def test_symmetric(self):
        np.testing.assert_allclose(maxent_symmetric(np.array([[0.5, 0.5], [0, 0]])).projected.probs, [[1, 0], [0, 0]])
        s = np.array([[0.1, 0.2], [0.2, 0.5]])
        np.testing.assert_allclose(maxent_symmetric(s).projected.probs, s)

    def test_symmetric_differs_from_ml_symmetrization(self):
        t = np.array([[0.1, 0.4], [0.1, 0.4]])
        geo = maxent_symmetric(t).projected.probs
        ari = fit_symmetry(t).fitted.probs
        assert np.max(np.abs(geo - ari)) > 0.01
        np.testing.assert_allclose(geo, geo.T)

    def test_symmetric_zero_mass(self):
        with pytest.raises(InfeasibleError):
            maxent_symmetric(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestSanov:
    def test_zero_trials(self):
        with pytest.raises(DomainError):
            sanov_mc_check([0.5, 0.5], LinearConstraint([1, 0], 0.7), [10], 0, seed=1)

    def test_prior_mean_rate_near_zero(self):
        rep = sanov_mc_check([0.5, 0.5], LinearConstraint([1, 0], 0.5), [20, 40, 80], 20000, seed=3, method="direct")
        assert abs(rep.fitted_rate) < 0.005
        assert rep.theoretical_rate == pytest.approx(0.0, abs=1e-15)

    def test_thread_count_irrelevant(self):
        kw = dict(n_values=[30, 60], trials=5000, seed=9, batches=4)
        c = LinearConstraint([1, 0], 0.7)
        a = sanov_mc_check([0.5, 0.5], c, threads=1, **kw).to_dict()
        b = sanov_mc_check([0.5, 0.5], c, threads=4, **kw).to_dict()
        assert a == b

    def test_direct_flags_empty_sizes(self):
        rep = sanov_mc_check([0.5, 0.5], LinearConstraint([1, 0], 0.9), [10, 400], 2000, seed=2, method="direct")
        assert rep.hits[1] == 0 and rep.flagged == [False, True]

    def test_lower_tail_event(self):
        rep = sanov_mc_check([0.5, 0.5], LinearConstraint([1, 0], 0.3), [50, 100], 20000, seed=2)
        assert rep.event.startswith("mean <=") or "<=" in rep.event
        assert rep.fitted_rate == pytest.approx(0.0823, rel=0.15)
