import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar
from scipy.stats import chi2 as sp_chi2

from relent.errors import DomainError
from relent.estimators import fit_independence, fit_quasi_symmetry, fit_symmetry
from relent.hypothesis_tests import (
    TestReport,
    chernoff_information,
    np_mixture,
    np_solve_mu,
    report_from_statistic,
    test_composite as composite,
    test_independence as independence,
    test_nested as nested,
    test_simple as simple,
)
from relent.simplex import relative_entropy

from conftest import random_simplex


def _kl(p, q):
    p, q = np.asarray(p, float), np.asarray(q, float)
    s = p > 0
    return float(np.sum(p[s] * np.log(p[s] / q[s])))


def _chernoff_oracle(f0, f1):
    f0, f1 = np.asarray(f0, float), np.asarray(f1, float)
    common = (f0 > 0) & (f1 > 0)
    a, b = f0[common], f1[common]

    def lnz(mu):
        return math.log(np.sum(a**mu * b ** (1 - mu)))

    res = minimize_scalar(lnz, bounds=(0, 1), method="bounded", options={"xatol": 1e-12})
    return -min(res.fun, lnz(0.0), lnz(1.0))


class TestReportShape:
    def test_json_fields_exact(self):
        rep = report_from_statistic(3.0, 2, 0.05)
        assert list(rep.to_dict()) == ["statistic", "df", "critical_value", "p_value", "alpha", "reject"]
        json.dumps(rep.to_dict())

    def test_p_value_matches_scipy(self):
        rep = report_from_statistic(7.3, 3, 0.05)
        assert rep.p_value == pytest.approx(sp_chi2.sf(7.3, 3), rel=1e-10)
        assert rep.critical_value == pytest.approx(sp_chi2.ppf(0.95, 3), rel=1e-10)

    def test_tie_rejects(self):
        crit = report_from_statistic(0.0, 4, 0.05).critical_value
        assert report_from_statistic(crit, 4, 0.05).reject

    @given(st.floats(0, 60), st.integers(1, 30), st.sampled_from([0.01, 0.05, 0.1]))
    def test_reject_iff_above_critical(self, stat, df, alpha):
        rep = report_from_statistic(stat, df, alpha)
        assert rep.reject == (rep.statistic >= rep.critical_value)
        # p-value and critical-value decisions agree away from the boundary
        if abs(stat - rep.critical_value) > 1e-6:
            assert rep.reject == (rep.p_value <= alpha)

    def test_bad_df(self):
        with pytest.raises(DomainError):
            report_from_statistic(1.0, 0, 0.05)


class TestSimple:
    def test_identical_never_rejects(self):
        rep = simple([0.2, 0.3, 0.5], [0.2, 0.3, 0.5], 1000)
        assert rep.statistic == 0.0 and not rep.reject and rep.p_value == 1.0

    def test_coin_example(self):
        rep = simple([0.7, 0.3], [0.5, 0.5], 100, alpha=0.05)
        expected = 200 * (0.7 * math.log(1.4) + 0.3 * math.log(0.6))
        assert rep.statistic == pytest.approx(expected, rel=1e-12)
        assert rep.statistic == pytest.approx(16.46, abs=0.01)
        assert rep.df == 1 and rep.reject

    def test_hard_falsification(self):
        rep = simple([0.7, 0.3], [1.0, 0.0], 10)
        assert rep.statistic == math.inf and rep.reject and rep.p_value == 0.0

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            simple([0.5, 0.5], [0.2, 0.3, 0.5], 10)

    @given(st.integers(0, 2**32 - 1), st.integers(2, 7))
    def test_permutation_invariant(self, seed, m):
        rng = np.random.default_rng(seed)
        fD, fM = random_simplex(rng, m), random_simplex(rng, m, floor=0.01)
        perm = rng.permutation(m)
        a = simple(fD, fM, 50).statistic
        b = simple(fD[perm], fM[perm], 50).statistic
        assert a == pytest.approx(b, rel=1e-12, abs=1e-14)


class TestComposite:
    def test_member_gives_zero(self):
        t = np.outer([0.3, 0.7], [0.2, 0.5, 0.3])
        rep = independence(t, 100)
        assert rep.statistic == pytest.approx(0.0, abs=1e-12) and not rep.reject

    def test_independence_df(self):
        t = np.random.default_rng(3).dirichlet(np.ones(12)).reshape(3, 4)
        rep = independence(t, 80)
        assert rep.df == 2 * 3
        fit = fit_independence(t)
        assert rep.statistic == pytest.approx(160 * fit.divergence, rel=1e-12)

    def test_saturated_errors(self):
        with pytest.raises(DomainError):
            composite([0.5, 0.5], [0.5, 0.5], 1, 1, 10)

    def test_generic(self):
        fD = np.array([0.1, 0.2, 0.3, 0.4])
        fitted = np.array([0.15, 0.15, 0.35, 0.35])
        rep = composite(fD, fitted, 3, 1, 40)
        assert rep.df == 2
        assert rep.statistic == pytest.approx(80 * _kl(fD, fitted), rel=1e-12)


class TestNested:
    def test_same_fit_zero(self):
        f = [0.25, 0.25, 0.5]
        assert nested(f, f, f, 1, 100).statistic == 0.0

    def test_symmetry_within_qs(self):
        m = 4
        t = np.random.default_rng(8).dirichlet(np.ones(m * m)).reshape(m, m)
        s, qs = fit_symmetry(t), fit_quasi_symmetry(t)
        rep = nested(t, s.fitted, qs.fitted, qs.dim_family - s.dim_family, 200)
        assert rep.df == m - 1
        # exponential nested pair: difference of divergences is K(fit1||fit0)
        assert rep.statistic == pytest.approx(400 * relative_entropy(qs.fitted, s.fitted), abs=1e-8)

    def test_bad_pair_errors(self):
        fD = np.array([0.1, 0.2, 0.3, 0.4])
        with pytest.raises(DomainError):
            nested(fD, fD, [0.25] * 4, 1, 10)


class TestNeymanPearson:
    def test_endpoints(self):
        f0, f1 = [0.2, 0.8], [0.6, 0.4]
        np.testing.assert_allclose(np_mixture(f0, f1, 1.0).probs, f0)
        np.testing.assert_allclose(np_mixture(f0, f1, 0.0).probs, f1)

    def test_geometric_midpoint(self):
        g = np_mixture([0.5, 0.5], [0.7, 0.3], 0.5).probs
        w = np.sqrt([0.35, 0.15])
        np.testing.assert_allclose(g, w / w.sum(), rtol=1e-14)

    def test_support_intersection(self):
        g = np_mixture([0.5, 0.5, 0.0], [0.0, 0.5, 0.5], 0.3).probs
        np.testing.assert_array_equal(g > 0, [False, True, False])

    def test_disjoint_support(self):
        with pytest.raises(DomainError):
            np_mixture([1.0, 0.0], [0.0, 1.0], 0.5)

    def test_solve_mu_degenerate(self):
        assert np_solve_mu([0.3, 0.7], [0.3, 0.7], 0.0) == 0.5

    def test_solve_mu_endpoint(self):
        f0, f1 = [0.5, 0.5], [0.9, 0.1]
        assert np_solve_mu(f0, f1, _kl(f1, f0)) == pytest.approx(0.0, abs=1e-9)

    def test_solve_mu_grid_oracle(self):
        f0, f1 = np.array([0.5, 0.5]), np.array([0.9, 0.1])
        grid = np.arange(0, 1 + 1e-12, 1e-4)
        d = []
        for mu in grid:
            w = f0**mu * f1 ** (1 - mu)
            g = w / w.sum()
            d.append(_kl(g, f0) - _kl(g, f1))
        d = np.array(d)
        k = np.flatnonzero(np.sign(d[:-1]) != np.sign(d[1:]))[0]
        mu = np_solve_mu(f0, f1, 0.0)
        assert grid[k] <= mu <= grid[k + 1]

    def test_solve_mu_out_of_range(self):
        f0, f1 = [0.5, 0.5], [0.9, 0.1]
        with pytest.raises(DomainError):
            np_solve_mu(f0, f1, _kl(f1, f0) + 0.1)

    @given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.99))
    def test_solve_mu_hits_tau(self, seed, frac):
        rng = np.random.default_rng(seed)
        f0, f1 = random_simplex(rng, 4, 0.02), random_simplex(rng, 4, 0.02)
        lo, hi = -_kl(f0, f1), _kl(f1, f0)
        tau = lo + frac * (hi - lo)
        mu = np_solve_mu(f0, f1, tau)
        g = np_mixture(f0, f1, mu).probs
        assert _kl(g, f0) - _kl(g, f1) == pytest.approx(tau, abs=1e-9)


class TestChernoff:
    @pytest.mark.parametrize(
        "f0,f1",
        [([0.5, 0.5], [0.7, 0.3]), ([0.5, 0.5], [0.9, 0.1]), ([0.7, 0.3], [0.9, 0.1]), ([0.1, 0.2, 0.7], [0.3, 0.3, 0.4])],
    )
    def test_matches_scipy_oracle(self, f0, f1):
        assert chernoff_information(f0, f1).information == pytest.approx(_chernoff_oracle(f0, f1), abs=1e-10)

    def test_frozen_values(self):
        # frozen after agreement with the scipy oracle above
        assert chernoff_information([0.5, 0.5], [0.7, 0.3]).information == pytest.approx(0.0213238, abs=1e-6)
        assert chernoff_information([0.5, 0.5], [0.9, 0.1]).information == pytest.approx(0.1123774, abs=1e-6)
        assert chernoff_information([0.7, 0.3], [0.9, 0.1]).information == pytest.approx(0.0337955, abs=1e-6)

    def test_point_mass(self):
        c = chernoff_information([0.5, 0.5], [1.0, 0.0])
        assert c.information == pytest.approx(math.log(2), abs=1e-12)

    def test_disjoint(self):
        assert chernoff_information([1.0, 0.0], [0.0, 1.0]).information == math.inf

    def test_equal_is_zero(self):
        assert chernoff_information([0.2, 0.8], [0.2, 0.8]).information == pytest.approx(0.0, abs=1e-14)

    @given(st.integers(0, 2**32 - 1), st.integers(2, 6))
    def test_symmetry_and_equalization(self, seed, m):
        rng = np.random.default_rng(seed)
        f0, f1 = random_simplex(rng, m, 0.01), random_simplex(rng, m, 0.01)
        c01, c10 = chernoff_information(f0, f1), chernoff_information(f1, f0)
        assert c01.information == pytest.approx(c10.information, abs=1e-9)
        assert c01.information > 0
        g = np_mixture(f0, f1, c01.mu).probs
        assert abs(_kl(g, f0) - _kl(g, f1)) <= 1e-6
        assert _kl(g, f0) == pytest.approx(c01.information, abs=1e-6)

    @given(st.integers(0, 2**32 - 1))
    def test_log_partition_convex(self, seed):
        rng = np.random.default_rng(seed)
        f0, f1 = random_simplex(rng, 5, 0.001), random_simplex(rng, 5, 0.001)
        mus = np.linspace(0, 1, 101)
        lnz = np.array([math.log(np.sum(f0**mu * f1 ** (1 - mu))) for mu in mus])
        assert np.all(lnz[:-2] - 2 * lnz[1:-1] + lnz[2:] >= -1e-9)


def test_report_class_not_collected():
    assert TestReport.__test__ is False
