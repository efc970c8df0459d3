"""Maximum-likelihood projections ``argmin_{g in family} K(f^D || g)``.

Closed forms cover coarse-grained specifications, independence, symmetry and
the three conditional-independence models for three-way tables.
Quasi-symmetry has no closed form and is fitted by iterative proportional
fitting over its sufficient statistics.

Family dimensions follow the free-parameter counts used for chi-square
degrees of freedom; ``FitResult.df`` is ``dim_saturated - dim_family``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .simplex import (
    Distribution,
    JointTable,
    Partition,
    SquareTable,
    ThreeWayTable,
    entropy,
    probs_of,
    relative_entropy,
)


@dataclass(frozen=True)
class FitResult:
    fitted: object
    divergence: float
    dim_family: int
    iterations: int = 0
    converged: bool = True
    dim_saturated: int = None

    @property
    def df(self):
        return self.dim_saturated - self.dim_family


def _safe_ratio(num, den):
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=den > 0)
    return out


def fit_coarse_grained(fD, partition, FM):
    """ML estimate when only group totals ``F^M_J`` of the model are specified.

    ``f_j = fD_j F^M_J / F^D_J``; the divergence equals ``K(F^D || F^M)``.
    """
    p = probs_of(fD)
    if not isinstance(partition, Partition):
        partition = Partition(partition)
    FM = probs_of(FM)
    if partition.m != p.size or FM.size != partition.n_groups:
        raise DomainError("partition does not match the distribution or group targets")
    FD = partition.aggregate(p)
    bad = (FD == 0) & (FM > 0)
    if np.any(bad):
        raise DomainError(f"groups {np.flatnonzero(bad).tolist()} have no data mass but positive model mass")
    ratio = _safe_ratio(FM, FD)
    fitted = Distribution(p * ratio[partition.group_of])
    return FitResult(
        fitted,
        relative_entropy(FD, FM),
        dim_family=p.size - partition.n_groups,
        dim_saturated=p.size - 1,
    )


def fit_independence(t):
    """Product of the marginals; divergence is the mutual information."""
    if not isinstance(t, JointTable):
        t = JointTable(t)
    fitted = JointTable(t.product_of_marginals(), t.row_labels, t.col_labels)
    m1, m2 = t.shape
    return FitResult(
        fitted,
        relative_entropy(t.probs, fitted.probs),
        dim_family=m1 + m2 - 2,
        dim_saturated=m1 * m2 - 1,
    )


def symmetric_dim(m):
    return m * (m + 1) // 2 - 1


def quasi_symmetric_dim(m):
    # symmetric interaction plus m-1 free row/column asymmetries
    return symmetric_dim(m) + m - 1


def _square(t):
    if isinstance(t, SquareTable):
        return t
    if isinstance(t, JointTable):
        return SquareTable(t.probs, t.row_labels, t.col_labels)
    return SquareTable(t)


def fit_symmetry(t):
    """Symmetric ML estimate ``(f_jk + f_kj) / 2``."""
    t = _square(t)
    fitted = t._like(0.5 * (t.probs + t.probs.T))
    m = t.m
    return FitResult(
        fitted,
        relative_entropy(t.probs, fitted.probs),
        dim_family=symmetric_dim(m),
        dim_saturated=m * m - 1,
    )


def _qs_violation(f, sym_target, rows, cols):
    return max(
        np.max(np.abs(f + f.T - sym_target)),
        np.max(np.abs(f.sum(axis=1) - rows)),
        np.max(np.abs(f.sum(axis=0) - cols)),
    )


def fit_quasi_symmetry(t, tol=1e-10, max_iter=10_000):
    """Quasi-symmetric fit ``f_jk = a_j b_k c_jk`` with ``c`` symmetric.

    Iterative proportional fitting: each sweep rescales multiplicatively to
    match, in turn, the symmetrized sums ``f_jk + f_kj``, the row margins and
    the column margins of the data. Each rescaling factor has the form of a
    symmetric, row or column term, so iterates stay in the family. Cells with
    ``f_jk + f_kj = 0`` in the data are held at zero.

    Raises
    ------
    ConvergenceError
        If the largest violation of the three margin conditions is still above
        ``tol`` after ``max_iter`` sweeps.
    """
    t = _square(t)
    D = t.probs
    sym_target = D + D.T
    rows = D.sum(axis=1)
    cols = D.sum(axis=0)
    active = sym_target > 0
    f = np.where(active, 1.0, 0.0)
    f /= f.sum()

    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        f = f * _safe_ratio(sym_target, f + f.T)
        f = f * _safe_ratio(rows, f.sum(axis=1))[:, None]
        f = f * _safe_ratio(cols, f.sum(axis=0))[None, :]
        if _qs_violation(f, sym_target, rows, cols) < tol:
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"quasi-symmetry IPF did not reach tol={tol} in {max_iter} sweeps", iterations=max_iter
        )
    fitted = t._like(f / f.sum())
    m = t.m
    return FitResult(
        fitted,
        relative_entropy(D, fitted.probs),
        dim_family=quasi_symmetric_dim(m),
        iterations=it,
        converged=True,
        dim_saturated=m * m - 1,
    )


THREEWAY_MODELS = ("L", "M", "N")


def threeway_dims(shape, model):
    """Free-parameter count of a log-linear model on an ``I x J x K`` table.

    L: ``Z`` independent of ``(X, Y)``. M: ``Y`` independent of ``Z``.
    N: ``X`` independent of ``Z`` given ``Y``.
    """
    I, J, K = shape
    saturated = I * J * K - 1
    if model == "L":
        df = (I * J - 1) * (K - 1)
    elif model == "M":
        df = (J - 1) * (K - 1)
    elif model == "N":
        df = J * (I - 1) * (K - 1)
    else:
        raise DomainError(f"unknown three-way model {model!r}; expected one of {THREEWAY_MODELS}")
    return saturated - df, saturated


def fit_threeway(t, model):
    """Closed-form ML fits of the conditional-independence models L, M and N."""
    if not isinstance(t, ThreeWayTable):
        t = ThreeWayTable(t)
    f = t.probs
    f_ij = f.sum(axis=2)
    f_jk = f.sum(axis=0)
    f_j = f.sum(axis=(0, 2))
    f_k = f.sum(axis=(0, 1))
    if model == "L":
        fitted = f_ij[:, :, None] * f_k[None, None, :]
    elif model == "M":
        # f_ijk / f_.jk is 0/0 = 0 only where the whole (j, k) fibre is empty
        fitted = _safe_ratio(f, f_jk[None, :, :]) * f_j[None, :, None] * f_k[None, None, :]
    elif model == "N":
        fitted = _safe_ratio(f_ij[:, :, None] * f_jk[None, :, :], f_j[None, :, None])
    else:
        raise DomainError(f"unknown three-way model {model!r}; expected one of {THREEWAY_MODELS}")
    dim, saturated = threeway_dims(f.shape, model)
    return FitResult(
        ThreeWayTable(fitted),
        relative_entropy(f, fitted),
        dim_family=dim,
        dim_saturated=saturated,
    )


def threeway_entropy_divergence(t, model):
    """The same divergences written as entropy combinations of the margins."""
    f = probs_of(t)
    H_xyz = entropy(f)
    H_xy = entropy(f.sum(axis=2))
    H_yz = entropy(f.sum(axis=0))
    H_y = entropy(f.sum(axis=(0, 2)))
    H_z = entropy(f.sum(axis=(0, 1)))
    if model == "L":
        return H_xy + H_z - H_xyz
    if model == "M":
        return H_y + H_z - H_yz
    if model == "N":
        return H_xy + H_yz - H_xyz - H_y
    raise DomainError(f"unknown three-way model {model!r}")
