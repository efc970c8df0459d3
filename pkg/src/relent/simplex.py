"""Distributions on the simplex, contingency tables, and the basic functionals.

All logarithms are natural (nats). The conventions ``0 ln 0 = 0`` and
``0 ln(0/0) = 0`` apply throughout; ``relative_entropy`` returns ``inf`` when
the first argument puts mass where the second has none.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SUM_TOL = 1e-9
NEG_TOL = 1e-12


def _validated(values, ndim=None, name="distribution"):
    arr = np.array(values, dtype=np.float64)
    if ndim is not None and arr.ndim != ndim:
        raise DomainError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise DomainError(f"{name} must have at least one category")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    if np.any(arr < -NEG_TOL):
        raise DomainError(f"{name} has negative entries (min {arr.min():g})")
    arr[arr < 0] = 0.0
    total = arr.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise DomainError(f"{name} sums to {float(total):.12g}, not 1")
    arr /= total
    arr.setflags(write=False)
    return arr


def _labels(labels, size, what="labels"):
    if labels is None:
        return None
    labels = tuple(str(x) for x in labels)
    if len(labels) != size:
        raise DomainError(f"{len(labels)} {what} for {size} categories")
    return labels


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector on the simplex S_m.

    Inputs whose sum is within 1e-9 of one are renormalized; larger deviations
    and entries below -1e-12 raise :class:`DomainError`. Tiny negative noise is
    clamped to zero. The stored array is read-only.
    """

    probs: np.ndarray
    labels: tuple = None

    def __post_init__(self):
        probs = _validated(self.probs, ndim=1)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "labels", _labels(self.labels, probs.size))

    @classmethod
    def from_counts(cls, counts, labels=None):
        counts = np.asarray(counts, dtype=np.float64)
        if np.any(counts < 0) or counts.sum() <= 0:
            raise DomainError("counts must be nonnegative with a positive total")
        return cls(counts / counts.sum(), labels)

    @classmethod
    def uniform(cls, m):
        return cls(np.full(m, 1.0 / m))

    @property
    def m(self):
        return self.probs.size

    @property
    def support(self):
        return self.probs > 0

    def __len__(self):
        return self.probs.size

    def __getitem__(self, idx):
        return self.probs[idx]

    def __iter__(self):
        return iter(self.probs)

    def __array__(self, dtype=None, copy=None):
        return self.probs if dtype is None else self.probs.astype(dtype)

    def __repr__(self):
        return f"Distribution({np.array2string(self.probs, precision=6)})"

    def allclose(self, other, atol=1e-12):
        return np.allclose(self.probs, probs_of(other), rtol=0, atol=atol)


@dataclass(frozen=True, eq=False)
class JointTable:
    """Joint distribution of two categorical variables (rows X, columns Y)."""

    probs: np.ndarray
    row_labels: tuple = None
    col_labels: tuple = None

    def __post_init__(self):
        probs = _validated(self.probs, ndim=2, name="table")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "row_labels", _labels(self.row_labels, probs.shape[0], "row labels"))
        object.__setattr__(self, "col_labels", _labels(self.col_labels, probs.shape[1], "column labels"))

    @classmethod
    def from_counts(cls, counts, row_labels=None, col_labels=None):
        counts = np.asarray(counts, dtype=np.float64)
        if np.any(counts < 0) or counts.sum() <= 0:
            raise DomainError("counts must be nonnegative with a positive total")
        return cls(counts / counts.sum(), row_labels, col_labels)

    @property
    def shape(self):
        return self.probs.shape

    @property
    def row_marginal(self):
        return Distribution(self.probs.sum(axis=1), self.row_labels)

    @property
    def col_marginal(self):
        return Distribution(self.probs.sum(axis=0), self.col_labels)

    def product_of_marginals(self):
        return np.outer(self.probs.sum(axis=1), self.probs.sum(axis=0))

    def flat(self):
        return Distribution(self.probs.ravel())

    def __array__(self, dtype=None, copy=None):
        return self.probs if dtype is None else self.probs.astype(dtype)

    def _like(self, probs):
        return type(self)(probs, self.row_labels, self.col_labels)


@dataclass(frozen=True, eq=False)
class SquareTable(JointTable):
    """Square joint table, e.g. origin-destination flows. Rows and columns share labels."""

    def __post_init__(self):
        if self.row_labels is not None and self.col_labels is None:
            object.__setattr__(self, "col_labels", self.row_labels)
        super().__post_init__()
        if self.probs.shape[0] != self.probs.shape[1]:
            raise DomainError(f"square table expected, got shape {self.probs.shape}")

    @property
    def m(self):
        return self.probs.shape[0]

    def is_symmetric(self, atol=1e-12):
        return np.allclose(self.probs, self.probs.T, rtol=0, atol=atol)


@dataclass(frozen=True, eq=False)
class ThreeWayTable:
    """Joint distribution f_ijk of three categorical variables X, Y, Z."""

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _validated(self.probs, ndim=3, name="three-way table"))

    @classmethod
    def from_counts(cls, counts):
        counts = np.asarray(counts, dtype=np.float64)
        if np.any(counts < 0) or counts.sum() <= 0:
            raise DomainError("counts must be nonnegative with a positive total")
        return cls(counts / counts.sum())

    @property
    def shape(self):
        return self.probs.shape

    def __array__(self, dtype=None, copy=None):
        return self.probs if dtype is None else self.probs.astype(dtype)


class Partition:
    """Assignment of categories ``j = 0..m-1`` to groups ``J = 0..M-1``.

    >>> Partition([0, 0, 1]).groups
    [[0, 1], [2]]
    """

    def __init__(self, group_of):
        group_of = np.asarray(group_of)
        if group_of.ndim != 1 or group_of.size == 0:
            raise DomainError("partition needs a nonempty 1-d group assignment")
        if not np.issubdtype(group_of.dtype, np.integer):
            if not np.all(np.mod(group_of, 1) == 0):
                raise DomainError("group indices must be integers")
            group_of = group_of.astype(np.int64)
        if group_of.min() < 0:
            raise DomainError("group indices must be nonnegative")
        n_groups = int(group_of.max()) + 1
        sizes = np.bincount(group_of, minlength=n_groups)
        if np.any(sizes == 0):
            raise DomainError(f"empty groups: {np.flatnonzero(sizes == 0).tolist()}")
        self.group_of = group_of.astype(np.int64)
        self.group_of.setflags(write=False)
        self.n_groups = n_groups

    @classmethod
    def from_groups(cls, groups, m=None):
        """Build from explicit lists of 0-based category indices."""
        m = m if m is not None else sum(len(g) for g in groups)
        group_of = np.full(m, -1, dtype=np.int64)
        for J, members in enumerate(groups):
            for j in members:
                if not 0 <= j < m:
                    raise DomainError(f"category {j} out of range for m={m}")
                if group_of[j] != -1:
                    raise DomainError(f"category {j} assigned twice")
                group_of[j] = J
        if np.any(group_of < 0):
            raise DomainError(f"unassigned categories: {np.flatnonzero(group_of < 0).tolist()}")
        return cls(group_of)

    @property
    def m(self):
        return self.group_of.size

    @property
    def groups(self):
        return [np.flatnonzero(self.group_of == J).tolist() for J in range(self.n_groups)]

    def aggregate(self, values):
        """Sum a length-m vector within groups."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (self.m,):
            raise DomainError(f"partition covers {self.m} categories, vector has shape {values.shape}")
        return np.bincount(self.group_of, weights=values, minlength=self.n_groups)

    def __repr__(self):
        return f"Partition({self.groups})"


def probs_of(x):
    """Return the probability array behind a distribution or table, validating raw input."""
    if isinstance(x, (Distribution, JointTable, ThreeWayTable)):
        return x.probs
    return _validated(x)


def as_distribution(x):
    if isinstance(x, Distribution):
        return x
    if isinstance(x, (JointTable, ThreeWayTable)):
        return Distribution(x.probs.ravel())
    return Distribution(x)


def _xlogy(x, y):
    out = np.zeros(np.broadcast(x, y).shape)
    mask = x > 0
    out[mask] = x[mask] * np.log(y[mask])
    return out


def entropy(f):
    """Shannon entropy ``-sum f ln f`` in nats; accepts distributions or tables."""
    p = probs_of(f)
    return float(max(0.0, -_xlogy(p, p).sum()))


def relative_entropy(f, g):
    """Kullback-Leibler divergence ``K(f||g) = sum f_j ln(f_j / g_j)``.

    Returns ``inf`` exactly when some ``g_j = 0 < f_j``. Works on tables of
    equal shape as well as on vectors.

    >>> round(relative_entropy([0.7, 0.3], [0.5, 0.5]), 4)
    0.0823
    """
    p = probs_of(f)
    q = probs_of(g)
    if p.shape != q.shape:
        raise DomainError(f"shape mismatch: {p.shape} vs {q.shape}")
    mask = p > 0
    if np.any(q[mask] == 0):
        return float("inf")
    k = float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))
    # rounding can push tiny divergences below zero
    return max(k, 0.0)


def chi_square_stat(f, g, n, allow_inf=False):
    """Pearson statistic ``n sum (f_j - g_j)^2 / g_j``.

    Where ``g_j = 0 < f_j`` the statistic is undefined: :class:`DomainError`
    by default, ``inf`` with ``allow_inf=True``.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n}")
    p = probs_of(f)
    q = probs_of(g)
    if p.shape != q.shape:
        raise DomainError(f"shape mismatch: {p.shape} vs {q.shape}")
    zero = q == 0
    if np.any(p[zero] != 0):
        if allow_inf:
            return float("inf")
        raise DomainError("chi-square undefined: model has zero mass where data does not")
    diff = (p - q)[~zero]
    return float(n * np.sum(diff * diff / q[~zero]))


def coarse_grain(f, partition):
    """Aggregate categories into groups: ``F_J = sum_{j in J} f_j``."""
    p = probs_of(f)
    if p.ndim != 1:
        p = p.ravel()
    return Distribution(partition.aggregate(p))


def mutual_information(t):
    """``I(X:Y) = H(X) + H(Y) - H(X,Y)`` for a two-way table."""
    if not isinstance(t, JointTable):
        t = JointTable(t)
    rows = t.probs.sum(axis=1)
    cols = t.probs.sum(axis=0)
    return max(0.0, entropy(rows) + entropy(cols) - entropy(t.probs))
