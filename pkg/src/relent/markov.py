"""Markov models of categorical sequences and text.

Sequences are integer arrays over an :class:`Alphabet`. r-grams are coded as
base-m integers (first symbol most significant), which keeps counting a
single pass over the data and lets conditional models store their contexts
as a sorted code array plus a dense ``(n_contexts, m)`` matrix of rows.

Two windows are in play and they differ only at the sequence ends:

* r-gram counts slide over all ``n - r + 1`` windows and give ``H_r``;
* order-r transitions use the ``n - r`` windows that have a successor and
  give the conditional rows ``f(w|a)`` and the context weights.

``cond_entropy`` is ``H_{r+1} - H_r``; ``TransitionCounts.cond_entropy``
is the transition-weighted row entropy. They agree up to ``O(r/n)``.
"""

import json
import math
import unicodedata
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, FormatError, InfeasibleError
from .hypothesis_tests import report_from_statistic
from .simplex import Distribution

DENSE_LIMIT = 2**20
STATIONARY_TOL = 1e-9


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        if not symbols:
            raise DomainError("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise DomainError("alphabet symbols must be distinct")
        if any(s == "" for s in symbols):
            raise DomainError("alphabet symbols must be nonempty")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(symbols)})

    @property
    def m(self):
        return len(self.symbols)

    def index(self, symbol):
        try:
            return self._index[symbol]
        except KeyError:
            raise FormatError(f"symbol {symbol!r} not in alphabet") from None

    def encode(self, tokens):
        return np.fromiter((self.index(t) for t in tokens), dtype=np.int64)

    @property
    def single_char(self):
        return all(len(s) == 1 for s in self.symbols)

    def join(self, indices):
        sep = "" if self.single_char else " "
        return sep.join(self.symbols[i] for i in indices)

    def split(self, gram):
        """Inverse of :meth:`join` for a gram string."""
        tokens = list(gram) if self.single_char else (gram.split(" ") if gram else [])
        return [self.index(t) for t in tokens]


@dataclass(frozen=True)
class NormalizationSpec:
    """How raw text becomes a symbol stream.

    ``letters_only`` drops every character that is neither a letter nor
    whitespace, except those listed in ``keep``. Whitespace runs collapse to a
    single blank when ``collapse_whitespace`` is set.
    """

    lowercase: bool = True
    letters_only: bool = True
    keep: str = ""
    collapse_whitespace: bool = True
    strip_ends: bool = True

    def apply(self, text):
        if self.lowercase:
            text = text.lower()
        if self.letters_only:
            keep = set(self.keep)
            text = "".join(ch for ch in text if ch.isalpha() or ch.isspace() or ch in keep)
        if self.collapse_whitespace:
            text = " ".join(text.split()) if self.strip_ends else _collapse_inner(text)
        elif self.strip_ends:
            text = text.strip()
        return text

    def to_dict(self):
        return {
            "lowercase": self.lowercase,
            "letters_only": self.letters_only,
            "keep": self.keep,
            "collapse_whitespace": self.collapse_whitespace,
            "strip_ends": self.strip_ends,
        }

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(cls().to_dict())
        if unknown:
            raise FormatError(f"unknown normalization keys {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def raw(cls):
        return cls(lowercase=False, letters_only=False, collapse_whitespace=False, strip_ends=False)


def _collapse_inner(text):
    out = []
    in_space = False
    for ch in text:
        if ch.isspace():
            if not in_space:
                out.append(" ")
            in_space = True
        else:
            out.append(ch)
            in_space = False
    return "".join(out)


@dataclass(frozen=True, eq=False)
class SymbolSequence:
    alphabet: Alphabet
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.int64)
        if data.ndim != 1:
            raise DomainError("sequence data must be one-dimensional")
        if data.size and (data.min() < 0 or data.max() >= self.alphabet.m):
            raise DomainError("sequence contains indices outside the alphabet")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def n(self):
        return int(self.data.size)

    @property
    def m(self):
        return self.alphabet.m

    def __len__(self):
        return self.n

    def text(self):
        return self.alphabet.join(self.data)


def ingest_corpus(text, norm=None, alphabet=None):
    """Normalize ``text`` and encode it as a :class:`SymbolSequence`.

    Without an explicit alphabet, the surviving characters sorted by code
    point form the alphabet (so the blank, if present, comes first).

    >>> s = ingest_corpus("AB  b")
    >>> s.alphabet.symbols, s.data.tolist()
    ((' ', 'a', 'b'), [1, 2, 0, 2])
    """
    norm = norm or NormalizationSpec()
    text = unicodedata.normalize("NFC", text)
    clean = norm.apply(text)
    if not clean:
        raise FormatError("no symbols left after normalization")
    if alphabet is None:
        alphabet = Alphabet(tuple(sorted(set(clean))))
    elif not isinstance(alphabet, Alphabet):
        alphabet = Alphabet(tuple(alphabet))
    return SymbolSequence(alphabet, alphabet.encode(clean))


def _check_code_range(m, r):
    if m ** r >= _kernels.MAX_CODE:
        raise DomainError(f"m^r = {m}^{r} too large for integer gram codes")


def _decode(code, r, m):
    out = [0] * r
    for k in range(r - 1, -1, -1):
        out[k] = code % m
        code //= m
    return out


@dataclass(frozen=True, eq=False)
class NGramTable:
    """Sliding-window r-gram counts (no wraparound); ``total = n - r + 1``."""

    order: int
    alphabet: Alphabet
    codes: np.ndarray  # sorted codes of grams with positive count
    counts: np.ndarray
    total: int

    def count(self, gram):
        """Count of a gram given as a string or as a sequence of indices."""
        idx = self.alphabet.split(gram) if isinstance(gram, str) else list(gram)
        if len(idx) != self.order:
            raise DomainError(f"gram of length {len(idx)} for order {self.order}")
        code = 0
        for i in idx:
            code = code * self.alphabet.m + i
        j = np.searchsorted(self.codes, code)
        if j < self.codes.size and self.codes[j] == code:
            return int(self.counts[j])
        return 0

    def grams(self):
        return [tuple(_decode(int(c), self.order, self.alphabet.m)) for c in self.codes]

    def to_dict(self):
        return {self.alphabet.join(g): int(c) for g, c in zip(self.grams(), self.counts)}

    def probs(self):
        return self.counts / self.total

    def entropy(self):
        p = self.probs()
        return float(max(0.0, -np.sum(p * np.log(p))))


def _count_codes(codes, m, r):
    if m ** r <= DENSE_LIMIT:
        dense = np.bincount(codes, minlength=m ** r)
        nz = np.flatnonzero(dense)
        return nz.astype(np.int64), dense[nz].astype(np.int64)
    uniq, cnt = np.unique(codes, return_counts=True)
    return uniq.astype(np.int64), cnt.astype(np.int64)


def _merge(parts):
    codes = np.concatenate([p[0] for p in parts])
    counts = np.concatenate([p[1] for p in parts])
    uniq, inv = np.unique(codes, return_inverse=True)
    out = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(out, inv, counts)
    return uniq, out


def count_ngrams(s, r, shards=1, threads=1):
    """Count r-grams of ``s``.

    With ``shards > 1`` the window range is split into pieces that overlap by
    ``r - 1`` symbols, counted independently (on ``threads`` workers) and
    merged by addition; the result is identical to the unsharded count.
    """
    if isinstance(r, bool) or int(r) != r or r < 0:
        raise DomainError(f"order must be a nonnegative integer, got {r}")
    r = int(r)
    if r > s.n:
        raise DomainError(f"order {r} exceeds sequence length {s.n}")
    m = s.m
    _check_code_range(m, r)
    windows = s.n - r + 1
    shards = max(1, min(int(shards), windows))
    bounds = np.linspace(0, windows, shards + 1).astype(np.int64)

    def work(k):
        lo, hi = int(bounds[k]), int(bounds[k + 1])
        codes = _kernels.gram_codes(s.data[lo:hi + r - 1], r, m) if r > 0 else np.zeros(hi - lo, np.int64)
        return _count_codes(codes, m, r)

    if shards == 1:
        codes, counts = work(0)
    else:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                parts = list(ex.map(work, range(shards)))
        else:
            parts = [work(k) for k in range(shards)]
        codes, counts = _merge(parts)
    return NGramTable(r, s.alphabet, codes, counts, windows)


def gram_entropy(s, r):
    """Block entropy ``H_r`` of the empirical r-gram distribution; ``H_0 = 0``."""
    if r == 0:
        return 0.0
    return count_ngrams(s, r).entropy()


def cond_entropy(s, r):
    """``h_{r+1} = H_{r+1} - H_r``, the empirical conditional entropy given ``r`` symbols.

    No wraparound is used, so for short sequences the difference can dip
    slightly below zero or above ``h_r``; the discrepancy is ``O(r/n)``.
    """
    if r + 1 > s.n:
        raise DomainError(f"need at least {r + 1} symbols, have {s.n}")
    return gram_entropy(s, r + 1) - gram_entropy(s, r)


def _row_entropy(rows):
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(rows > 0, rows * np.log(rows), 0.0)
    return -terms.sum(axis=1)


@dataclass(frozen=True, eq=False)
class TransitionCounts:
    """Counts ``n(a w)`` of order-r contexts followed by a symbol."""

    order: int
    m: int
    ctx_codes: np.ndarray
    counts: np.ndarray  # (n_contexts, m)

    @classmethod
    def from_sequence(cls, s, r):
        if isinstance(r, bool) or int(r) != r or r < 0:
            raise DomainError(f"order must be a nonnegative integer, got {r}")
        r = int(r)
        if r + 1 > s.n:
            raise DomainError(f"order {r} needs at least {r + 1} symbols, have {s.n}")
        m = s.m
        _check_code_range(m, r + 1)
        codes = _kernels.gram_codes(s.data, r + 1, m)
        uniq, cnt = _count_codes(codes, m, r + 1)
        ctx, sym = np.divmod(uniq, m)
        ctx_codes, inv = np.unique(ctx, return_inverse=True)
        N = np.zeros((ctx_codes.size, m), dtype=np.int64)
        N[inv, sym] = cnt
        return cls(r, m, ctx_codes, N)

    @classmethod
    def from_dense(cls, table):
        """From a dense array of shape ``(m,) * (r + 1)``, first axes are the context."""
        table = np.asarray(table)
        if table.ndim < 1 or len(set(table.shape)) != 1:
            raise DomainError("dense transition table must have equal axis lengths")
        m = table.shape[0]
        r = table.ndim - 1
        flat = table.reshape(m ** r, m)
        keep = np.flatnonzero(flat.sum(axis=1) > 0)
        return cls(r, m, keep.astype(np.int64), flat[keep].astype(np.float64))

    @property
    def total(self):
        return float(self.counts.sum())

    @property
    def weights(self):
        return self.counts.sum(axis=1) / self.total

    @property
    def rows(self):
        return self.counts / self.counts.sum(axis=1, keepdims=True)

    def cond_entropy(self):
        """Transition-weighted entropy ``sum_a f(a) H(f(.|a))``."""
        return float(max(0.0, self.weights @ _row_entropy(self.rows)))

    def marginalize(self, s_order):
        """Transitions with contexts shortened to their last ``s_order`` symbols."""
        if not 0 <= s_order <= self.order:
            raise DomainError(f"cannot reduce order {self.order} to {s_order}")
        suffix = self.ctx_codes % (self.m ** s_order)
        codes, inv = np.unique(suffix, return_inverse=True)
        out = np.zeros((codes.size, self.m), dtype=self.counts.dtype)
        np.add.at(out, inv, self.counts)
        return TransitionCounts(s_order, self.m, codes, out)

    def to_model(self, alphabet, normalization=None):
        return ConditionalModel(self.order, alphabet, self.ctx_codes, self.rows, self.weights,
                                normalization)

    def divergence_to(self, model):
        """``kappa = sum_a f(a) sum_w f(w|a) ln[f(w|a) / g(w|a')]`` with ``a'`` the
        last ``model.order`` symbols of ``a``. ``inf`` if the model forbids an
        observed transition or lacks an observed context."""
        if model.alphabet.m != self.m:
            raise DomainError("alphabet size mismatch")
        if model.order > self.order:
            raise DomainError(f"model order {model.order} exceeds data order {self.order}")
        suffix = self.ctx_codes % (self.m ** model.order)
        j = np.searchsorted(model.ctx_codes, suffix)
        j_clip = np.minimum(j, model.ctx_codes.size - 1)
        if np.any(model.ctx_codes[j_clip] != suffix):
            return math.inf
        g = model.rows[j_clip]
        f = self.rows
        obs = f > 0
        if np.any(g[obs] == 0):
            return math.inf
        terms = np.zeros_like(f)
        terms[obs] = f[obs] * (np.log(f[obs]) - np.log(g[obs]))
        return float(max(0.0, self.weights @ terms.sum(axis=1)))


@dataclass(frozen=True, eq=False)
class ConditionalModel:
    """Order-r Markov model: rows ``f(.|a)`` for each stored context ``a``.

    ``context_weights`` are the frequencies of the contexts among observed
    transitions. ``dropped_contexts`` lists contexts lost when forming a
    multiplicative mixture.
    """

    order: int
    alphabet: Alphabet
    ctx_codes: np.ndarray
    rows: np.ndarray
    context_weights: np.ndarray
    normalization: NormalizationSpec = None
    dropped_contexts: tuple = field(default_factory=tuple)

    def __post_init__(self):
        m = self.alphabet.m
        codes = np.array(self.ctx_codes, dtype=np.int64)
        rows = np.array(self.rows, dtype=np.float64).reshape(-1, m)
        w = np.array(self.context_weights, dtype=np.float64)
        if codes.size == 0:
            raise DomainError("model has no contexts")
        if rows.shape[0] != codes.size or w.shape != (codes.size,):
            raise DomainError("contexts, rows and weights disagree in length")
        if np.any(np.diff(codes) <= 0):
            order = np.argsort(codes)
            codes, rows, w = codes[order], rows[order], w[order]
            if np.any(np.diff(codes) == 0):
                raise DomainError("duplicate contexts")
        if np.any(rows < 0) or np.any(np.abs(rows.sum(axis=1) - 1.0) > 1e-9):
            raise DomainError("every context row must be a distribution")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise DomainError("context weights must form a distribution")
        rows = rows / rows.sum(axis=1, keepdims=True)
        w = w / w.sum()
        for a in (codes, rows, w):
            a.setflags(write=False)
        object.__setattr__(self, "ctx_codes", codes)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "context_weights", w)
        object.__setattr__(self, "dropped_contexts", tuple(int(c) for c in self.dropped_contexts))

    @property
    def m(self):
        return self.alphabet.m

    def _code_of(self, context):
        idx = self.alphabet.split(context) if isinstance(context, str) else list(context)
        if len(idx) != self.order:
            raise DomainError(f"context of length {len(idx)} for order {self.order}")
        code = 0
        for i in idx:
            code = code * self.m + i
        return code

    def _find(self, code):
        j = np.searchsorted(self.ctx_codes, code)
        if j < self.ctx_codes.size and self.ctx_codes[j] == code:
            return int(j)
        return None

    def has_context(self, context):
        return self._find(self._code_of(context)) is not None

    def row(self, context):
        j = self._find(self._code_of(context))
        if j is None:
            raise DomainError(f"context {context!r} not in model")
        return Distribution(self.rows[j], self.alphabet.symbols)

    def prob(self, context, symbol):
        """``f(symbol | context)``; zero for unseen contexts."""
        j = self._find(self._code_of(context))
        if j is None:
            return 0.0
        sym = self.alphabet.index(symbol) if isinstance(symbol, str) else int(symbol)
        return float(self.rows[j, sym])

    def context_strings(self):
        return [self.alphabet.join(_decode(int(c), self.order, self.m)) for c in self.ctx_codes]

    @property
    def contexts(self):
        return {k: Distribution(r, self.alphabet.symbols) for k, r in zip(self.context_strings(), self.rows)}

    def cond_entropy(self):
        return float(max(0.0, self.context_weights @ _row_entropy(self.rows)))

    def _replace(self, **kw):
        base = dict(order=self.order, alphabet=self.alphabet, ctx_codes=self.ctx_codes, rows=self.rows,
                    context_weights=self.context_weights, normalization=self.normalization,
                    dropped_contexts=self.dropped_contexts)
        base.update(kw)
        return ConditionalModel(**base)

    def to_dict(self):
        return {
            "order": self.order,
            "alphabet": list(self.alphabet.symbols),
            "normalization": None if self.normalization is None else self.normalization.to_dict(),
            "contexts": {
                k: {sym: float(p) for sym, p in zip(self.alphabet.symbols, row) if p > 0}
                for k, row in zip(self.context_strings(), self.rows)
            },
            "context_weights": {k: float(w) for k, w in zip(self.context_strings(), self.context_weights)},
            "dropped_contexts": [self.alphabet.join(_decode(c, self.order, self.m)) for c in self.dropped_contexts],
        }

    @classmethod
    def from_dict(cls, d):
        try:
            order = int(d["order"])
            alphabet = Alphabet(tuple(d["alphabet"]))
            norm = d.get("normalization")
            norm = None if norm is None else NormalizationSpec.from_dict(norm)
            m = alphabet.m
            keys = list(d["contexts"])
            codes, rows, weights = [], [], []
            for k in keys:
                idx = alphabet.split(k)
                if len(idx) != order:
                    raise FormatError(f"context {k!r} does not have length {order}")
                code = 0
                for i in idx:
                    code = code * m + i
                row = np.zeros(m)
                for sym, p in d["contexts"][k].items():
                    row[alphabet.index(sym)] = float(p)
                codes.append(code)
                rows.append(row)
                weights.append(float(d["context_weights"][k]))
            dropped = []
            for k in d.get("dropped_contexts", []):
                code = 0
                for i in alphabet.split(k):
                    code = code * m + i
                dropped.append(code)
        except (KeyError, TypeError, AttributeError) as exc:
            raise FormatError(f"malformed model description: {exc}") from None
        return cls(order, alphabet, np.array(codes, dtype=np.int64), np.array(rows), np.array(weights),
                   norm, tuple(dropped))

    def to_json(self):
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=1)

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"model file is not valid JSON: {exc}") from None
        return cls.from_dict(d)


def fit_conditional(s, r, normalization=None):
    """Empirical order-r model ``f(w|a) = n(aw) / sum_w' n(aw')``.

    Unseen contexts are omitted. ``r = 0`` gives a single empty context whose
    row holds the symbol frequencies.
    """
    return TransitionCounts.from_sequence(s, r).to_model(s.alphabet, normalization)


def kappa(s, model, order=None):
    """Conditional divergence of the data's order-``order`` transitions from ``model``.

    ``order`` defaults to the model order; a larger value evaluates a
    lower-order model against richer data contexts.
    """
    order = model.order if order is None else order
    if s.alphabet.m != model.m:
        raise DomainError("sequence and model alphabets differ in size")
    return TransitionCounts.from_sequence(s, order).divergence_to(model)


def stationary_distribution(W):
    """Left Perron vector of a stochastic matrix (least squares on ``pi (W - I) = 0``)."""
    W = _stochastic(W)
    m = W.shape[0]
    A = np.vstack([W.T - np.eye(m), np.ones((1, m))])
    b = np.zeros(m + 1)
    b[-1] = 1.0
    pi = np.linalg.lstsq(A, b, rcond=None)[0]
    pi = np.clip(pi, 0.0, None)
    return Distribution(pi / pi.sum())


def _stochastic(W):
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DomainError("transition matrix must be square")
    if np.any(W < 0) or np.any(np.abs(W.sum(axis=1) - 1.0) > 1e-9):
        raise DomainError("transition matrix rows must be distributions")
    return W


def entropy_rate_markov1(W, pi=None):
    """``h = -sum_j pi_j sum_k w_jk ln w_jk`` for a first-order chain."""
    W = _stochastic(W)
    pi = stationary_distribution(W).probs if pi is None else np.asarray(pi, dtype=np.float64)
    if pi.shape != (W.shape[0],):
        raise DomainError("stationary vector has the wrong length")
    if np.max(np.abs(pi @ W - pi)) > STATIONARY_TOL:
        raise DomainError("pi is not stationary for W")
    return float(max(0.0, pi @ _row_entropy(W)))


def redundancy(h, m):
    """``R = 1 - h / ln m``."""
    if m < 2:
        raise DomainError("redundancy needs at least two symbols")
    cap = math.log(m)
    if not -1e-12 <= h <= cap + 1e-12:
        raise DomainError(f"entropy rate {h} outside [0, ln {m}]")
    return min(1.0, max(0.0, 1.0 - h / cap))


def test_order(s, s_order, r_order, alpha=0.05):
    """Likelihood-ratio test of order ``s_order`` against ``r_order``.

    Statistic ``2n [h_{s+1} - h_{r+1}]`` (clamped at zero against boundary
    noise) on ``(m - 1)(m^r - m^s)`` degrees of freedom.
    """
    if not 0 <= s_order < r_order:
        raise DomainError("need 0 <= s_order < r_order")
    if r_order + 1 > s.n:
        raise DomainError(f"order {r_order} needs at least {r_order + 1} symbols")
    m = s.m
    if m < 2:
        raise DomainError("order tests need at least two symbols")
    h_s = cond_entropy(s, s_order)
    h_r = cond_entropy(s, r_order)
    stat = max(0.0, 2.0 * s.n * (h_s - h_r))
    df = (m - 1) * (m ** r_order - m ** s_order)
    return report_from_statistic(stat, df, alpha)


test_order.__test__ = False


def r_max(n, m):
    """``floor(ln n / (2 ln m))`` computed in integers: the largest r with ``m^(2r) <= n``."""
    if m < 2:
        raise DomainError("need at least two symbols")
    r = 0
    while m ** (2 * (r + 1)) <= n:
        r += 1
    return r


@dataclass(frozen=True)
class ScanStep:
    r: int
    h_r: float
    report: object

    def to_dict(self):
        return {"r": self.r, "h_r": self.h_r, **self.report.to_dict()}


def order_scan(s, alpha=0.05, max_order=None):
    """Sequential tests of order ``r - 1`` against ``r`` for ``r = 1..r_max``.

    Returns one :class:`ScanStep` per ``r`` with ``h_r`` and the test report.
    """
    m = s.m
    if m < 2:
        raise DomainError("order scan needs at least two symbols")
    if s.n < m * m:
        raise DomainError(f"sequence too short for an order scan (n={s.n} < m^2={m * m})")
    top = r_max(s.n, m) if max_order is None else int(max_order)
    if top < 1:
        raise DomainError("maximum order must be at least 1")
    if top + 1 > s.n:
        raise DomainError("maximum order too large for the sequence")
    H = [gram_entropy(s, k) for k in range(top + 2)]
    steps = []
    for r in range(1, top + 1):
        h_prev = H[r] - H[r - 1]
        h_next = H[r + 1] - H[r]
        stat = max(0.0, 2.0 * s.n * (h_prev - h_next))
        df = (m - 1) ** 2 * m ** (r - 1)
        steps.append(ScanStep(r, h_prev, report_from_statistic(stat, df, alpha)))
    return steps


def detect_order(steps):
    """Largest ``r`` whose test rejects, or 0."""
    rejected = [st.r for st in steps if st.report.reject]
    return max(rejected) if rejected else 0


def simulate_order3_chain(n, seed):
    """Binary sequence ``X_t = a`` iff ``(Z_t + Z_{t-1} + Z_{t-2} + Z_{t-3}) / 4 >= 1/2``, Z i.i.d. U(0,1)."""
    if n < 1:
        raise DomainError("length must be positive")
    rng = np.random.default_rng(seed)
    z = rng.random(n + 3)
    avg = (z[3:] + z[2:-1] + z[1:-2] + z[:-3]) / 4.0
    return SymbolSequence(Alphabet(("a", "b")), np.where(avg >= 0.5, 0, 1))


def _cum(p, axis=-1):
    c = np.cumsum(p, axis=axis)
    last = np.take(c, [-1], axis=axis)
    c = c / last
    # pin the end at exactly 1 so u < 1 never falls past the last positive entry
    idx = [slice(None)] * c.ndim
    idx[axis] = -1
    c[tuple(idx)] = 1.0
    return c


def generate(model, length, seed, return_restarts=False):
    """Sample ``length`` symbols from ``model``.

    The first context is drawn from ``context_weights``. Each next symbol
    comes from the row of the last ``r`` symbols by inverse CDF. If that
    context has no row (possible after mixing), a fresh context is drawn
    from the weights and written out, and the restart is counted.
    """
    r = model.order
    if length < max(r, 1):
        raise DomainError(f"length must be at least max(order, 1) = {max(r, 1)}")
    rng = np.random.default_rng(seed)
    u_init = rng.random()
    u_step = rng.random(length)
    u_restart = rng.random(length)
    out, restarts = _kernels.sample_chain(
        model.ctx_codes, _cum(model.rows, axis=1), _cum(model.context_weights),
        r, model.m, int(length), u_init, u_step, u_restart,
    )
    seq = SymbolSequence(model.alphabet, out)
    return (seq, restarts) if return_restarts else seq


def anneal(model, beta):
    """Rows raised to the power ``beta`` and renormalized; supports are kept."""
    if not beta > 0 or math.isinf(beta):
        raise DomainError("beta must be positive and finite")
    rows = model.rows
    pos = rows > 0
    logs = np.where(pos, np.log(np.where(pos, rows, 1.0)) * beta, -np.inf)
    logs -= logs.max(axis=1, keepdims=True)
    w = np.where(pos, np.exp(logs), 0.0)
    return model._replace(rows=w / w.sum(axis=1, keepdims=True))


def _check_compatible(mf, mg):
    if mf.alphabet != mg.alphabet:
        raise DomainError("models use different alphabets")
    if mf.order != mg.order:
        raise DomainError(f"models have different orders ({mf.order} vs {mg.order})")


def _aligned(mf, mg):
    codes = np.union1d(mf.ctx_codes, mg.ctx_codes)
    m = mf.m

    def spread(model):
        rows = np.zeros((codes.size, m))
        w = np.zeros(codes.size)
        present = np.zeros(codes.size, dtype=bool)
        j = np.searchsorted(codes, model.ctx_codes)
        rows[j] = model.rows
        w[j] = model.context_weights
        present[j] = True
        return rows, w, present

    return codes, spread(mf), spread(mg)


def mix_additive(mf, mg, lam):
    """Row-wise ``lam f + (1 - lam) g``; a context present in one model only keeps that row."""
    _check_compatible(mf, mg)
    if not 0.0 <= lam <= 1.0:
        raise DomainError("lambda must lie in [0, 1]")
    codes, (rf, wf, pf), (rg, wg, pg) = _aligned(mf, mg)
    both = pf & pg
    rows = np.where(pf[:, None], rf, rg)
    rows[both] = lam * rf[both] + (1.0 - lam) * rg[both]
    w = lam * wf + (1.0 - lam) * wg
    # at an endpoint the other model's contexts get zero weight and drop out
    keep = w > 0
    return mf._replace(ctx_codes=codes[keep], rows=rows[keep], context_weights=w[keep] / w[keep].sum(),
                       dropped_contexts=())


def mix_multiplicative(mf, mg, mu):
    """Row-wise geometric mixture ``f^mu g^(1-mu) / Z``.

    Transitions survive only where both rows are positive. Contexts whose
    rows share no symbol, or that appear in only one model, are dropped and
    listed in ``dropped_contexts``; generation restarts if it reaches one.
    Context weights are mixed geometrically as well and renormalized.
    """
    _check_compatible(mf, mg)
    if not 0.0 < mu < 1.0:
        raise DomainError("mu must lie in (0, 1)")
    codes, (rf, wf, pf), (rg, wg, pg) = _aligned(mf, mg)
    with np.errstate(divide="ignore"):
        logs = mu * np.log(rf) + (1.0 - mu) * np.log(rg)
    alive = (pf & pg) & np.isfinite(logs).any(axis=1)
    if not alive.any():
        raise InfeasibleError("no context has a transition common to both models")
    logs = logs[alive]
    logs -= logs.max(axis=1, keepdims=True)
    rows = np.exp(logs)
    rows /= rows.sum(axis=1, keepdims=True)
    w = np.exp(mu * np.log(wf[alive]) + (1.0 - mu) * np.log(wg[alive]))
    return mf._replace(ctx_codes=codes[alive], rows=rows, context_weights=w / w.sum(),
                       dropped_contexts=tuple(int(c) for c in codes[~alive]))
