import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relent import _kernels
from relent._accel import HAVE_NUMBA
from relent.markov import _cum, fit_conditional, ingest_corpus

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba backend not active")


@needs_numba
@given(st.integers(0, 2**32 - 1), st.integers(1, 30), st.integers(0, 6), st.integers(1, 400))
def test_gram_codes_agree(seed, m, r, n):
    if r > n:
        return
    data = np.random.default_rng(seed).integers(0, m, n)
    np.testing.assert_array_equal(_kernels.gram_codes_numba(data, r, m), _kernels.gram_codes_numpy(data, r, m))


def test_gram_codes_reference():
    data = np.array([1, 0, 2, 2, 1])
    # base-3 codes of 102, 022, 221
    np.testing.assert_array_equal(_kernels.gram_codes_numpy(data, 3, 3), [11, 8, 25])
    np.testing.assert_array_equal(_kernels.gram_codes(data, 3, 3), [11, 8, 25])


def _chain_inputs(seed, r, length):
    text = "the quick brown fox jumps over the lazy dog and runs far away " * 3
    model = fit_conditional(ingest_corpus(text), r)
    rng = np.random.default_rng(seed)
    return (
        model.ctx_codes, _cum(model.rows, axis=1), _cum(model.context_weights), r, model.m, length,
        rng.random(), rng.random(length), rng.random(length),
    )


@needs_numba
@given(st.integers(0, 2**32 - 1), st.integers(0, 4), st.integers(5, 500))
def test_sample_chain_agree(seed, r, length):
    if length < r:
        return
    args = _chain_inputs(seed, r, length)
    a, ra = _kernels.sample_chain_numba(*args)
    b, rb = _kernels.sample_chain_numpy(*args)
    np.testing.assert_array_equal(a, b)
    assert ra == rb


@needs_numba
def test_sample_chain_agree_with_restarts():
    ctx = np.array([0, 1])
    cum_rows = np.array([[0.0, 1.0, 1.0], [0.5, 0.5, 1.0]])  # symbol 2 has no row
    ctx_cum = np.array([0.5, 1.0])
    rng = np.random.default_rng(0)
    args = (ctx, cum_rows, ctx_cum, 1, 3, 300, rng.random(), rng.random(300), rng.random(300))
    a, ra = _kernels.sample_chain_numba(*args)
    b, rb = _kernels.sample_chain_numpy(*args)
    np.testing.assert_array_equal(a, b)
    assert ra == rb > 0


def test_env_flag_selects_numpy():
    code = (
        "import relent, relent._kernels as k;"
        "print(relent.backend(), k.gram_codes is k.gram_codes_numpy)"
    )
    env = dict(os.environ, RELENT_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]


def test_generation_identical_across_backends(tmp_path):
    code = (
        "import sys, numpy as np;"
        "from relent.markov import fit_conditional, generate, ingest_corpus;"
        "s = ingest_corpus(open(sys.argv[1]).read());"
        "print(generate(fit_conditional(s, 3), 2000, seed=11).text())"
    )
    fixture = os.path.join(os.path.dirname(__file__), "fixtures", "binary_202.txt")
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, RELENT_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code, fixture], env=env, capture_output=True, text=True, check=True)
        outs.append(res.stdout)
    assert outs[0] == outs[1] and len(outs[0].strip()) == 2000
