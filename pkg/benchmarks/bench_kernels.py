"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--n 2000000] [--repeat 5]

Both implementations are called directly, so the env flag is irrelevant
here. The first numba call (compilation or cache load) is excluded.
"""

import argparse
import time

import numpy as np

from relent import _kernels
from relent._accel import HAVE_NUMBA
from relent.markov import Alphabet, SymbolSequence, _cum, fit_conditional


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2_000_000, help="sequence length for gram coding")
    ap.add_argument("--length", type=int, default=200_000, help="symbols to generate")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is unavailable or disabled; nothing to compare")

    rng = np.random.default_rng(0)
    m = 27
    data = rng.integers(0, m, args.n)
    rows = []
    for r in (1, 3, 5):
        _kernels.gram_codes_numba(data[:100], r, m)
        assert np.array_equal(_kernels.gram_codes_numba(data, r, m), _kernels.gram_codes_numpy(data, r, m))
        t_nb = best_of(lambda: _kernels.gram_codes_numba(data, r, m), args.repeat)
        t_np = best_of(lambda: _kernels.gram_codes_numpy(data, r, m), args.repeat)
        rows.append((f"gram_codes n={args.n} r={r}", t_nb, t_np))

    # a skewed order-3 model over 27 symbols, fitted on a synthetic corpus
    seq = SymbolSequence(Alphabet(tuple(chr(97 + k) for k in range(m))), rng.zipf(1.6, 300_000) % m)
    model = fit_conditional(seq, 3)
    u = rng.random(args.length)
    chain_args = (model.ctx_codes, _cum(model.rows, axis=1), _cum(model.context_weights),
                  3, m, args.length, 0.5, u, u[::-1].copy())
    _kernels.sample_chain_numba(*chain_args)
    t_nb = best_of(lambda: _kernels.sample_chain_numba(*chain_args), args.repeat)
    t_np = best_of(lambda: _kernels.sample_chain_numpy(*chain_args), max(1, args.repeat // 2))
    rows.append((f"sample_chain length={args.length} r=3", t_nb, t_np))

    print(f"{'kernel':<36}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for name, a, b in rows:
        print(f"{name:<36}{a:>10.4f}{b:>10.4f}{b / a:>8.1f}x")


if __name__ == "__main__":
    main()
