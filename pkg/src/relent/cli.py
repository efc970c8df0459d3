"""Command-line front end: ``relent <command> [options]``.

Every command writes one JSON report (to ``--out`` or standard output) that
starts with the effective configuration, seed included. Reports are built
completely in memory before anything is written, so failures leave no
partial output. Logs go to standard error.

Exit codes: 0 success, 1 usage error, 2 data or format error, 3 solver did
not converge, 4 infeasible or degenerate input.
"""

import argparse
import logging
import math
import sys

import numpy as np

from . import __version__
from . import bayes, em, estimators, hypothesis_tests as ht, io, markov, maxent
from ._accel import backend
from .errors import ConvergenceError, DomainError, FormatError, InfeasibleError
from .simplex import (
    Distribution,
    JointTable,
    Partition,
    SquareTable,
    ThreeWayTable,
    chi_square_stat,
    entropy,
    relative_entropy,
)

log = logging.getLogger("relent")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CONVERGENCE, EXIT_INFEASIBLE = 0, 1, 2, 3, 4
DEFAULT_SEED = 20240101


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# argument types; bad values surface as usage errors before any work starts

def _probability(text):
    x = float(text)
    if not 0.0 < x < 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in (0, 1)")
    return x


def _unit_closed(text):
    x = float(text)
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return x


def _positive_int(text):
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text} is not an integer") from None
    if x < 1:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return x


def _nonneg_int(text):
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text} is not an integer") from None
    if x < 0:
        raise argparse.ArgumentTypeError(f"{text} is negative")
    return x


def _positive_float(text):
    x = float(text)
    if not x > 0 or math.isinf(x):
        raise argparse.ArgumentTypeError(f"{text} is not a positive finite number")
    return x


def _finite_float(text):
    x = float(text)
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"{text} is not finite")
    return x


# input helpers

def _distribution(path, counts=False):
    values, labels = io.read_vector(path)
    if counts:
        return Distribution.from_counts(values, labels), float(values.sum())
    return Distribution(values, labels), None


def _n_from(args, counted_total):
    if args.n is not None:
        return args.n
    if counted_total is not None:
        if counted_total != int(counted_total):
            raise FormatError("counts must be integers to infer the sample size")
        return int(counted_total)
    raise UsageError("--n is required unless --counts is given")


def _table(path, counts=False, kind=JointTable):
    arr, rl, cl = io.read_table(path)
    total = float(arr.sum()) if counts else None
    if counts:
        if np.any(arr < 0) or arr.sum() <= 0:
            raise DomainError("counts must be nonnegative with a positive total")
        arr = arr / arr.sum()
    if kind is ThreeWayTable:
        if arr.ndim != 3:
            raise FormatError("three-way table expected (JSON nested arrays, depth 3)")
        return ThreeWayTable(arr), total
    if arr.ndim != 2:
        raise FormatError("two-way table expected")
    return kind(arr, rl, cl), total


def _constraints(path):
    return [maxent.LinearConstraint(a, t) for a, t in io.read_constraints(path)]


def _norm(args):
    return markov.NormalizationSpec(
        lowercase=not args.keep_case,
        letters_only=not args.keep_all,
        keep=args.keep,
        collapse_whitespace=not args.keep_whitespace,
        strip_ends=not args.keep_whitespace,
    )


def _corpus(args):
    return markov.ingest_corpus(io.read_corpus(args.input), _norm(args))


def _load_model(path):
    # accepts a bare model file or a full `markov train` report
    d = io.load_json(path)
    if isinstance(d, dict) and "result" in d:
        d = d["result"]
    return markov.ConditionalModel.from_dict(d)


def _table_payload(t):
    out = {"probs": t.probs}
    if getattr(t, "row_labels", None) is not None:
        out["row_labels"] = list(t.row_labels)
        out["col_labels"] = list(t.col_labels)
    return out


def _fit_payload(fit):
    return {
        "fitted": _table_payload(fit.fitted),
        "divergence": fit.divergence,
        "dim_family": fit.dim_family,
        "dim_saturated": fit.dim_saturated,
        "df": fit.df,
        "iterations": fit.iterations,
        "converged": fit.converged,
    }


def _maxent_payload(res):
    return {
        "projected": res.projected.probs,
        "multipliers": res.multipliers,
        "divergence": res.divergence,
        "iterations": res.iterations,
        "converged": res.converged,
        "boundary": res.boundary,
    }


# command implementations: each returns the "result" part of the report

def cmd_entropy(args):
    f, _ = _distribution(args.f, args.counts)
    return {"entropy": entropy(f), "m": f.m}


def cmd_kl(args):
    f, _ = _distribution(args.f, args.counts)
    g, _ = _distribution(args.g)
    k = relative_entropy(f, g)
    # Pearson chi-square per 2n: the quadratic approximation of the divergence
    return {"divergence": k, "chi_square_over_2n": chi_square_stat(f, g, 1, allow_inf=True) / 2.0}


def cmd_test_simple(args):
    f, total = _distribution(args.data, args.counts)
    g, _ = _distribution(args.model)
    return ht.test_simple(f, g, _n_from(args, total), args.alpha).to_dict()


def cmd_test_composite(args):
    f, total = _distribution(args.data, args.counts)
    fitted, _ = _distribution(args.fitted)
    return ht.test_composite(f, fitted, args.dim_s, args.dim_m, _n_from(args, total), args.alpha).to_dict()


def cmd_test_independence(args):
    t, total = _table(args.table, args.counts)
    rep = ht.test_independence(t, _n_from(args, total), args.alpha).to_dict()
    rep["mutual_information"] = relative_entropy(t.probs, t.product_of_marginals())
    return rep


def cmd_test_nested(args):
    f, total = _distribution(args.data, args.counts)
    f0, _ = _distribution(args.fit0)
    f1, _ = _distribution(args.fit1)
    return ht.test_nested(f, f0, f1, args.df_delta, _n_from(args, total), args.alpha).to_dict()


def cmd_fit(args):
    if args.family == "threeway":
        if args.model is None:
            raise UsageError("fit threeway needs --model L|M|N")
        t, _ = _table(args.table, args.counts, ThreeWayTable)
        return _fit_payload(estimators.fit_threeway(t, args.model))
    kind = JointTable if args.family == "independence" else SquareTable
    t, _ = _table(args.table, args.counts, kind)
    if args.family == "independence":
        fit = estimators.fit_independence(t)
    elif args.family == "symmetry":
        fit = estimators.fit_symmetry(t)
    else:
        fit = estimators.fit_quasi_symmetry(t, tol=args.tol, max_iter=args.max_iter)
    return _fit_payload(fit)


def cmd_maxent(args):
    kind = args.kind
    if kind == "gibbs":
        values, _ = io.read_vector(args.energies)
        return {"distribution": maxent.boltzmann_gibbs(values, args.beta).probs}
    if kind == "symmetric":
        t, _ = _table(args.prior, False, SquareTable)
        return _maxent_payload(maxent.maxent_symmetric(t))
    prior, _ = _distribution(args.prior)
    if kind == "linear":
        cs = _constraints(args.constraint)
        if len(cs) != 1:
            raise UsageError("maxent linear takes exactly one constraint; use 'maxent multi'")
        return _maxent_payload(maxent.maxent_linear(prior, cs[0], tol=args.tol))
    if kind == "multi":
        return _maxent_payload(maxent.maxent_multi(prior, _constraints(args.constraint),
                                                   tol=args.tol, max_iter=args.max_iter))
    if kind == "unobserved":
        if args.category is None:
            raise UsageError("maxent unobserved needs --category")
        return _maxent_payload(maxent.maxent_unobserved(prior, args.category))
    if kind == "coarse":
        if args.groups is None or args.observed is None:
            raise UsageError("maxent coarse needs --groups and --observed")
        part = Partition(_parse_groups(args.groups))
        FD, _ = _distribution(args.observed)
        return _maxent_payload(maxent.maxent_coarse(prior, part, FD))
    raise UsageError(f"unknown maxent kind {kind}")


def _parse_groups(text):
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--groups must be comma-separated group indices, got {text!r}") from None


def cmd_sanov(args):
    prior, _ = _distribution(args.prior)
    cs = _constraints(args.constraint)
    if len(cs) != 1:
        raise UsageError("sanov-check takes exactly one constraint")
    if args.batches > args.trials:
        raise UsageError("--batches cannot exceed --trials")
    rep = maxent.sanov_mc_check(prior, cs[0], args.n, args.trials, args.seed, method=args.method,
                                batches=args.batches, threads=args.threads)
    return rep.to_dict()


def cmd_bayes(args):
    models, priors = io.read_hypotheses(args.hypotheses)
    h = bayes.HypothesisSet(tuple(models), priors)
    f, total = _distribution(args.data, args.counts)
    n = _n_from(args, total)
    post = bayes.posterior_over_hypotheses(h, f, n)
    return {
        "posterior": post.probs,
        "scores": bayes.penalized_score(h, f, n),
        "selected": bayes.select(h, f, n),
    }


def cmd_em(args):
    components, observed = io.read_em_problem(args.problem)
    p = em.MixtureProblem(components, observed)
    rho0 = None
    if args.rho0 is not None:
        rho0 = [float(x) for x in args.rho0.split(",")]
    trace = em.em_fit(p, rho0, tol=args.tol, max_iter=args.max_iter)
    if not trace.converged:
        raise ConvergenceError(f"EM did not converge in {args.max_iter} iterations", iterations=args.max_iter)
    out = trace.to_dict()
    out["predicted"] = em.mixture_predict(p, trace.rho).probs
    return out


def cmd_markov(args):
    action = args.action
    if action == "train":
        s = _corpus(args)
        model = markov.fit_conditional(s, args.order, _norm(args))
        out = model.to_dict()
        out["n"] = s.n
        return out
    if action == "counts":
        s = _corpus(args)
        t = markov.count_ngrams(s, args.order, shards=args.threads, threads=args.threads)
        return {"order": args.order, "n": s.n, "m": s.m, "total": t.total, "counts": t.to_dict()}
    if action == "entropy":
        s = _corpus(args)
        top = args.max_order if args.max_order is not None else max(1, markov.r_max(s.n, s.m)) + 1
        H = [markov.gram_entropy(s, r) for r in range(top + 1)]
        h = [H[r] - H[r - 1] for r in range(1, top + 1)]
        out = {"n": s.n, "m": s.m, "alphabet": list(s.alphabet.symbols), "H": H, "h": h,
               "r_max_formula": markov.r_max(s.n, s.m) if s.m > 1 else None}
        if s.m > 1:
            out["redundancy_h_last"] = markov.redundancy(min(max(h[-1], 0.0), math.log(s.m)), s.m)
        return out
    if action == "order-scan":
        s = _corpus(args)
        steps = markov.order_scan(s, args.alpha, args.max_order)
        return {
            "n": s.n,
            "m": s.m,
            "r_max_formula": markov.r_max(s.n, s.m),
            "note": "r_max = floor(ln n / (2 ln m)); treat orders near it as over-parameterized",
            "steps": [st.to_dict() for st in steps],
            "detected_order": markov.detect_order(steps),
        }
    if action == "generate":
        model = _load_model(args.model)
        seq, restarts = markov.generate(model, args.length, args.seed, return_restarts=True)
        return {"text": seq.text(), "length": seq.n, "restarts": restarts,
                "h_next": markov.cond_entropy(seq, model.order) if seq.n > model.order else None}
    if action == "anneal":
        return markov.anneal(_load_model(args.model), args.beta).to_dict()
    if action == "mix":
        mf, mg = _load_model(args.model), _load_model(args.other)
        if (args.lam is None) == (args.mu is None):
            raise UsageError("markov mix needs exactly one of --lambda or --mu")
        if args.lam is not None:
            return markov.mix_additive(mf, mg, args.lam).to_dict()
        if not 0.0 < args.mu < 1.0:
            raise UsageError("--mu must lie in (0, 1)")
        return markov.mix_multiplicative(mf, mg, args.mu).to_dict()
    raise UsageError(f"unknown markov action {action}")


EPILOG = """\
examples:
  relent kl --f coin_d.csv --g coin_m.csv
  relent test simple --data coin_d.csv --model coin_m.csv --n 100
  relent fit qs --table flows.csv --tol 1e-10
  relent maxent linear --prior fair_die.csv --constraint mean4.json
  relent sanov-check --prior coin_m.csv --constraint heads70.json --n 50 100 200 --trials 100000 --seed 1
  relent markov counts --in binary_202.txt --order 4
  relent markov order-scan --in corpus.txt --alpha 0.05

exit codes: 0 ok, 1 usage, 2 data/format, 3 no convergence, 4 infeasible/degenerate
"""


def _common(p, seed=False):
    p.add_argument("--out", help="write the JSON report here instead of standard output")
    p.add_argument("--threads", type=_positive_int, default=1, help="worker cap for parallel sections (default 1)")
    if seed:
        p.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED,
                       help=f"RNG seed, echoed in the report (default {DEFAULT_SEED})")


def _tolerances(p, tol=1e-10, max_iter=10_000):
    p.add_argument("--tol", type=_positive_float, default=tol, help=f"solver tolerance (default {tol:g})")
    p.add_argument("--max-iter", type=_positive_int, default=max_iter,
                   help=f"iteration cap (default {max_iter})")


def _sample(p):
    p.add_argument("--n", type=_positive_int, help="sample size (inferred from --counts input if omitted)")
    p.add_argument("--counts", action="store_true", help="data file holds counts, not probabilities")
    p.add_argument("--alpha", type=_probability, default=0.05, help="significance level (default 0.05)")


def _corpus_flags(p):
    p.add_argument("--in", dest="input", required=True, help="UTF-8 corpus file")
    p.add_argument("--keep", default="", help="punctuation characters to keep, e.g. \"-'\"")
    p.add_argument("--keep-case", action="store_true", help="do not fold to lower case")
    p.add_argument("--keep-all", action="store_true", help="keep every character, not only letters")
    p.add_argument("--keep-whitespace", action="store_true", help="do not collapse whitespace runs")


def build_parser():
    parser = _Parser(prog="relent", description="Relative-entropy inference for discrete data and Markov text.",
                     epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def add(name, func, help_text, example):
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=f"example:\n  {example}",
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        if func is not None:
            p.set_defaults(func=func)
        return p

    p = add("entropy", cmd_entropy, "Shannon entropy of a distribution (nats)",
            "relent entropy --f coin_d.csv")
    p.add_argument("--f", required=True)
    p.add_argument("--counts", action="store_true")
    _common(p)

    p = add("kl", cmd_kl, "relative entropy K(f||g) and its chi-square approximation",
            "relent kl --f coin_d.csv --g coin_m.csv   # (0.7,0.3) vs (0.5,0.5): 0.0823")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--counts", action="store_true", help="--f holds counts")
    _common(p)

    tp = add("test", None, "chi-square calibrated likelihood-ratio tests",
             "relent test simple --data coin_d.csv --model coin_m.csv --n 100")
    tsub = tp.add_subparsers(dest="kind", parser_class=_Parser, required=True)
    p = tsub.add_parser("simple", help="goodness of fit to a fixed model",
                        epilog="example:\n  relent test simple --data coin_d.csv --model coin_m.csv --n 100",
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    p.set_defaults(func=cmd_test_simple)
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    _sample(p)
    _common(p)
    p = tsub.add_parser("composite", help="fit to a model family through its ML projection",
                        epilog="example:\n  relent test composite --data d.csv --fitted fit.csv --dim-s 5 --dim-m 2 --n 400",
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    p.set_defaults(func=cmd_test_composite)
    p.add_argument("--data", required=True)
    p.add_argument("--fitted", required=True)
    p.add_argument("--dim-s", type=_positive_int, required=True, help="dimension of the saturated model")
    p.add_argument("--dim-m", type=_nonneg_int, required=True, help="free parameters of the family")
    _sample(p)
    _common(p)
    p = tsub.add_parser("independence", help="independence of rows and columns",
                        epilog="example:\n  relent test independence --table table.csv --counts",
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    p.set_defaults(func=cmd_test_independence)
    p.add_argument("--table", required=True)
    _sample(p)
    _common(p)
    p = tsub.add_parser("nested", help="smaller family within a larger one",
                        epilog="example:\n  relent test nested --data d.csv --fit0 sym.csv --fit1 qs.csv --df-delta 3 --n 500",
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    p.set_defaults(func=cmd_test_nested)
    p.add_argument("--data", required=True)
    p.add_argument("--fit0", required=True)
    p.add_argument("--fit1", required=True)
    p.add_argument("--df-delta", type=_positive_int, required=True)
    _sample(p)
    _common(p)

    p = add("fit", cmd_fit, "maximum-likelihood projections onto model families",
            "relent fit qs --table flows.csv")
    p.add_argument("family", choices=["independence", "symmetry", "qs", "threeway"])
    p.add_argument("--table", required=True, help="CSV/JSON table; three-way tables as JSON nested arrays")
    p.add_argument("--model", choices=list(estimators.THREEWAY_MODELS), help="three-way model")
    p.add_argument("--counts", action="store_true")
    _tolerances(p)
    _common(p)

    p = add("maxent", cmd_maxent, "maximum-entropy projections of a prior",
            "relent maxent linear --prior fair_die.csv --constraint mean4.json   # theta = 0.175")
    p.add_argument("kind", choices=["linear", "multi", "gibbs", "coarse", "unobserved", "symmetric"])
    p.add_argument("--prior", help="prior distribution (or square table for 'symmetric')")
    p.add_argument("--constraint", help="JSON {coeffs, target} or an array of them")
    p.add_argument("--energies", help="energy vector for 'gibbs'")
    p.add_argument("--beta", type=_finite_float, default=1.0, help="inverse temperature for 'gibbs'")
    p.add_argument("--category", type=_nonneg_int, help="0-based excluded category for 'unobserved'")
    p.add_argument("--groups", help="comma-separated 0-based group index per category for 'coarse'")
    p.add_argument("--observed", help="observed group distribution for 'coarse'")
    _tolerances(p, tol=1e-12)
    _common(p)

    p = add("sanov-check", cmd_sanov, "Monte-Carlo check of the large-deviation rate",
            "relent sanov-check --prior coin_m.csv --constraint heads70.json --n 50 100 200 --trials 100000")
    p.add_argument("--prior", required=True)
    p.add_argument("--constraint", required=True)
    p.add_argument("--n", type=_positive_int, nargs="+", default=[50, 100, 200])
    p.add_argument("--trials", type=_positive_int, default=100_000)
    p.add_argument("--method", choices=["tilted", "direct"], default="tilted")
    p.add_argument("--batches", type=_positive_int, default=8)
    _common(p, seed=True)

    bp = add("bayes", None, "Bayesian selection among simple hypotheses",
             "relent bayes select --hypotheses hyp.json --data coin_d.csv --n 100")
    bsub = bp.add_subparsers(dest="kind", parser_class=_Parser, required=True)
    p = bsub.add_parser("select", help="posterior over hypotheses",
                        epilog="example:\n  relent bayes select --hypotheses hyp.json --data coin_d.csv --n 100",
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    p.set_defaults(func=cmd_bayes)
    p.add_argument("--hypotheses", required=True, help="JSON list of {prior, probs}")
    p.add_argument("--data", required=True)
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--counts", action="store_true")
    _common(p)

    ep = add("em", None, "EM for mixtures of fixed components",
             "relent em fit --problem mixture.json")
    esub = ep.add_subparsers(dest="kind", parser_class=_Parser, required=True)
    p = esub.add_parser("fit", help="fit mixture weights",
                        epilog="example:\n  relent em fit --problem mixture.json --tol 1e-10",
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    p.set_defaults(func=cmd_em)
    p.add_argument("--problem", required=True, help="JSON {components: [[...]], observed: [...]}")
    p.add_argument("--rho0", help="comma-separated starting weights (default uniform)")
    _tolerances(p)
    _common(p)

    mp = add("markov", None, "n-gram Markov models of text",
             "relent markov train --order 3 --in corpus.txt --out model.json")
    msub = mp.add_subparsers(dest="action", parser_class=_Parser, required=True)

    def madd(name, help_text, example):
        q = msub.add_parser(name, help=help_text, epilog=f"example:\n  {example}",
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        q.set_defaults(func=cmd_markov)
        return q

    p = madd("train", "fit an order-r conditional model", "relent markov train --order 3 --in corpus.txt --out m.json")
    _corpus_flags(p)
    p.add_argument("--order", type=_nonneg_int, required=True)
    _common(p)
    p = madd("counts", "r-gram counts", "relent markov counts --order 4 --in binary_202.txt")
    _corpus_flags(p)
    p.add_argument("--order", type=_nonneg_int, required=True)
    _common(p)
    p = madd("entropy", "block and conditional entropies", "relent markov entropy --in corpus.txt --max-order 5")
    _corpus_flags(p)
    p.add_argument("--max-order", type=_positive_int)
    _common(p)
    p = madd("order-scan", "sequential order tests", "relent markov order-scan --in corpus.txt --alpha 0.05")
    _corpus_flags(p)
    p.add_argument("--alpha", type=_probability, default=0.05)
    p.add_argument("--max-order", type=_positive_int, help="override r_max")
    _common(p)
    p = madd("generate", "sample text from a model", "relent markov generate --model m.json --length 500 --seed 7")
    p.add_argument("--model", required=True)
    p.add_argument("--length", type=_positive_int, required=True)
    _common(p, seed=True)
    p = madd("anneal", "heat (beta<1) or cool (beta>1) a model", "relent markov anneal --model m.json --beta 0.5")
    p.add_argument("--model", required=True)
    p.add_argument("--beta", type=_positive_float, required=True)
    _common(p)
    p = madd("mix", "additive (--lambda) or multiplicative (--mu) mixture",
             "relent markov mix --model en.json --other fr.json --mu 0.5")
    p.add_argument("--model", required=True)
    p.add_argument("--other", required=True)
    p.add_argument("--lambda", dest="lam", type=_unit_closed)
    p.add_argument("--mu", type=_unit_closed)
    _common(p)
    return parser


def _config(args):
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "verbose")}
    cfg["backend"] = backend()
    return cfg


def run(argv=None):
    """Run the CLI; returns the exit code instead of exiting."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    log.info("running %s", args.command)
    try:
        result = args.func(args)
        text = io.dumps({"command": args.command, "config": _config(args), "result": result})
        if args.out:
            io.write_atomic(text, args.out)
        else:
            sys.stdout.write(text)
            sys.stdout.flush()
    except UsageError as exc:
        print(f"relent: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"relent: no convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except InfeasibleError as exc:
        print(f"relent: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (FormatError, DomainError) as exc:
        print(f"relent: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
