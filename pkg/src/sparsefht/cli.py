"""Command-line entry point: ``sparsefht <command> [options]``."""
from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction

import numpy as np

from . import analysis, experiments
from .hashing import CONSTRUCTIONS, HashFamily, build_family, compute_hash_state
from .peeling import MAX_PASSES, decode_state, format_spectrum_csv
from .validation import resolve_bins, signal_bits
from .wht import fht, read_signal, write_signal


class UsageError(Exception):
    pass


def _number_list(text: str, kind=float) -> list:
    try:
        return [kind(Fraction(t.strip())) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def _fraction(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad number {text!r}") from exc


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--construction", choices=CONSTRUCTIONS, default="circular")
    p.add_argument("--n", type=int, help="signal exponent, N = 2^n")
    p.add_argument("--alpha", type=_fraction, help="sparsity exponent, K = N^alpha")
    p.add_argument("--b-bits", type=int, help="bins per hash, B = 2^b")
    p.add_argument("--c-hashes", type=int, help="number of hashes C")
    p.add_argument("--trials", type=int)
    p.add_argument("--max-passes", type=int, default=MAX_PASSES)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="sparsefht", description="Sparse fast Walsh-Hadamard transform toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fht", parents=[common], help="full transform of a .f64le signal file")
    p.add_argument("input")

    for name, text in (("hash", "emit the hashed bins as CSV"), ("decode", "recover the sparse spectrum")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("input")
        p.add_argument("--family", help="load the hash family from this file")
        p.add_argument("--save-family", help="write the hash family used to this file")
        p.add_argument("--sparsity", type=int, help="expected K; sets B to the nearest power of two")
        if name == "decode":
            p.add_argument("--report", help="write the JSON decode report here (default: stderr)")

    p = sub.add_parser("de", parents=[common], help="density evolution threshold, iteration or degree pmf")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--beta", type=float, help="iterate the recursion at this load instead")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--pmf", action="store_true", help="print the Poisson check-degree pmf at --beta")
    p.add_argument("--max-degree", type=int, default=10)

    p = sub.add_parser("exp-success", parents=[common], help="success rate over (alpha, C)")
    p.add_argument("--alphas", type=_number_list, help="comma list, fractions allowed")
    p.add_argument("--c-values", type=lambda s: _number_list(s, int))
    p.add_argument("--beta", type=float, default=1.0, help="target bin load K/B")

    p = sub.add_parser("exp-beta", parents=[common], help="success rate against bin load at fixed B")
    p.add_argument("--alphas", type=_number_list)
    p.add_argument("--betas", type=_number_list, help="target loads; converted to alphas")

    p = sub.add_parser("bench", parents=[common], help="runtime of full vs sparse transform")
    p.add_argument("--n-values", type=lambda s: _number_list(s, int), default=[15, 18])
    p.add_argument("--alphas", type=_number_list)
    p.add_argument("--reps", type=int, default=7)

    p = sub.add_parser("rs2", parents=[common], help="support size under sampling with replacement")
    p.add_argument("--sparsity", type=int)
    return parser


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _family_for(args, x) -> HashFamily:
    n = signal_bits(x)
    if args.family:
        family = HashFamily.load(args.family)
        if family.n != n:
            raise UsageError(f"family is for n={family.n}, signal has n={n}")
    else:
        b = resolve_bins(n, args.b_bits, args.alpha, args.sparsity)
        C = args.c_hashes or 4
        family = build_family(args.construction, n, b, C, args.seed)
    if args.save_family:
        family.save(args.save_family)
    return family


def cmd_fht(args) -> int:
    if not args.out:
        raise UsageError("fht needs --out")
    write_signal(args.out, fht(read_signal(args.input)))
    return 0


def cmd_hash(args) -> int:
    x = read_signal(args.input)
    family = _family_for(args, x)
    state = compute_hash_state(x, family)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["c", "d", "k", "value"])
    C, D1, B = state.U.shape
    for c in range(C):
        for d in range(D1):
            for k in range(B):
                w.writerow([c, d, k, repr(float(state.U[c, d, k]))])
    _emit(args, buf.getvalue())
    return 0


def cmd_decode(args) -> int:
    x = read_signal(args.input)
    family = _family_for(args, x)
    report = decode_state(compute_hash_state(x, family), family, max_passes=args.max_passes)
    _emit(args, format_spectrum_csv(report.recovered))
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.to_json() + "\n")
    else:
        print(report.to_json(), file=sys.stderr)
    return 0 if report.success else 1


def cmd_de(args) -> int:
    C = args.c_hashes or 3
    if args.pmf:
        if args.beta is None:
            raise UsageError("--pmf needs --beta")
        rows = ["i,prob"] + [f"{i},{analysis.check_degree_pmf(args.beta, i)!r}" for i in range(args.max_degree + 1)]
    elif args.beta is not None:
        ps = analysis.de_iterate(analysis.DegreePolynomials(C, args.beta), 1.0, args.steps)
        rows = ["j,p"] + [f"{j},{float(p)!r}" for j, p in enumerate(ps)]
    else:
        rows = ["C,beta_star", f"{C},{analysis.de_threshold(C, args.tol):.4f}"]
    _emit(args, "\n".join(rows) + "\n")
    return 0


def cmd_exp_success(args) -> int:
    n = args.n or 18
    alphas = args.alphas or ([args.alpha] if args.alpha else [1 / 6, 1 / 4, 1 / 3])
    C_values = args.c_values or ([args.c_hashes] if args.c_hashes else [2, 3, 4])
    grid = experiments.ExperimentGrid(
        n=n, alphas=alphas, C_values=C_values, trials=args.trials or 200,
        construction=args.construction, seed=args.seed, beta=args.beta,
        b_bits=args.b_bits, max_passes=args.max_passes,
    )
    rows = experiments.run_success_experiment(grid)
    _emit(args, experiments.format_csv(rows, experiments.SUCCESS_FIELDS))
    return 0


def cmd_exp_beta(args) -> int:
    n = args.n or 18
    b = args.b_bits if args.b_bits is not None else n - 5
    if not 1 <= b <= n - 1:
        raise UsageError(f"--b-bits must be in [1, {n - 1}]")
    if args.alphas:
        alphas = args.alphas
    else:
        betas = args.betas or [0.33, 0.5, 1.0, 2.0, 3.0, 3.5, 4.0]
        alphas = [float(np.log2(beta * (1 << b)) / n) for beta in betas]
    if any(not 0 < a < 1 for a in alphas):
        raise UsageError("every alpha must lie in (0, 1)")
    rows = experiments.run_beta_sweep(
        n, b, args.c_hashes or 4, alphas, args.trials or 100, args.seed, args.construction,
        max_passes=args.max_passes,
    )
    _emit(args, experiments.format_csv(rows, experiments.BETA_FIELDS))
    return 0


def cmd_bench(args) -> int:
    alphas = args.alphas or [0.1, 0.2, 0.25, 1 / 3, 0.4, 0.5, 0.6, 2 / 3, 0.8]
    n_values = [args.n] if args.n else args.n_values
    rows = experiments.bench_runtime(n_values, alphas, args.reps, args.seed, args.c_hashes or 4, args.construction)
    _emit(args, experiments.format_csv(rows, experiments.BENCH_FIELDS))
    for n in n_values:
        print(f"alpha_star,{n},{experiments.alpha_star(rows, n)!r}", file=sys.stderr)
    return 0


def cmd_rs2(args) -> int:
    n = args.n or 20
    N = 1 << n
    K = args.sparsity or experiments.sparsity_for(n, args.alpha if args.alpha else 0.5)
    trials = args.trials or 10_000
    ratios = analysis.simulate_rs2(N, K, trials, np.random.default_rng(args.seed))
    stderr = float(ratios.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    expected = analysis.rs2_expected_support(N, K) / K
    text = "N,K,trials,mean_ratio,stderr,expected_ratio\n"
    text += f"{N},{K},{trials},{float(ratios.mean())!r},{stderr!r},{expected!r}\n"
    _emit(args, text)
    return 0


COMMANDS = {
    "fht": cmd_fht,
    "hash": cmd_hash,
    "decode": cmd_decode,
    "de": cmd_de,
    "exp-success": cmd_exp_success,
    "exp-beta": cmd_exp_beta,
    "bench": cmd_bench,
    "rs2": cmd_rs2,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"sparsefht {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
