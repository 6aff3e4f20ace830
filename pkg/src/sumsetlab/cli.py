"""Command-line front end.

Set literals come in three forms: a comma list ``0,2,5`` (braces optional,
``{}`` or an empty string for the empty set), a binary string ``b:101001``
whose leftmost character is index 0, or ``@path`` naming a file that holds
either form.  The window is ``--window n`` when given, otherwise the largest
member (or the binary string's length minus one).

Exit codes: 0 success, 64 usage error, 2 internal limit.  ``decide --quiet``
prints nothing and exits 0 (decomposable), 1 (irreducible) or 2 (inconclusive).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import mpmath

from . import bounds as bnd
from .core import LimitExceeded, SetWindow, UsageError, pattern_frequency
from .decomposer import SearchConfig, Verdict, census, oracle_decomposable_masks, search
from .game import GameParams, GameProtocolError, play, verify_prefix
from .montecarlo import (
    append_result,
    estimate_decomposable,
    estimate_event,
    export_csv,
    read_results,
)

EXIT_OK = 0
EXIT_IRREDUCIBLE = 1
EXIT_LIMIT = 2
EXIT_USAGE = 64
VERDICT_EXIT = {Verdict.DECOMPOSABLE: 0, Verdict.IRREDUCIBLE: 1, Verdict.INCONCLUSIVE: 2}


class CliUsage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def parse_set(text: str, window: int | None = None) -> SetWindow:
    """Parse a set literal into a window."""
    text = text.strip()
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text(encoding="utf-8").strip()
        except OSError as exc:
            raise UsageError(f"cannot read set literal file: {exc}") from None
        if text.startswith("@"):
            raise UsageError("nested @file references are not allowed")
    if text.startswith("b:"):
        body = text[2:]
        if body and set(body) - {"0", "1"}:
            raise UsageError(f"bad binary set literal {text!r}")
        members = [i for i, ch in enumerate(body) if ch == "1"]
        inferred = max(len(body) - 1, 0)
    else:
        body = text.strip("{}").strip()
        try:
            members = [int(tok) for tok in body.split(",")] if body else []
        except ValueError:
            raise UsageError(f"bad set literal {text!r}") from None
        if any(m < 0 for m in members):
            raise UsageError("set members must be nonnegative")
        inferred = max(members, default=0)
    n = inferred if window is None else window
    if members and max(members) > n:
        raise UsageError(f"member {max(members)} lies outside the window [0, {n}]")
    return SetWindow.from_members(members, n)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _config(args, budget: int | None = None) -> SearchConfig:
    return SearchConfig(
        min_size=args.min_size,
        budget=args.budget if budget is None else budget,
        size_cap=args.size_cap,
        node_limit=args.node_limit,
    )


def _fraction_json(x) -> dict:
    return {"num": x.numerator, "den": x.denominator, "float": float(x)}


def _mp(x) -> str:
    return mpmath.nstr(x, 30)


def cmd_decide(args) -> int:
    A = parse_set(args.set, args.window)
    res = search(A, _config(args))
    if args.quiet:
        return VERDICT_EXIT[res.verdict]
    payload = {"n": A.length, "set": A.members(), "verdict": res.verdict.value, "nodes": res.nodes,
               "config": {"min_size": args.min_size, "budget": args.budget, "size_cap": args.size_cap,
                          "node_limit": args.node_limit},
               "witness": None}
    text = f"{A} in [0,{A.length}]: {res.verdict.value} ({res.nodes} nodes)"
    if res.witness is not None:
        w = res.witness
        payload["witness"] = {"Y": w.decomposition.Y.members(), "Z": w.decomposition.Z.members(),
                              "A_prime": w.A_prime.members(), "flips": list(w.flips)}
        text += f"\n  Y = {w.decomposition.Y}\n  Z = {w.decomposition.Z}\n  flips = {list(w.flips)}"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_census(args) -> int:
    res = census(args.n, _config(args), workers=args.threads)
    payload = {"n": res.n, "total": res.total, "decomposable": res.decomposable,
               "irreducible": res.irreducible, "inconclusive": res.inconclusive, "fraction": res.fraction,
               "config": {"min_size": args.min_size, "budget": args.budget, "size_cap": args.size_cap,
                          "node_limit": args.node_limit}}
    text = (f"n={res.n}: {res.decomposable}/{res.total} decomposable ({res.fraction:.6f}), "
            f"{res.irreducible} irreducible, {res.inconclusive} inconclusive")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_sample(args) -> int:
    start = time.perf_counter()
    p_bound = None
    if args.mode == "event":
        est = estimate_event(args.n, args.k, args.trials, args.seed, workers=args.threads,
                             node_limit=args.node_limit)
        p_bound = float(bnd.p_bound(args.n, args.k))
    else:
        est = estimate_decomposable(args.n, _config(args), args.trials, args.seed, workers=args.threads)
    elapsed = time.perf_counter() - start
    payload = est.to_dict()
    payload["p_bound"] = p_bound
    if args.out:
        append_result(args.out, est, elapsed, p_bound)
    text = (f"{est.kind} n={est.n}: {est.hits}/{est.trials} hits, p_hat={est.p_hat:.6g}, "
            f"95% CI [{est.ci_low:.6g}, {est.ci_high:.6g}], 99% upper {est.ci99_high:.6g}, "
            f"{est.inconclusive} inconclusive")
    if p_bound is not None:
        text += f"\n  p_bound({est.n},{est.k}) = {p_bound:.6g}"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_bounds(args) -> int:
    payload: dict = {}
    lines = []
    if args.find_k:
        k = bnd.find_k(args.threshold)
        payload["k"] = k
        payload["threshold"] = args.threshold or "2^(1/3)"
        payload["alpha_k"] = _mp(bnd.alpha_k(k))
        if k > 2:
            payload["alpha_k_minus_1"] = _mp(bnd.alpha_k(k - 1))
        lines.append(f"smallest k with alpha_k < {payload['threshold']}: {k} (alpha_k = {payload['alpha_k']})")
    if args.n is not None or args.k is not None:
        if args.n is None or args.k is None:
            raise CliUsage("--n and --k go together")
        rep = bnd.bound_report(args.n, args.k, args.tail_from)
        payload["report"] = {
            "n": rep.n, "k": rep.k, "w": rep.w, "p_bound": _fraction_json(rep.p_bound),
            "alpha_k": _mp(rep.alpha_k) if args.k >= 2 else None,
            "c": rep.c_witness, "tail": _mp(rep.tail) if rep.tail is not None else None,
        }
        lines.append(f"w({rep.n},{rep.k}) = {rep.w}")
        lines.append(f"p_bound = {rep.p_bound} ~ {float(rep.p_bound):.6g}")
        if args.k >= 2:
            lines.append(f"alpha_{rep.k} = {_mp(rep.alpha_k)}")
        if rep.c_witness is not None:
            lines.append(f"c = {rep.c_witness:.8f}, tail from {args.tail_from} <= {_mp(rep.tail)}")
    if not payload:
        raise CliUsage("bounds needs --find-k or --n/--k")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_game(args) -> int:
    if args.seed is None:
        if args.json and args.adversary != "minimal":
            raise CliUsage("--seed is required for randomized adversaries in --json mode")
        args.seed = 0
    params = GameParams(alpha=args.alpha, beta=args.beta, rounds=args.rounds, player1=args.adversary,
                        seed=args.seed, f0=parse_set(args.f0), k0=args.k0)
    tr = play(params)
    payload = {"transcript": tr.to_dict()}
    lines = [f"round {mv.m}: k={mv.k} t={mv.t} window_end={mv.window_end} |F|={len(mv.F)}" for mv in tr.moves]
    if args.verify:
        cfg = SearchConfig(min_size=args.min_size, node_limit=args.node_limit)
        rep = verify_prefix(tr, args.alpha, cfg, rounds=args.verify_rounds)
        payload["verify"] = rep.to_dict()
        lines += [f"verify round {c.m}: n={c.n} budget={c.budget} -> {c.verdict.value} ({c.nodes} nodes)"
                  for c in rep.checks]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_freq(args) -> int:
    A = parse_set(args.set, args.window)
    F = parse_set(args.pattern, args.pattern_window - 1)
    count = pattern_frequency(A, args.pattern_window, F, args.n)
    payload = {"count": count, "n": args.n, "pattern": F.members(), "pattern_window": args.pattern_window,
               "ratio": count / (args.n + 1)}
    _emit(args, payload, f"{count} of {args.n + 1} shifts match ({count / (args.n + 1):.6f})")
    return EXIT_OK


def cmd_oracle(args) -> int:
    masks = sorted(oracle_decomposable_masks(args.n, args.min_size, args.size_cap))
    payload = {"n": args.n, "min_size": args.min_size, "size_cap": args.size_cap, "count": len(masks)}
    text = f"{len(masks)} of {1 << (args.n + 1)} windows are truncated sumsets"
    if args.dump:
        payload["masks"] = [SetWindow(args.n, m).members() for m in masks]
        text += "\n" + "\n".join(str(SetWindow(args.n, m)) for m in masks)
    _emit(args, payload, text)
    return EXIT_OK


def cmd_export(args) -> int:
    rows = export_csv(read_results(args.source), args.dest)
    _emit(args, {"rows": rows, "csv": args.dest}, f"wrote {rows} rows to {args.dest}")
    return EXIT_OK


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _pos(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one strict JSON object")

    search_opts = _Parser(add_help=False)
    search_opts.add_argument("--min-size", type=_pos, default=2)
    search_opts.add_argument("--budget", type=_nonneg, default=0)
    search_opts.add_argument("--size-cap", type=_pos)
    search_opts.add_argument("--node-limit", type=_pos)

    parser = _Parser(
        prog="sumsetlab",
        description="Finite-window sumset decomposition, Banach-Mazur plays and counting bounds.",
        epilog="exit codes: 0 ok, 64 usage error, 2 internal limit; "
        "`decide --quiet` exits 0 decomposable / 1 irreducible / 2 inconclusive",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decide", parents=[common, search_opts], help="decide one window")
    p.add_argument("set")
    p.add_argument("--window", type=_nonneg)
    p.add_argument("--quiet", action="store_true", help="no output; exit status encodes the verdict")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("census", parents=[common, search_opts], help="classify every window of [0, n]")
    p.add_argument("--n", type=_nonneg, required=True)
    p.add_argument("--threads", type=_pos, default=1)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("sample", help="Monte Carlo estimates")
    modes = p.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    sample_opts = _Parser(add_help=False)
    sample_opts.add_argument("--n", type=_nonneg, required=True)
    sample_opts.add_argument("--trials", type=_pos, required=True)
    sample_opts.add_argument("--seed", type=_nonneg, required=True)
    sample_opts.add_argument("--out", help="append a JSON-lines record here")
    sample_opts.add_argument("--threads", type=_pos, default=1)
    q = modes.add_parser("event", parents=[common, sample_opts], help="small-sumset event")
    q.add_argument("--k", type=_pos, required=True)
    q.add_argument("--node-limit", type=_pos)
    q.set_defaults(func=cmd_sample)
    q = modes.add_parser("decide", parents=[common, sample_opts, search_opts], help="general decider")
    q.set_defaults(func=cmd_sample)

    p = sub.add_parser("bounds", parents=[common], help="exact counting bounds")
    p.add_argument("--n", type=_nonneg)
    p.add_argument("--k", type=_pos)
    p.add_argument("--find-k", action="store_true")
    p.add_argument("--threshold", help="threshold for --find-k (default 2^(1/3))")
    p.add_argument("--tail-from", type=_nonneg)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("game", parents=[common], help="play Player II's strategy")
    p.add_argument("--rounds", type=_pos, required=True)
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--beta", type=float, default=0.8)
    p.add_argument("--f0", required=True)
    p.add_argument("--k0", type=_pos, required=True)
    p.add_argument("--adversary", choices=["minimal", "random", "sumsetish"], default="minimal")
    p.add_argument("--seed", type=_nonneg)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--verify-rounds", type=_nonneg, nargs="+")
    p.add_argument("--min-size", type=_pos, default=2)
    p.add_argument("--node-limit", type=_pos, default=10**8)
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("freq", parents=[common], help="count pattern occurrences")
    p.add_argument("set")
    p.add_argument("--window", type=_nonneg)
    p.add_argument("--pattern", required=True)
    p.add_argument("--pattern-window", type=_pos, required=True)
    p.add_argument("--n", type=_nonneg, required=True)
    p.set_defaults(func=cmd_freq)

    p = sub.add_parser("oracle", parents=[common], help="brute-force list of truncated sumsets (n <= 13)")
    p.add_argument("--n", type=_nonneg, required=True)
    p.add_argument("--min-size", type=_pos, default=2)
    p.add_argument("--size-cap", type=_pos)
    p.add_argument("--dump", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export", parents=[common], help="convert a results file to CSV")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="dest", required=True)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LimitExceeded, GameProtocolError, bnd.ComparisonTooClose, bnd.NoCertificate) as exc:
        print(f"sumsetlab: limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (CliUsage, UsageError) as exc:
        print(f"sumsetlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
