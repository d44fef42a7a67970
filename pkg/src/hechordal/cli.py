"""Command-line front end.

Subcommands: gen (graph files), oracle (plaintext chordality), check (local
protocol run), serve / connect (networked Alice and Bob), bench (per-round
scaling). Exit codes: 0 chordal/success, 1 not chordal, 2 usage error,
3 aborted run.
"""
from __future__ import annotations

import argparse
import os
import sys
import time

from hechordal.backend import default_params
from hechordal.graphs import (
    GraphFormatError,
    builtin_graph,
    chord_free_cycle_exists,
    eliminate,
    format_graph,
    gen_chordal,
    gen_gnp,
    mcs_peo,
    parse_graph,
)
from hechordal.protocol import Outcome, Verdict, alice_init, run_local
from hechordal.wire import BobServer, SessionConfig, connect

DEFAULT_SEED = 0
DEFAULT_WIRE_MAX_N = 512

_EXIT_BY_OUTCOME = {Outcome.CHORDAL: 0, Outcome.NOT_CHORDAL: 1, Outcome.ABORTED: 3}


def _budget_arg(text: str):
    if text == "unbounded":
        return None
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"budget must be an integer or 'unbounded', got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("budget must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hechordal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a graph file")
    gen.add_argument("--type", required=True, choices=["gnp", "chordal", "path", "cycle", "complete"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float, default=0.5, help="edge probability (gnp only)")
    gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    gen.add_argument("-o", "--output", required=True, help="output file, or - for stdout")

    oracle = sub.add_parser("oracle", help="plaintext chordality verdict")
    oracle.add_argument("--graph", required=True, help="graph file or builtin name")
    oracle.add_argument("--method", choices=["eliminate", "exhaustive", "mcs"], default="eliminate")

    check = sub.add_parser("check", help="run the encrypted protocol in-process")
    _protocol_flags(check)
    check.add_argument("--refresh", action="store_true", help="re-encrypt the masked matrix every round")
    check.add_argument("--transcript", help="write the round-by-round transcript (JSON lines)")

    srv = sub.add_parser("serve", help="run Bob, the computational agent")
    srv.add_argument("--listen", required=True, metavar="HOST:PORT")
    srv.add_argument("--backend", choices=["masked", "passthrough"], default="masked")
    srv.add_argument("--budget", type=_budget_arg, default=None)
    srv.add_argument("--max-n", type=int, default=DEFAULT_WIRE_MAX_N, help="largest graph the params are sized for")
    _wire_flags(srv)

    con = sub.add_parser("connect", help="run Alice against a remote Bob")
    con.add_argument("--addr", required=True, metavar="HOST:PORT")
    con.add_argument("--graph", required=True, help="graph file or builtin name")
    con.add_argument("--backend", choices=["masked", "passthrough"], default="masked")
    con.add_argument("--budget", type=_budget_arg, default=None)
    con.add_argument("--seed", type=int, default=DEFAULT_SEED)
    con.add_argument("--max-n", type=int, default=DEFAULT_WIRE_MAX_N, help="must match the server")
    con.add_argument("--transcript", help="write the round-by-round transcript (JSON lines)")
    _wire_flags(con)

    bench = sub.add_parser("bench", help="per-round timing across graph sizes")
    bench.add_argument("--sizes", required=True, help="comma-separated vertex counts, e.g. 64,128")
    bench.add_argument("--rounds-only", action="store_true", help="report only per-round times")
    bench.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return parser


def _protocol_flags(sub_parser) -> None:
    sub_parser.add_argument("--graph", required=True, help="graph file or builtin name")
    sub_parser.add_argument("--backend", choices=["masked", "passthrough"], default="masked")
    sub_parser.add_argument("--budget", type=_budget_arg, default=None, help="depth budget, integer or 'unbounded'")
    sub_parser.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _wire_flags(sub_parser) -> None:
    sub_parser.add_argument("--timeout-ms", type=int, default=None, help="overrides HECHORDAL_TIMEOUT_MS")
    sub_parser.add_argument("--max-msg", type=int, default=None, help="overrides HECHORDAL_MAX_MSG")


def _load_graph(ref: str):
    if os.path.exists(ref):
        with open(ref, encoding="utf-8") as handle:
            return parse_graph(handle.read())
    return builtin_graph(ref)


def _verdict_line(verdict: Verdict) -> str:
    if verdict.outcome is Outcome.ABORTED:
        return f"ABORTED ({verdict.reason})"
    rounds = verdict.rounds_used
    return f"{verdict.outcome.value} ({rounds} round{'s' if rounds != 1 else ''})"


def _write_transcript(path: str, transcript) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(transcript.to_json_lines())


def _cmd_gen(args) -> int:
    if args.type == "gnp":
        g = gen_gnp(args.n, args.p, args.seed)
    elif args.type == "chordal":
        g = gen_chordal(args.n, args.seed)
    else:
        g = builtin_graph(f"{args.type}-{args.n}")
    text = format_graph(g)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
        print(f"wrote {args.output}: n={g.n}, {g.edge_count} edges")
    return 0


def _cmd_oracle(args) -> int:
    g = _load_graph(args.graph)
    if args.method == "eliminate":
        chordal = eliminate(g)[0]
    elif args.method == "mcs":
        chordal = mcs_peo(g)[0]
    else:
        chordal = not chord_free_cycle_exists(g)
    print("CHORDAL" if chordal else "NOT_CHORDAL")
    return 0 if chordal else 1


def _cmd_check(args) -> int:
    g = _load_graph(args.graph)
    params = default_params(g.n, budget=args.budget, seed=args.seed)
    verdict, transcript = run_local(g, params, backend=args.backend, refresh=args.refresh)
    print(_verdict_line(verdict))
    if args.transcript:
        _write_transcript(args.transcript, transcript)
    return _EXIT_BY_OUTCOME[verdict.outcome]


def _cmd_serve(args) -> int:
    cfg = SessionConfig.from_endpoint(args.listen, timeout_ms=args.timeout_ms, max_msg=args.max_msg)
    params = default_params(args.max_n, budget=args.budget)
    with BobServer(cfg, params, backend=args.backend) as server:
        print(
            f"bob listening on {server.endpoint} (backend={args.backend}, t={params.t}, max_n={args.max_n})",
            flush=True,
        )
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
    return 0


def _cmd_connect(args) -> int:
    g = _load_graph(args.graph)
    if g.n > args.max_n:
        print(f"graph has {g.n} vertices but params are sized for max_n={args.max_n}", file=sys.stderr)
        return 2
    cfg = SessionConfig.from_endpoint(args.addr, timeout_ms=args.timeout_ms, max_msg=args.max_msg)
    params = default_params(args.max_n, budget=args.budget, seed=args.seed)
    verdict, transcript = connect(cfg, g, params, backend=args.backend)
    print(_verdict_line(verdict))
    if args.transcript:
        _write_transcript(args.transcript, transcript)
    return _EXIT_BY_OUTCOME[verdict.outcome]


def _cmd_bench(args) -> int:
    try:
        sizes = [int(part) for part in args.sizes.split(",") if part]
    except ValueError:
        print(f"--sizes must be comma-separated integers, got {args.sizes!r}", file=sys.stderr)
        return 2
    if not sizes or any(n < 4 for n in sizes):
        print("--sizes needs values >= 4 (bench runs on cycle graphs)", file=sys.stderr)
        return 2
    results = []
    for n in sizes:
        g = builtin_graph(f"cycle-{n}")
        params = default_params(n, seed=args.seed)
        started = time.perf_counter()
        alice_init(g, params)
        init_ms = (time.perf_counter() - started) * 1000.0
        verdict, transcript = run_local(g, params)
        round_ms = sum(r.millis for r in transcript.rounds) / len(transcript.rounds)
        results.append((n, verdict.rounds_used, round_ms, init_ms))
        if args.rounds_only:
            print(f"n={n} rounds={verdict.rounds_used} round_ms={round_ms:.1f}")
        else:
            print(f"n={n} rounds={verdict.rounds_used} round_ms={round_ms:.1f} init_ms={init_ms:.1f}")
    for (n0, _, ms0, _), (n1, _, ms1, _) in zip(results, results[1:]):
        if ms0 > 0:
            print(f"per-round ratio n={n1} / n={n0}: {ms1 / ms0:.2f}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "oracle": _cmd_oracle,
    "check": _cmd_check,
    "serve": _cmd_serve,
    "connect": _cmd_connect,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (GraphFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
