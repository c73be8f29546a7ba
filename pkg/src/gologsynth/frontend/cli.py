"""Command-line interface.

Exit codes: 0 success, 1 unrealizable / property violated / check mismatch,
2 input error (including usage errors), 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .. import arena as A
from .. import check as C
from .. import logic as L
from .. import synthesis as Y
from ..corpus import generate as corpus
from ..errors import GologSynthError, ResourceLimitError
from . import desugar as D
from . import report as R
from . import serialize as SER
from . import syntax as S

log = logging.getLogger("gologsynth")

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INPUT)


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--universe-padding", type=int, default=1, metavar="N",
                   help="anonymous objects added to the named ones (default 1)")
    p.add_argument("--max-states", type=int, default=200000, metavar="N")
    p.add_argument("--max-hypothesis-states", type=int, default=20, metavar="N",
                   help="cap on final accepting states for exhaustive hypothesis search")
    p.add_argument("--hypothesis-mode", choices=["refine", "exhaustive"], default="refine")
    p.add_argument("--semantic-dedup", action="store_true",
                   help="merge effect literals with equivalent descriptors")
    p.add_argument("--stats", action="store_true", help="print statistics to stderr")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", metavar="FILE", help="write the artifact here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser():
    common = _common()
    ap = _Parser(prog="golog-synth", description="Strategy synthesis for Golog programs "
                 "against finite-trace temporal specifications.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = sub.add_parser("synth", parents=[common], help="synthesize a strategy")
    p.add_argument("file")
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.add_argument("--full", action="store_true", help="emit the whole arena, not only strategy states")
    p = sub.add_parser("verify", parents=[common], help="check that every execution satisfies the specification")
    p.add_argument("file")
    p = sub.add_parser("arena", parents=[common], help="build and export the game arena")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--dot", action="store_true")
    g.add_argument("--json", action="store_true")
    p = sub.add_parser("check", parents=[common], help="differential check against explicit worlds")
    p.add_argument("file")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--worlds", type=int, default=3, help="sampled worlds per context")
    p = sub.add_parser("bench", parents=[common], help="run problems and write a CSV table and a figure")
    p.add_argument("files", nargs="*", help="problem files (default: the shipped benchmark set)")
    p.add_argument("--csv", default="bench.csv")
    p.add_argument("--png", default="bench.png")
    return ap


BENCH_DEFAULT = [f"dishwasher_r{r}_d{d}.gl" for r in (1, 2) for d in (1, 2, 3)] + \
    ["warehouse_b1.gl", "warehouse_b2.gl"]


def resolve(path):
    """A path, or the name of a shipped corpus file."""
    p = Path(path)
    if p.exists():
        return p
    c = corpus.path(p.name)
    if c.exists():
        return c
    raise FileNotFoundError(f"no such problem file: {path}")


def _emit(text, args):
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(args):
    path = resolve(args.file)
    pf = S.parse_file(path)
    prob, warnings = D.desugar(pf, args.universe_padding)
    for w in warnings:
        log.warning("quantifier not bounded by a fixed domain (result may depend on "
                    "--universe-padding): %s", w)
    return prob


def _print_stats(args, stats):
    if args.stats:
        for k, v in stats.items():
            print(f"{k}: {v}", file=sys.stderr)


def cmd_synth(args):
    prob = _load(args)
    ar = A.build(prob, max_states=args.max_states, semantic_dedup=args.semantic_dedup)
    res = Y.synthesize(ar, mode=args.hypothesis_mode, max_hypothesis_states=args.max_hypothesis_states)
    stats = {"arena_states": len(ar.states), "arena_transitions": ar.n_transitions,
             "contexts": len(ar.contexts), "hypotheses": res.hypotheses_tried,
             "build_seconds": round(ar.stats.get("seconds", 0.0), 3),
             "synth_seconds": round(res.stats.get("seconds", 0.0), 3)}
    if not res.realizable:
        stats["reached"] = len(res.reach)
        _print_stats(args, stats)
        print(f"unrealizable: {len(res.reach)} of {len(ar.states)} states can be driven to success; "
              f"initial states outside that set: {sorted(set(ar.initial) - res.reach)}", file=sys.stderr)
        return EXIT_NO
    n, m = res.strategy.size(ar)
    stats.update(strategy_states=n, strategy_transitions=m)
    _print_stats(args, stats)
    if args.format == "dot":
        _emit(SER.to_dot(ar, res.strategy, only_strategy=not args.full), args)
    else:
        _emit(SER.to_json(ar, res.strategy, stats, only_strategy=not args.full) + "\n", args)
    return EXIT_OK


def cmd_verify(args):
    prob = _load(args)
    ar = A.build(prob, expand_dead=True, max_states=args.max_states, semantic_dedup=args.semantic_dedup)
    res = A.verify(ar)
    _print_stats(args, {"arena_states": len(ar.states), "arena_transitions": ar.n_transitions})
    if res.ok:
        print("holds")
        return EXIT_OK
    acts = ", ".join(L.fmt(a) for a in res.actions())
    print(f"violated: <{acts}> reaches final non-accepting state {res.path[-1]}")
    return EXIT_NO


def cmd_arena(args):
    prob = _load(args)
    ar = A.build(prob, expand_dead=True, max_states=args.max_states, semantic_dedup=args.semantic_dedup)
    _print_stats(args, {"arena_states": len(ar.states), "arena_transitions": ar.n_transitions})
    if args.dot:
        _emit(SER.to_dot(ar), args)
    else:
        _emit(SER.to_json(ar, None, dict(ar.stats)) + "\n", args)
    return EXIT_OK


def cmd_check(args):
    prob = _load(args)
    b = A.ArenaBuilder(prob, expand_dead=True, max_states=args.max_states)
    ar = b.build()
    ok = True
    worlds = []
    for s0 in ar.initial:
        ctx = ar.contexts[ar.info[s0].context]
        worlds += C.sample_worlds(b.reasoner, prob.bat, ctx.judgments, args.worlds, args.seed)
    v = A.verify(ar)
    holds, exhausted, witness = C.oracle_verify(prob, worlds, args.depth)
    if v.ok != holds:
        if holds and not exhausted:
            print(f"verify: arena reports a violation beyond depth {args.depth}; not compared")
        else:
            ok = False
            print(f"verify mismatch: arena {v.ok}, oracle {holds}")
    else:
        print(f"verify agrees: {holds}")
    sb = A.ArenaBuilder(prob, max_states=args.max_states, reasoner=b.reasoner)
    sa = sb.build()
    res = Y.synthesize(sa)
    if res.realizable:
        chk = Y.check_strategy(sa, res.strategy)
        rep = C.check_strategy_plays(sa, res.strategy.choice, prob, b.reasoner, args.worlds,
                                     args.seed, max_depth=max(args.depth, 40))
        print(f"strategy: check_strategy {'ok' if chk.ok else chk.problems}; "
              f"{rep.plays} stopping points, {rep.steps} steps checked")
        for p in rep.problems[:10]:
            print("  " + p)
        ok = ok and chk.ok and rep.ok
    else:
        print("unrealizable")
    return EXIT_OK if ok else EXIT_NO


def cmd_bench(args):
    files = [resolve(f) for f in (args.files or BENCH_DEFAULT)]
    rows = R.bench(files, args.csv, args.png, padding=args.universe_padding,
                   max_states=args.max_states, semantic_dedup=args.semantic_dedup,
                   hypothesis_mode=args.hypothesis_mode,
                   max_hypothesis_states=args.max_hypothesis_states)
    w = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in R.COLUMNS}
    print("  ".join(c.rjust(w[c]) for c in R.COLUMNS))
    for r in rows:
        print("  ".join(str(r[c]).rjust(w[c]) for c in R.COLUMNS))
    print(f"wrote {args.csv}" + (f" and {args.png}" if args.png else ""), file=sys.stderr)
    return EXIT_OK


COMMANDS = {"synth": cmd_synth, "verify": cmd_verify, "arena": cmd_arena, "check": cmd_check,
            "bench": cmd_bench}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.cmd](args)
    except ResourceLimitError as e:
        print(f"resource limit: {e}", file=sys.stderr)
        if e.stats:
            print(json.dumps(e.stats, default=str), file=sys.stderr)
        return EXIT_CAP
    except (GologSynthError, OSError, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
