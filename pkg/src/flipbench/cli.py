"""Command-line front end.

Subcommands: run (execute FLIP on an instance file), analyze (block and
cycle structure of a trace), certify (build and validate a rank
certificate), experiment (batch campaigns to CSV).
"""

from __future__ import annotations

import argparse
import random
import sys

from .analysis import (classify_cyclic, cycles, cyclic_acyclic_blocks,
                       find_critical_block, occurrence_stats, surplus,
                       transition_singleton_blocks)
from .certificates import (build_3cut_certificate, build_half_certificate,
                           build_k2_certificate, validate_certificate)
from .engine import (DEFAULT_CAP, PivotRule, run_flip, slice_trace,
                     trace_from_text, trace_to_text)
from .harness import parse_config, rows_to_csv, run_experiment
from .model import Instance, ModelError, parse_configuration
from .thresholds import Beta


def _load_instance(path: str, k: int | None) -> Instance:
    with open(path) as fh:
        inst = Instance.from_text(fh.read())
    if k is not None and k != inst.k:
        inst = Instance(n=inst.n, k=k, edges=inst.edges,
                        weight_nums=inst.weight_nums, denom=inst.denom,
                        phi=inst.phi, complete=inst.complete)
    return inst


def _load_trace(instance_path: str, trace_path: str, k: int | None = None):
    inst = _load_instance(instance_path, k)
    with open(trace_path) as fh:
        return trace_from_text(inst, fh.read())


def cmd_run(args) -> int:
    inst = _load_instance(args.instance, args.k)
    if args.tau0:
        tau0 = parse_configuration(open(args.tau0).read())
    else:
        rng = random.Random(f"tau0:{args.seed}")
        tau0 = tuple(rng.randint(1, inst.k) for _ in range(inst.n))
    rule = PivotRule(variant=args.rule, seed=args.seed)
    trace = run_flip(inst, tau0, rule, cap=args.cap)
    text = trace_to_text(trace)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"# steps {len(trace)} cap_hit {int(trace.step_cap_hit)}",
          file=sys.stderr)
    return 0


def cmd_analyze(args) -> int:
    trace = _load_trace(args.instance, args.trace)
    moves = trace.moves
    k = trace.instance.k
    beta = Beta.parse(args.beta)
    if args.report == "blocks":
        segs = (transition_singleton_blocks(moves) if k == 2
                else cyclic_acyclic_blocks(moves, k))
        for seg in segs:
            kind = ("transition" if k == 2 else "cyclic") if seg.special \
                else ("singleton" if k == 2 else "acyclic")
            print(f"{kind} {seg.t1} {seg.t2}")
        block = find_critical_block(moves, beta)
        stats = block.stats()
        print(f"critical beta={beta} t1={block.t1} t2={block.t2} "
              f"ell={block.length} s={stats.s}")
    elif args.report == "cycles":
        cyc, acyc = classify_cyclic(moves, k)
        print(f"cyclic {len(cyc)} acyclic {len(acyc)}")
        for c in cycles(moves, k).cycles:
            ts = ",".join(str(t) for t in c.times)
            ps = ",".join(str(p) for p in c.parts)
            print(f"cycle v={c.v} times={ts} parts={ps}")
    elif args.report == "surplus":
        stats = occurrence_stats(moves)
        cyc, acyc = classify_cyclic(moves, k)
        print(f"ell {len(moves)} s {stats.s} cyclic {len(cyc)} "
              f"acyclic {len(acyc)} surplus {surplus(moves, k)}")
    return 0


def cmd_certify(args) -> int:
    trace = _load_trace(args.instance, args.trace)
    beta = Beta.parse(args.beta)
    if args.mode == "k2":
        graph, bound = build_k2_certificate(trace, beta)
    elif args.mode == "3cut":
        graph, bound = build_3cut_certificate(trace, check_rank=False)
    else:
        graph, bound = build_half_certificate(trace, check_rank=False)
    verdict = validate_certificate(graph, trace)
    sys.stdout.write(graph.to_text())
    print(f"# arcs {graph.n_arcs} bound {bound} valid {int(verdict.valid)}")
    if not verdict.valid:
        print(f"# reason {verdict.reason}")
        return 1
    return 0


def cmd_experiment(args) -> int:
    with open(args.config) as fh:
        cfg = parse_config(fh.read())
    if args.mode and args.mode != cfg.mode:
        raise ModelError(
            f"--mode {args.mode} conflicts with config mode {cfg.mode}")
    fields, rows = run_experiment(cfg)
    text = rows_to_csv(fields, rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="flipbench",
        description="Laboratory for the FLIP local-search method on "
                    "smoothed max-k-cut instances")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run FLIP on an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--rule", default="best", choices=["first", "best", "random"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--tau0", default=None, help="file with a start configuration")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("analyze", help="block/cycle structure of a trace")
    p.add_argument("--instance", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--beta", default="1/sqrt2")
    p.add_argument("--report", default="blocks",
                   choices=["blocks", "cycles", "surplus"])
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("certify", help="build and validate a rank certificate")
    p.add_argument("--instance", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--mode", required=True, choices=["k2", "3cut", "half"])
    p.add_argument("--beta", default="1/sqrt2")
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("experiment", help="batch campaign to CSV")
    p.add_argument("--mode", default=None,
                   choices=["scaling", "rank", "mc", "approx"])
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
