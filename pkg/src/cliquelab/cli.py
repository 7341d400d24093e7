"""``lab`` command line: generate | decompose | solve | stats | experiment."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import stats
from .benchgen import GraphRecipe, graph_creation
from .decompose import DecomposeConfig, decompose_is
from .dimacs import read_dimacs, write_dimacs
from .errors import LabError
from .harness import (
    KINDS,
    PLAN_EXAMPLE,
    ExperimentReport,
    builtin_plan,
    format_plan,
    load_plan,
    report_render,
    resolve_out_dir,
    run_experiment,
    run_statistics,
)
from .qubo import build_mc_qubo
from .solvers import EMBEDDING_LIMIT, AnnealConfig, LocalAnnealerClient, best_clique_outcome

log = logging.getLogger("cliquelab")

MATRIX_CSV_FIELDS = ("method", "alpha", "group_a", "group_b", "p_value", "significant")


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def cmd_generate(args) -> int:
    recipe = GraphRecipe(
        n_node=args.n_node,
        ex_node=args.ex_node,
        n_cli=args.n_cli,
        add_edges=args.add_edges,
        rand_cli=args.rand_cli,
        intra_edge_pct=args.intra_pct,
        inter_edge_pct=args.inter_pct,
        rng_seed=args.seed,
    )
    bench = graph_creation(recipe)
    out = resolve_out_dir(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_dimacs(bench.graph, out / f"{args.name}.dimacs")
    _write_json(out / f"{args.name}.json", bench.to_record())
    print(out / f"{args.name}.dimacs")
    return 0


def cmd_decompose(args) -> int:
    g = read_dimacs(args.graph)
    cfg = DecomposeConfig(
        final_dim=args.final_dim,
        min_cn=args.min_cn,
        max_triple_depth=args.depth,
        random_probe_budget=args.budget,
        rng_seed=args.seed,
        deterministic=args.deterministic,
    )
    reduced, trace = decompose_is(g, cfg)
    out = resolve_out_dir(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.graph).stem
    write_dimacs(reduced, out / f"{stem}.decomposed.dimacs")
    _write_json(out / f"{stem}.trace.json", trace.to_record())
    print(f"{g.vertex_count} -> {reduced.vertex_count} vertices ({trace.stop_reason})")
    return 0


def _anneal_from_args(args, base: AnnealConfig) -> AnnealConfig:
    cfg = base
    if args.reads is not None:
        cfg = replace(cfg, num_reads=args.reads)
    if args.sweeps is not None:
        cfg = replace(cfg, sweeps_per_read=args.sweeps)
    return cfg


def cmd_solve(args) -> int:
    g = read_dimacs(args.graph)
    client = LocalAnnealerClient(max_variables=args.max_nodes)
    cfg = _anneal_from_args(args, AnnealConfig(rng_seed=args.seed))
    model = build_mc_qubo(g)
    client.check(model)
    outcomes = client.sample(model, cfg)
    out = resolve_out_dir(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{Path(args.graph).stem}.outcomes.jsonl"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for o in outcomes:
            fh.write(json.dumps(o.to_record()) + "\n")
    best = best_clique_outcome(outcomes)
    print(f"best clique size {len(best.repaired_set)}: {sorted(best.repaired_set)}")
    return 0


def read_grouped_csv(path: str | Path) -> stats.GroupedSamples:
    groups: dict[str, list[float]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            label, value = row[0].strip(), row[1].strip()
            try:
                number = float(value)
            except ValueError:
                if not groups:  # header row
                    continue
                raise LabError(f"{path}: bad value {value!r} for group {label!r}")
            groups.setdefault(label, []).append(number)
    return stats.GroupedSamples.from_pairs(groups.items())


def cmd_stats(args) -> int:
    gs = read_grouped_csv(args.csv)
    alphas = tuple(args.alpha) if args.alpha else stats.DEFAULT_ALPHAS
    report = ExperimentReport(plan=None)
    run_statistics(report, gs, alphas)
    out = resolve_out_dir(args.out_dir)
    report_render(report, out)
    with open(out / "matrices.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=MATRIX_CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for m in report.matrices:
            writer.writerows(m.to_rows())
    for o in report.outcomes:
        p = "" if o.p_value is None else f" p={o.p_value:.6g}"
        name = f"{o.method}[{o.label}]" if o.label else o.method
        print(f"{name} alpha={o.alpha:g}: statistic={o.statistic:.6g}{p} reject={o.reject_null}")
    for m in report.matrices:
        print()
        print(m.render())
    for n in report.notes:
        print(f"note: {n}")
    return 0


def cmd_experiment(args) -> int:
    if args.example_plan:
        sys.stdout.write(PLAN_EXAMPLE)
        return 0
    if args.plan:
        plan = load_plan(args.plan)
    else:
        plan = builtin_plan(args.kind)
    if args.seed is not None:
        plan = replace(plan, master_seed=args.seed)
    if args.alpha:
        plan = replace(plan, alphas=tuple(args.alpha))
    plan = replace(plan, anneal=_anneal_from_args(args, plan.anneal))
    if args.dump_plan:
        sys.stdout.write(format_plan(plan))
        return 0
    report = run_experiment(plan, LocalAnnealerClient(max_variables=args.max_nodes))
    out = resolve_out_dir(args.out_dir)
    for path in report_render(report, out):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lab", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed_default=0):
        sp.add_argument("--seed", type=int, default=seed_default)
        sp.add_argument("--out-dir", default=None, help="output directory (LAB_OUT overrides)")

    g = sub.add_parser("generate", help="build a benchmark graph with planted cliques")
    common(g)
    g.add_argument("--n-node", type=int, required=True)
    g.add_argument("--ex-node", type=int, default=0)
    g.add_argument("--n-cli", type=int, default=1)
    g.add_argument("--add-edges", action="store_true")
    g.add_argument("--rand-cli", action="store_true")
    g.add_argument("--intra-pct", type=float, default=0.3)
    g.add_argument("--inter-pct", type=float, default=0.3)
    g.add_argument("--name", default="graph")
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("decompose", help="shrink a (complement) graph preserving its max IS")
    common(d)
    d.add_argument("graph")
    d.add_argument("--final-dim", type=int, required=True)
    d.add_argument("--min-cn", type=int, required=True)
    d.add_argument("--depth", type=int, default=5)
    d.add_argument("--budget", type=int, default=None)
    d.add_argument("--deterministic", action="store_true")
    d.set_defaults(func=cmd_decompose)

    s = sub.add_parser("solve", help="sample the maximum clique QUBO of a graph")
    common(s)
    s.add_argument("graph")
    s.add_argument("--reads", type=int, default=None)
    s.add_argument("--sweeps", type=int, default=None)
    s.add_argument("--max-nodes", type=int, default=EMBEDDING_LIMIT)
    s.set_defaults(func=cmd_solve)

    st = sub.add_parser("stats", help="run the test battery on a (group,value) CSV")
    common(st)
    st.add_argument("csv")
    st.add_argument("--alpha", type=float, action="append")
    st.set_defaults(func=cmd_stats)

    e = sub.add_parser("experiment", help="run an experiment plan end to end")
    common(e, seed_default=None)
    e.add_argument("--plan", help="plan file (see --example-plan)")
    e.add_argument("--kind", choices=KINDS, default="ratio_sweep")
    e.add_argument("--alpha", type=float, action="append")
    e.add_argument("--reads", type=int, default=None)
    e.add_argument("--sweeps", type=int, default=None)
    e.add_argument("--max-nodes", type=int, default=EMBEDDING_LIMIT)
    e.add_argument("--dump-plan", action="store_true", help="print the resolved plan and exit")
    e.add_argument("--example-plan", action="store_true", help="print a commented plan file")
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (LabError, OSError) as exc:
        print(f"lab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
