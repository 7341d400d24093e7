"""Experiment orchestration: generate, solve, replace nulls, analyse.

An experiment runs groups of benchmark graphs built from recipe templates.
Each instance gets a child seed hashed from the master seed, the group
label, the replicate index and the attempt number, so any single run can
be regenerated in isolation and reruns are byte-identical.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import stats
from ._rng import derive_seed
from .benchgen import BenchGraph, GraphRecipe, clique_size_for_ratio, graph_creation, ratio
from .errors import LabError, PlanValidationError
from .graph import ConnectivityIndices, connectivity_indices, density
from .qubo import is_clique
from .solvers import (
    EMBEDDING_LIMIT,
    ORACLE_LIMIT,
    AnnealConfig,
    AnnealerClient,
    LocalAnnealerClient,
    SampleOutcome,
    clique_number,
    solve_max_clique,
)

log = logging.getLogger(__name__)

KINDS = ("ratio_sweep", "density_sweep", "indices_study", "clique_count", "size_study")
KEPT = "kept"
DISCARDED = "discarded_null"


@dataclass(frozen=True)
class GroupSpec:
    label: str
    recipe: GraphRecipe  # rng_seed is ignored; child seeds replace it
    replicates: int


@dataclass(frozen=True)
class ExperimentPlan:
    kind: str
    groups: tuple[GroupSpec, ...]
    anneal: AnnealConfig = AnnealConfig()
    alphas: tuple[float, ...] = stats.DEFAULT_ALPHAS
    master_seed: int = 0
    max_null_replacements: Optional[int] = None  # per group; None -> 3 * replicates

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise PlanValidationError(f"unknown experiment kind {self.kind!r}")
        labels = [g.label for g in self.groups]
        if len(set(labels)) != len(labels):
            raise PlanValidationError(f"group labels must be unique: {labels}")
        for g in self.groups:
            if g.replicates < 1:
                raise PlanValidationError(f"group {g.label!r}: replicates must be >= 1")
            if g.recipe.final_dim > EMBEDDING_LIMIT:
                raise PlanValidationError(
                    f"group {g.label!r}: final_dim {g.recipe.final_dim} exceeds the "
                    f"{EMBEDDING_LIMIT}-variable embedding limit"
                )
        if not self.alphas:
            raise PlanValidationError("at least one alpha level is required")
        if self.max_null_replacements is not None and self.max_null_replacements < 0:
            raise PlanValidationError("max_null_replacements must be >= 0")

    def budget_for(self, group: GroupSpec) -> int:
        if self.max_null_replacements is not None:
            return self.max_null_replacements
        return 3 * group.replicates


@dataclass(frozen=True)
class RunRecord:
    graph_id: str
    group: str
    status: str
    recipe: GraphRecipe
    final_dim: int
    planted_max_size: int
    oracle_clique_size: Optional[int]
    outcome: SampleOutcome
    quality: float
    density: Optional[float]  # None below 2 vertices
    ratio: Optional[float]  # None when the clique spans the whole graph
    indices: ConnectivityIndices
    replaced_null_count: int

    def to_record(self) -> dict:
        return {
            "graph_id": self.graph_id,
            "group": self.group,
            "status": self.status,
            "recipe": self.recipe.to_record(),
            "final_dim": self.final_dim,
            "planted_max_size": self.planted_max_size,
            "oracle_clique_size": self.oracle_clique_size,
            "outcome": self.outcome.to_record(),
            "quality": self.quality,
            "density": self.density,
            "ratio": self.ratio,
            "indices": asdict(self.indices),
            "replaced_null_count": self.replaced_null_count,
        }


@dataclass
class ReplacementRecord:
    kept: Optional[RunRecord]
    discarded: list[RunRecord]
    replacements: int
    exhausted: bool


@dataclass
class GroupResult:
    label: str
    kept: list[RunRecord] = field(default_factory=list)
    discarded: list[RunRecord] = field(default_factory=list)
    replacements: int = 0
    incomplete: bool = False

    @property
    def generated(self) -> int:
        return len(self.kept) + len(self.discarded)

    def qualities(self) -> list[float]:
        return [r.quality for r in self.kept]


@dataclass
class ExperimentReport:
    plan: Optional[ExperimentPlan]
    groups: list[GroupResult] = field(default_factory=list)
    outcomes: list[stats.TestOutcome] = field(default_factory=list)
    matrices: list[stats.PairwiseMatrix] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def records(self) -> list[RunRecord]:
        out = []
        for g in self.groups:
            out.extend(sorted(g.kept + g.discarded, key=lambda r: r.graph_id))
        return out


# -- running ---------------------------------------------------------------------

def instance_seed(master_seed: int, label: str, replicate: int, attempt: int) -> int:
    return derive_seed("instance", master_seed, label, replicate, attempt)


def run_instance(
    bench: BenchGraph,
    graph_id: str,
    group: str,
    client: AnnealerClient,
    cfg: AnnealConfig,
) -> RunRecord:
    g = bench.graph
    outcome = solve_max_clique(g, client, cfg)
    if not is_clique(g, outcome.repaired_set):
        raise LabError(f"{graph_id}: solver returned a non-clique")
    oracle = clique_number(g) if g.vertex_count <= ORACLE_LIMIT else None
    if oracle is not None and oracle != bench.planted_max_size:
        raise LabError(
            f"{graph_id}: oracle clique number {oracle} != planted {bench.planted_max_size}"
        )
    quality = 0.0 if outcome.is_null else len(outcome.repaired_set) / bench.planted_max_size
    return RunRecord(
        graph_id=graph_id,
        group=group,
        status=DISCARDED if outcome.is_null else KEPT,
        recipe=bench.recipe,
        final_dim=g.vertex_count,
        planted_max_size=bench.planted_max_size,
        oracle_clique_size=oracle,
        outcome=outcome,
        quality=quality,
        density=density(g) if g.vertex_count >= 2 else None,
        ratio=(
            ratio(bench.planted_max_size, g.vertex_count)
            if g.vertex_count > bench.planted_max_size else None
        ),
        indices=connectivity_indices(g),
        replaced_null_count=0,
    )


def null_replacement(attempt: Callable[[int], RunRecord], budget: int) -> ReplacementRecord:
    """Call ``attempt(0), attempt(1), ...`` until a non-null run or the budget is spent.

    ``budget`` counts replacements, so at most ``budget + 1`` attempts are made.
    """
    if budget < 0:
        raise LabError(f"budget must be >= 0, got {budget}")
    discarded: list[RunRecord] = []
    k = 0
    while True:
        rec = attempt(k)
        if not rec.outcome.is_null:
            return ReplacementRecord(replace(rec, replaced_null_count=k), discarded, k, False)
        discarded.append(replace(rec, status=DISCARDED))
        if k >= budget:
            return ReplacementRecord(None, discarded, k, True)
        k += 1


def run_group(plan: ExperimentPlan, spec: GroupSpec, client: AnnealerClient) -> GroupResult:
    result = GroupResult(spec.label)
    budget = plan.budget_for(spec)
    for i in range(spec.replicates):
        def attempt(k: int, i=i) -> RunRecord:
            seed = instance_seed(plan.master_seed, spec.label, i, k)
            bench = graph_creation(replace(spec.recipe, rng_seed=seed))
            cfg = replace(plan.anneal, rng_seed=derive_seed("anneal", seed))
            return run_instance(bench, f"{spec.label}-r{i:03d}-a{k:02d}", spec.label, client, cfg)

        rep = null_replacement(attempt, budget - result.replacements)
        result.replacements += rep.replacements
        result.discarded.extend(rep.discarded)
        if rep.kept is not None:
            result.kept.append(rep.kept)
        else:
            result.incomplete = True
    return result


def _guarded(report: ExperimentReport, name: str, fn, *args):
    try:
        return fn(*args)
    except LabError as exc:
        report.notes.append(f"{name}: {type(exc).__name__}: {exc}")
        return None


def run_statistics(
    report: ExperimentReport, gs: stats.GroupedSamples, alphas: Sequence[float]
) -> None:
    """Cochran, Shapiro-Wilk per group, ANOVA + LSD, Kruskal-Wallis + pairwise MW.

    Failures of individual tests (degenerate data, unequal sizes) become
    report notes. Post-hoc panels are always produced; a note flags them as
    informational when the omnibus test did not reject.
    """
    out = report.outcomes
    for alpha in alphas:
        res = _guarded(report, f"cochran alpha={alpha:g}", stats.cochran_c, gs, alpha)
        if res:
            out.append(res)
    for label, values in zip(gs.labels, gs.values):
        for alpha in alphas:
            res = _guarded(report, f"shapiro_wilk {label} alpha={alpha:g}",
                           stats.shapiro_wilk, values, alpha, label)
            if res:
                out.append(res)
    anova = None
    for alpha in alphas:
        res = _guarded(report, f"anova alpha={alpha:g}", stats.anova_oneway, gs, alpha)
        if res:
            out.append(res)
            anova = anova or res
    if anova is not None:
        lsd = _guarded(report, "lsd", stats.lsd_pairwise, gs, alphas[0])
        if lsd:
            report.matrices.append(lsd)
        if not anova.reject_null:
            report.notes.append(
                f"anova did not reject at alpha={alphas[0]:g}; LSD panel is informational"
            )
    kw = None
    for alpha in alphas:
        res = _guarded(report, f"kruskal_wallis alpha={alpha:g}", stats.kruskal_wallis, gs, alpha)
        if res:
            out.append(res)
            kw = kw or res
    panels = _guarded(report, "mann_whitney", stats.pairwise_mw_matrix, gs, alphas)
    if panels:
        report.matrices.extend(panels)
        if kw is None or not kw.reject_null:
            report.notes.append(
                f"kruskal_wallis did not reject at alpha={alphas[0]:g}; "
                "Mann-Whitney panels are informational"
            )


def run_experiment(
    plan: ExperimentPlan, client: Optional[AnnealerClient] = None
) -> ExperimentReport:
    plan.validate()
    client = client or LocalAnnealerClient()
    report = ExperimentReport(plan)
    for spec in plan.groups:
        log.info("group %s: %d replicates", spec.label, spec.replicates)
        result = run_group(plan, spec, client)
        if result.incomplete:
            report.notes.append(
                f"group {spec.label}: replacement budget exhausted, "
                f"{len(result.kept)}/{spec.replicates} runs kept"
            )
        if spec.recipe.final_dim > ORACLE_LIMIT:
            report.notes.append(
                f"group {spec.label}: oracle check skipped above {ORACLE_LIMIT} vertices"
            )
        report.groups.append(result)
    groups = [(g.label, g.qualities()) for g in report.groups if g.kept]
    if len(groups) < 2:
        report.notes.append("statistics skipped: fewer than two groups with kept runs")
    else:
        run_statistics(report, stats.GroupedSamples.from_pairs(groups), plan.alphas)
    return report


# -- rendering -----------------------------------------------------------------

STATS_FIELDS = ("method", "label", "statistic", "p_value", "alpha", "reject_null")
MATRIX_HEADER = "# pairwise group comparisons: ok = no significant difference, X = significant"
SUMMARY_HEADER = "group\tkept\tmean_quality\tvar_quality\tnulls\treplacements\tnull_rate\tincomplete"

_INDEX_FIELDS = tuple(ConnectivityIndices.__dataclass_fields__)


def _fmt(x: float) -> str:
    return "nan" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.6g}"


def _summary_text(report: ExperimentReport) -> str:
    lines = [SUMMARY_HEADER]
    for g in report.groups:
        q = np.array(g.qualities())
        mean = float(q.mean()) if len(q) else math.nan
        var = float(q.var(ddof=1)) if len(q) > 1 else math.nan
        nulls = len(g.discarded)
        rate = nulls / g.generated if g.generated else math.nan
        lines.append("\t".join([
            g.label, str(len(g.kept)), _fmt(mean), _fmt(var), str(nulls),
            str(g.replacements), _fmt(rate), str(g.incomplete).lower(),
        ]))
    if report.groups:
        generated = sum(g.generated for g in report.groups)
        kept = sum(len(g.kept) for g in report.groups)
        lines.append("")
        lines.append(f"accounting: generated={generated} kept={kept} discarded_null={generated - kept}")
        lines.extend(_indices_summary(report))
    if report.notes:
        lines.append("")
        lines.extend(f"note: {n}" for n in report.notes)
    return "\n".join(lines) + "\n"


def _indices_summary(report: ExperimentReport) -> list[str]:
    """Mean connectivity indices per group and for optimal vs sub-optimal runs."""
    lines = ["", "indices\t" + "\t".join(_INDEX_FIELDS)]

    def means(records):
        return [
            _fmt(float(np.mean([getattr(r.indices, f) for r in records]))) if records else "nan"
            for f in _INDEX_FIELDS
        ]

    for g in report.groups:
        lines.append(f"{g.label}\t" + "\t".join(means(g.kept)))
    kept = [r for g in report.groups for r in g.kept]
    optimal = [r for r in kept if r.quality == 1.0]
    partial = [r for r in kept + [r for g in report.groups for r in g.discarded] if r.quality < 1.0]
    if optimal and partial:
        diff = [
            _fmt(float(np.mean([getattr(r.indices, f) for r in optimal])
                       - np.mean([getattr(r.indices, f) for r in partial])))
            for f in _INDEX_FIELDS
        ]
        lines.append("optimal-minus-partial\t" + "\t".join(diff))
    return lines


def report_render(report: ExperimentReport, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc

    runs = "".join(json.dumps(r.to_record()) + "\n" for r in report.records())

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=STATS_FIELDS, lineterminator="\n")
    writer.writeheader()
    for o in report.outcomes:
        writer.writerow(o.to_row())

    panels = [MATRIX_HEADER] + [m.render() + "\n" for m in report.matrices]
    texts = {
        "runs.jsonl": runs,
        "stats.csv": buf.getvalue(),
        "matrices.txt": "\n".join(panels) + "\n",
        "summary.txt": _summary_text(report),
    }
    paths = []
    for name, text in texts.items():
        path = out / name
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        paths.append(path)
    return paths


# -- plans ---------------------------------------------------------------------

DESK_DIM = 40
DESK_REPLICATES = 6
# short, hot anneal so that solution quality varies between groups
DESK_ANNEAL = AnnealConfig(num_reads=2, sweeps_per_read=30, beta_initial=0.05, beta_final=3.0)


def _ratio_group(label: str, r: float, dim: int, reps: int, **kw) -> GroupSpec:
    c = clique_size_for_ratio(r, dim)
    return GroupSpec(label, GraphRecipe(n_node=c, ex_node=dim - c, **kw), reps)


def builtin_plan(kind: str, master_seed: int = 0, anneal: AnnealConfig = DESK_ANNEAL) -> ExperimentPlan:
    """Desk-scale versions of the five experiment designs."""
    d, reps = DESK_DIM, DESK_REPLICATES
    if kind == "ratio_sweep":
        ratios = (0.1, 0.2, 0.3, 0.42, 0.6, 0.8, 1.0)
        groups = [_ratio_group(f"G{i + 1}", r, d, reps) for i, r in enumerate(ratios)]
    elif kind == "density_sweep":
        groups = [
            _ratio_group(f"D{int(p * 100):02d}", 0.42, d, reps, intra_edge_pct=p)
            for p in (0.1, 0.3, 0.5, 0.7)
        ]
    elif kind == "indices_study":
        groups = [
            _ratio_group("sparse", 0.42, d, reps, intra_edge_pct=0.1),
            _ratio_group("dense", 0.42, d, reps, intra_edge_pct=0.5),
        ]
    elif kind == "clique_count":
        c = clique_size_for_ratio(0.42, d)
        groups = [
            GroupSpec(f"C{k}", GraphRecipe(n_node=c, ex_node=d - c * k, n_cli=k, add_edges=True), reps)
            for k in (1, 2, 3)
        ]
    elif kind == "size_study":
        groups = [
            _ratio_group("N121-R0.42", 0.42, 121, reps),
            _ratio_group("N143-R0.42", 0.42, 143, reps),
            _ratio_group("N164-R0.42", 0.42, 164, reps),
            _ratio_group("N164-R1", 1.0, 164, reps),
        ]
    else:
        raise PlanValidationError(f"unknown experiment kind {kind!r}")
    return ExperimentPlan(kind, tuple(groups), anneal=anneal, master_seed=master_seed)


_RECIPE_KEYS = ("n_node", "ex_node", "n_cli", "add_edges", "rand_cli", "intra_edge_pct", "inter_edge_pct")

PLAN_EXAMPLE = """\
# Experiment plan. Lines starting with '#' or ';' are comments.
[plan]
# one of: ratio_sweep, density_sweep, indices_study, clique_count, size_study
kind = ratio_sweep
master_seed = 2024
alphas = 0.05, 0.1, 0.2
# per-group null replacement budget; omit for 3 x replicates
max_null_replacements = 18

[anneal]
num_reads = 2
sweeps_per_read = 30
beta_initial = 0.05
beta_final = 3.0

# one section per group, in report order
[group G1]
replicates = 6
n_node = 4
ex_node = 36
n_cli = 1
add_edges = false
rand_cli = false
intra_edge_pct = 0.3
inter_edge_pct = 0.3
"""


def parse_plan(text: str) -> ExperimentPlan:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise PlanValidationError(f"unreadable plan file: {exc}") from exc
    if not cp.has_section("plan"):
        raise PlanValidationError("plan file needs a [plan] section")
    try:
        p = cp["plan"]
        a = cp["anneal"] if cp.has_section("anneal") else {}
        anneal = AnnealConfig(
            num_reads=int(a.get("num_reads", DESK_ANNEAL.num_reads)),
            sweeps_per_read=int(a.get("sweeps_per_read", DESK_ANNEAL.sweeps_per_read)),
            beta_initial=float(a.get("beta_initial", DESK_ANNEAL.beta_initial)),
            beta_final=float(a.get("beta_final", DESK_ANNEAL.beta_final)),
        )
        groups = []
        for name in cp.sections():
            if not name.startswith("group "):
                continue
            sec = cp[name]
            recipe = GraphRecipe(
                n_node=sec.getint("n_node"),
                ex_node=sec.getint("ex_node", 0),
                n_cli=sec.getint("n_cli", 1),
                add_edges=sec.getboolean("add_edges", False),
                rand_cli=sec.getboolean("rand_cli", False),
                intra_edge_pct=sec.getfloat("intra_edge_pct", 0.3),
                inter_edge_pct=sec.getfloat("inter_edge_pct", 0.3),
            )
            groups.append(GroupSpec(name[len("group "):].strip(), recipe, sec.getint("replicates", 1)))
        budget = p.get("max_null_replacements")
        plan = ExperimentPlan(
            kind=p.get("kind", "ratio_sweep"),
            groups=tuple(groups),
            anneal=anneal,
            alphas=tuple(float(x) for x in p.get("alphas", "0.05, 0.1, 0.2").split(",")),
            master_seed=int(p.get("master_seed", "0")),
            max_null_replacements=None if budget is None else int(budget),
        )
    except (ValueError, TypeError, KeyError) as exc:
        raise PlanValidationError(f"bad plan value: {exc}") from exc
    plan.validate()
    return plan


def format_plan(plan: ExperimentPlan) -> str:
    lines = [
        "[plan]",
        f"kind = {plan.kind}",
        f"master_seed = {plan.master_seed}",
        "alphas = " + ", ".join(f"{a:g}" for a in plan.alphas),
    ]
    if plan.max_null_replacements is not None:
        lines.append(f"max_null_replacements = {plan.max_null_replacements}")
    a = plan.anneal
    lines += [
        "",
        "[anneal]",
        f"num_reads = {a.num_reads}",
        f"sweeps_per_read = {a.sweeps_per_read}",
        f"beta_initial = {a.beta_initial!r}",
        f"beta_final = {a.beta_final!r}",
    ]
    for g in plan.groups:
        lines += ["", f"[group {g.label}]", f"replicates = {g.replicates}"]
        for key in _RECIPE_KEYS:
            val = getattr(g.recipe, key)
            lines.append(f"{key} = {str(val).lower() if isinstance(val, bool) else val}")
    return "\n".join(lines) + "\n"


def load_plan(path: str | Path) -> ExperimentPlan:
    with open(path, encoding="utf-8") as fh:
        return parse_plan(fh.read())


def resolve_out_dir(cli_value: Optional[str]) -> Path:
    return Path(os.environ.get("LAB_OUT") or cli_value or "lab-out")
