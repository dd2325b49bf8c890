"""Command-line harness: stats, exact counts, sampling, experiments, planning."""

from __future__ import annotations

import functools
import json
import sys

import click

from . import __version__
from .catalog import build_catalog
from .errors import (ConfigError, GraphParseError, InapplicableMethodError,
                     MosskitError, ScaleCapError)
from .estimators import (analytic_variance_moss4,
                         analytic_variance_moss4min, analytic_variance_moss5,
                         error_metrics, estimate_moss4, estimate_moss4min,
                         estimate_moss5, estimate_single5,
                         inclusion_probabilities, plan_budget)
from .graph import build_total_order, load_edge_list
from .oracle import DEFAULT_CIS_CAP, ExactCounts, enumerate_cis
from .rng import TapeRecorder, Xoshiro256, derive_stream_seed
from .samplers import run_partitioned, run_sampler
from .vertexsim import run_vertex_sampler
from .weights import build_weight_index

EXIT_CONFIG = 2
EXIT_INAPPLICABLE = 3
EXIT_SCALE_CAP = 4

METHODS = ("moss4", "moss4min", "moss5", "t5", "path5")


def _structured_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InapplicableMethodError as exc:
            click.echo(f"error: inapplicable method: {exc}", err=True)
            sys.exit(EXIT_INAPPLICABLE)
        except ScaleCapError as exc:
            click.echo(f"error: scale cap: {exc}", err=True)
            sys.exit(EXIT_SCALE_CAP)
        except (ConfigError, GraphParseError, OSError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except MosskitError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
    return wrapper


def _load(input_path):
    return load_edge_list(input_path)


def _provenance(graph, seed, config) -> dict:
    return {"tool": "mosskit", "version": __version__,
            "seed": seed, "graph_hash": graph.content_hash(),
            "config": config}


def _emit(payload: dict, csv_body: str | None, output, fmt) -> None:
    if fmt == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        prov = payload["provenance"]
        lines = [f"# tool={prov['tool']} version={prov['version']}",
                 f"# seed={prov['seed']} graph_hash={prov['graph_hash']}",
                 f"# config={json.dumps(prov['config'], sort_keys=True)}"]
        text = "\n".join(lines) + "\n" + (csv_body or "")
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(__version__)
def main():
    """Estimate 4- and 5-node connected-subgraph motif frequencies by sampling."""


@main.command("stats")
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@_structured_errors
def cmd_stats(input_path):
    """Print graph size and the global sampling weights."""
    graph = _load(input_path)
    order = build_total_order(graph)
    index = build_weight_index(graph, order)
    c = index.constants()
    click.echo(f"nodes           {graph.node_count}")
    click.echo(f"edges           {graph.edge_count}")
    click.echo(f"max_degree      {int(graph.degrees.max()) if graph.node_count else 0}")
    click.echo(f"gamma           {c['gamma']}")
    click.echo(f"gamma_check     {c['gamma_check']}")
    ratio = (c["gamma"] / c["gamma_check"]) if c["gamma_check"] else float("inf")
    click.echo(f"gamma_ratio     {ratio:.4f}")
    click.echo(f"gamma1          {c['gamma1']}")
    click.echo(f"gamma2          {c['gamma2']}")
    click.echo(f"lambda3         {c['lambda3']}")
    click.echo(f"lambda4         {c['lambda4']}")
    click.echo(f"graph_hash      {graph.content_hash()}")
    warn = {"moss4": c["gamma"], "moss4min": c["gamma_check"],
            "t5": c["gamma1"], "path5": c["gamma2"]}
    for method, total in warn.items():
        if total == 0:
            click.echo(f"warning: {method} is inapplicable (zero total weight)",
                       err=True)


@main.command("exact")
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("-k", "k", type=click.Choice(["4", "5"]), required=True)
@click.option("--cap", type=int, default=DEFAULT_CIS_CAP, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@_structured_errors
def cmd_exact(input_path, k, cap, output, fmt):
    """Exactly enumerate all connected induced k-node subgraphs."""
    graph = _load(input_path)
    catalog = build_catalog()
    counts = enumerate_cis(graph, int(k), catalog, cap=cap)
    payload = {"provenance": _provenance(graph, None, {"k": int(k), "cap": cap}),
               "exact": counts.to_json_obj()}
    csv_body = _exact_csv(counts)
    _emit(payload, csv_body, output, fmt)


def _exact_csv(counts: ExactCounts) -> str:
    lines = ["motif_id,estimate,variance,stderr,nrmse,ci_low,ci_high"]
    for i in sorted(counts.counts):
        c = counts.counts[i]
        lines.append(f"{i},{c},0.0,0.0,0.0,{c},{c}")
    return "\n".join(lines) + "\n"


def _run_method(method, graph, index, catalog, budget, budget2, seed, workers,
                engine, tape_path, order):
    """Run one CLI sampling request and build its EstimateReport."""
    if method == "moss5":
        k2 = budget2 if budget2 else budget
        t1 = _run_single("t5", graph, index, catalog, budget,
                         derive_stream_seed(seed, 1), workers, engine, tape_path)
        t2 = _run_single("path5", graph, index, catalog, k2,
                         derive_stream_seed(seed, 2), workers, engine, tape_path)
        return estimate_moss5(t1, t2, index, seed=seed)
    tally = _run_single(method, graph, index, catalog, budget,
                        derive_stream_seed(seed, 0), workers, engine, tape_path)
    if method == "moss4":
        return estimate_moss4(tally, index, seed=seed)
    if method == "moss4min":
        return estimate_moss4min(tally, index, seed=seed)
    return estimate_single5(tally, index, seed=seed)


def _run_single(method, graph, index, catalog, budget, stream_seed, workers,
                engine, tape_path):
    if engine == "vertex":
        if tape_path:
            with open(tape_path, encoding="utf-8") as fh:
                tapes = json.load(fh)
            tape = TapeRecorder.from_json_obj(tapes[method])
            return run_vertex_sampler(graph, index, catalog, method, budget,
                                      tape=tape)
        rng = Xoshiro256(stream_seed)
        return run_vertex_sampler(graph, index, catalog, method, budget, rng=rng)
    if tape_path:
        # direct engine with --tape records the decision tape for later replay
        rng = Xoshiro256(stream_seed)
        tape = TapeRecorder()
        tally = run_sampler(method, graph, index, catalog, budget, rng, tape=tape)
        try:
            with open(tape_path, encoding="utf-8") as fh:
                tapes = json.load(fh)
        except (OSError, json.JSONDecodeError):
            tapes = {}
        tapes[method] = tape.to_json_obj()
        with open(tape_path, "w", encoding="utf-8") as fh:
            json.dump(tapes, fh)
        return tally
    return run_partitioned(method, graph, index, catalog, budget,
                           stream_seed, workers)


def _sample_options(fn):
    opts = [
        click.option("--input", "input_path", required=True,
                     type=click.Path(exists=True, dir_okay=False)),
        click.option("--method", type=click.Choice(METHODS), required=True),
        click.option("--budget", type=int, required=True),
        click.option("--budget2", type=int, default=None,
                     help="second budget for moss5 (defaults to --budget)"),
        click.option("--seed", type=int, default=1),
        click.option("--workers", type=int, default=1),
        click.option("--output", type=click.Path(dir_okay=False), default=None),
        click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
                     default="json"),
        click.option("--level", type=float, default=0.95, show_default=True),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


@main.command("sample")
@_sample_options
@click.option("--engine", type=click.Choice(["direct", "vertex"]), default="direct")
@click.option("--tape", "tape_path", type=click.Path(dir_okay=False), default=None,
              help="record (direct) or replay (vertex) the decision tape")
@_structured_errors
def cmd_sample(input_path, method, budget, budget2, seed, workers, output, fmt,
               level, engine, tape_path):
    """Run one sampling method and write the estimate report."""
    if budget < 1 or (budget2 is not None and budget2 < 1):
        raise ConfigError("budgets must be >= 1")
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    graph = _load(input_path)
    order = build_total_order(graph)
    index = build_weight_index(graph, order)
    catalog = build_catalog()
    report = _run_method(method, graph, index, catalog, budget, budget2, seed,
                         workers, engine, tape_path, order)
    report.level = level
    config = {"method": method, "budget": budget, "budget2": budget2,
              "workers": workers, "engine": engine, "level": level}
    payload = {"provenance": _provenance(graph, seed, config),
               "report": report.to_json_obj()}
    _emit(payload, report.to_csv(), output, fmt)


@main.command("experiment")
@_sample_options
@click.option("--repeats", type=int, default=10, show_default=True)
@click.option("--ground-truth", "truth_path",
              type=click.Path(exists=True, dir_okay=False), default=None)
@_structured_errors
def cmd_experiment(input_path, method, budget, budget2, seed, workers, output,
                   fmt, level, repeats, truth_path):
    """Repeat a sampling run and report mean estimates, NRMSE, and StdErr."""
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    graph = _load(input_path)
    order = build_total_order(graph)
    index = build_weight_index(graph, order)
    catalog = build_catalog()
    runs = []
    for r in range(repeats):
        report = _run_method(method, graph, index, catalog, budget, budget2,
                             derive_stream_seed(seed, 1000 + r), workers,
                             "direct", None, order)
        runs.append(report.estimates)

    truth = None
    analytic = None
    if truth_path:
        with open(truth_path, encoding="utf-8") as fh:
            truth_obj = json.load(fh)
        truth = {int(i): c
                 for i, c in truth_obj.get("exact", truth_obj)["counts"].items()}
        k2 = budget2 if budget2 else budget
        if method == "moss4":
            analytic = analytic_variance_moss4(truth, index, budget)
        elif method == "moss4min":
            analytic = analytic_variance_moss4min(truth, index, budget)
        elif method == "moss5":
            analytic, _ = analytic_variance_moss5(truth, index, budget, k2)

    ids = sorted({i for run in runs for i in run})
    mean = {i: sum(run.get(i, 0.0) for run in runs) / len(runs) for i in ids}
    metrics = {"nrmse": {}, "stderr": {}}
    if truth is not None and repeats >= 2:
        metrics = error_metrics(runs, truth, analytic)
    rows = []
    for i in ids:
        nr = metrics["nrmse"].get(i)
        se = metrics["stderr"].get(i)
        ratio = (nr / se) if (nr is not None and se) else None
        rows.append({"motif_id": i, "mean_estimate": mean[i],
                     "nrmse": nr, "stderr": se, "nrmse_over_stderr": ratio})
    config = {"method": method, "budget": budget, "budget2": budget2,
              "repeats": repeats, "workers": workers, "level": level}
    payload = {"provenance": _provenance(graph, seed, config),
               "repeats": repeats, "degenerate_nrmse": repeats < 2,
               "rows": rows}
    lines = ["motif_id,mean_estimate,nrmse,stderr,nrmse_over_stderr"]
    for row in rows:
        lines.append(",".join("" if row[c] is None else str(row[c])
                              for c in ("motif_id", "mean_estimate", "nrmse",
                                        "stderr", "nrmse_over_stderr")))
    _emit(payload, "\n".join(lines) + "\n", output, fmt)


@main.command("plan")
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(("moss4", "moss4min", "t5", "path5")),
              required=True)
@click.option("--motifs", default=None,
              help="comma-separated motif IDs (default: all the method covers)")
@click.option("--epsilon", type=float, default=0.1, show_default=True)
@click.option("--delta", type=float, default=0.01, show_default=True)
@click.option("--pilot-budget", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=1)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@_structured_errors
def cmd_plan(input_path, method, motifs, epsilon, delta, pilot_budget, seed,
             output, fmt):
    """Pilot-run a method and plan the budget for a target relative error."""
    graph = _load(input_path)
    order = build_total_order(graph)
    index = build_weight_index(graph, order)
    catalog = build_catalog()
    rng = Xoshiro256(derive_stream_seed(seed, 0))
    tally = run_sampler(method, graph, index, catalog, pilot_budget, rng)
    if method == "moss4":
        report = estimate_moss4(tally, index)
    elif method == "moss4min":
        report = estimate_moss4min(tally, index)
    else:
        report = estimate_single5(tally, index)
    p = {i: float(f) for i, f in inclusion_probabilities(method, index).items()}
    wanted = sorted(p) if motifs is None else [int(x) for x in motifs.split(",")]
    plans = {}
    for i in wanted:
        if i not in p:
            raise ConfigError(f"motif {i} is not estimable by {method}")
        est = report.estimates.get(i, 0.0)
        if est <= 0:
            raise InapplicableMethodError(
                f"pilot produced no hits for motif {i}; increase pilot budget")
        plans[i] = plan_budget(p[i], est, epsilon, delta)
    config = {"method": method, "epsilon": epsilon, "delta": delta,
              "pilot_budget": pilot_budget, "motifs": wanted}
    payload = {"provenance": _provenance(graph, seed, config),
               "pilot_estimates": {str(i): report.estimates.get(i, 0.0)
                                   for i in wanted},
               "planned_budget": {str(i): plans[i] for i in wanted},
               "max_budget": max(plans.values())}
    lines = ["motif_id,pilot_estimate,planned_budget"]
    for i in wanted:
        lines.append(f"{i},{report.estimates.get(i, 0.0)},{plans[i]}")
    _emit(payload, "\n".join(lines) + "\n", output, fmt)


if __name__ == "__main__":
    main()
