"""Command-line interface.

Exit codes: 0 on success, 2 on input/usage errors (bad files, unknown
variables, invalid flags), 3 on capacity errors (enumeration caps exceeded).
"""

from __future__ import annotations

import importlib.resources
import sys

import click

from .discrete import verify_faithfulness
from .engine import (
    check_summand_structure,
    exact_shapley,
    monte_carlo_shapley,
    pairwise_shapley_diff,
    verify_axioms,
)
from .errors import CapacityError, InputError, NumericalError
from .games import network_game, variable_mask_to_player_mask
from .graph import (
    classify_relevance,
    d_separated,
    markov_boundary,
    mask_members,
    mask_of,
)
from .modelfile import DiscreteModel, ReportEnvelope, load_model_file
from .prevalence import SimConfig, run_prevalence
from .selection import (
    compare_strategies,
    select_markov_boundary,
    select_rfe,
    select_top_k,
)

EXIT_INPUT = 2
EXIT_CAPACITY = 3


def _load(model_path):
    model = load_model_file(model_path)
    if isinstance(model, DiscreteModel):
        return model.net, model.graph
    return model, model.graph


def _game(model):
    return network_game(model, metric="accuracy")


def _emit(envelope: ReportEnvelope, out: str, table_lines):
    if out == "json":
        click.echo(envelope.to_json())
    else:
        for line in table_lines:
            click.echo(line)


def _phi_table(report) -> list[str]:
    lines = [f"{'player':<12}{'phi':>14}" + ("" if report.std_errors is None else f"{'stderr':>14}")]
    for i in report.ranking():
        row = f"{report.names[i]:<12}{report.values[i]:>14.6g}"
        if report.std_errors is not None:
            row += f"{report.std_errors[i]:>14.6g}"
        lines.append(row)
    lines.append(f"baseline          {report.baseline:.6g}")
    lines.append(f"grand value       {report.grand_value:.6g}")
    lines.append(f"efficiency resid  {report.efficiency_residual():.3e}")
    if report.summands is not None:
        lines.append(
            f"summands          {sum(len(v) for v in report.summands.values())}"
        )
    return lines


@click.group()
def cli():
    """Shapley-value analysis of Bayesian-network prediction games."""


@cli.command()
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--exact", "mode", flag_value="exact", default=True)
@click.option("--mc", type=int, default=None, help="Monte Carlo permutation samples.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--stratify-mb", is_flag=True, help="Stratify MC on the Markov boundary.")
@click.option("--out", type=click.Choice(["json", "table"]), default="table")
def shapley(model_path, mode, mc, seed, stratify_mb, out):
    """Shapley values of every variable for predicting the target."""
    model, g = _load(model_path)
    f = _game(model)
    if mc is not None:
        if mc < 1:
            raise click.UsageError("--mc must be a positive sample count")
        strata = None
        if stratify_mb:
            strata = variable_mask_to_player_mask(g, markov_boundary(g))
        report = monte_carlo_shapley(f, samples=mc, seed=seed, strata=strata)
    else:
        report = exact_shapley(f)
    envelope = ReportEnvelope("shapley", report.to_dict(), seed=seed if mc else None)
    _emit(envelope, out, _phi_table(report))


@cli.command()
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.argument(
    "query", type=click.Choice(["mb", "dsep", "relevance", "verify-faithfulness"])
)
@click.argument("args", nargs=-1)
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.option("--out", type=click.Choice(["json", "table"]), default="table")
def structure(model_path, query, args, tol, out):
    """Structural queries: Markov boundary, d-separation, relevance, faithfulness."""
    model, g = _load(model_path)
    if query == "mb":
        mb = markov_boundary(g)
        names = [g.names[i] for i in mask_members(mb)]
        payload = {"markov_boundary": names}
        lines = ["markov boundary: " + (", ".join(names) if names else "(empty)")]
    elif query == "dsep":
        if len(args) < 2:
            raise click.UsageError("dsep needs: X Y [Z...]")
        x, y = g.index_of(args[0]), g.index_of(args[1])
        z = mask_of(g.index_of(a) for a in args[2:])
        result = d_separated(g, x, y, z)
        payload = {"x": args[0], "y": args[1], "given": list(args[2:]), "d_separated": result}
        lines = [f"d-separated: {str(result).lower()}"]
    elif query == "relevance":
        classes = classify_relevance(g)
        payload = {"relevance": {g.names[i]: c.value for i, c in classes.items()}}
        lines = [f"{g.names[i]:<12}{c.value}" for i, c in classes.items()]
    else:  # verify-faithfulness
        if not hasattr(model, "joint"):
            raise click.UsageError(
                "verify-faithfulness requires a discrete model (exhaustive check)"
            )
        violations = verify_faithfulness(model, tol=tol)
        payload = {
            "violations": [
                {
                    "x": g.names[v.x],
                    "y": g.names[v.y],
                    "given": [g.names[i] for i in mask_members(v.z)],
                    "direction": v.direction,
                }
                for v in violations
            ]
        }
        if violations:
            lines = [f"{len(violations)} faithfulness violations:"] + [
                f"  {d['x']} vs {d['y']} given {{{', '.join(d['given'])}}}: {d['direction']}"
                for d in payload["violations"]
            ]
        else:
            lines = ["no faithfulness violations"]
    _emit(ReportEnvelope(f"structure.{query}", payload), out, lines)


@cli.command()
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--strategy", type=click.Choice(["topk", "rfe", "mb"]), required=True
)
@click.option("--k", type=int, default=None, help="Set size for topk / stop size for rfe.")
@click.option("--out", type=click.Choice(["json", "table"]), default="table")
def select(model_path, strategy, k, out):
    """Feature selection by Shapley ranking, with a Markov-boundary comparison."""
    model, g = _load(model_path)
    f = _game(model)
    if strategy in ("topk", "rfe"):
        if k is None or k < 1:
            raise click.UsageError("--k must be a positive integer for this strategy")
        if k > f.n_players:
            raise click.UsageError(f"--k exceeds the {f.n_players} available variables")
        result = select_top_k(f, k) if strategy == "topk" else select_rfe(f, k)
    else:
        result = select_markov_boundary(g, f)
    comparison = compare_strategies([result], f, g)[0]
    payload = {"selection": result.to_dict(), "comparison": comparison.to_dict()}
    lines = [
        f"strategy          {result.strategy}",
        f"selected          {', '.join(result.selected_names()) or '(empty)'}",
        f"performance       {result.performance:.6g}",
        f"oracle (MB)       {comparison.oracle_performance:.6g}",
        f"gap               {comparison.gap:.6g}",
        f"optimal           {comparison.optimal}",
        f"minimal optimal   {comparison.minimal_optimal}",
    ]
    if comparison.missed_boundary:
        lines.append(f"missed boundary   {', '.join(comparison.missed_boundary)}")
    if comparison.redundant_extras:
        lines.append(f"redundant extras  {', '.join(comparison.redundant_extras)}")
    _emit(ReportEnvelope("select", payload), out, lines)


@cli.command("verify-theorems")
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.option("--out", type=click.Choice(["json", "table"]), default="table")
def verify_theorems(model_path, tol, out):
    """Structural sanity checks tying Shapley summands to the graph."""
    model, g = _load(model_path)
    f = _game(model)
    report = exact_shapley(f)

    structure_findings = check_summand_structure(report, g, tol=tol)
    axiom_findings = verify_axioms(f, report, tol=tol)

    players = g.non_target_variables()
    t = g.target
    dominance_checks = []
    for a in range(len(players)):
        for b in range(len(players)):
            if a == b:
                continue
            vi, vj = players[a], players[b]
            sep_i = d_separated(g, vi, t, 1 << vj)
            sep_j = d_separated(g, vj, t, 1 << vi)
            if sep_i and not sep_j:
                diff = pairwise_shapley_diff(f, b, a)
                ok = (
                    report.values[b] > report.values[a]
                    and abs(diff - (report.values[b] - report.values[a])) <= tol
                )
                dominance_checks.append(
                    {
                        "separated": f.names[a],
                        "separator": f.names[b],
                        "phi_gap": float(report.values[b] - report.values[a]),
                        "ok": bool(ok),
                    }
                )
    payload = {
        "summand_structure": structure_findings.to_dict(),
        "dominance": dominance_checks,
        "axioms": axiom_findings.to_dict(),
    }
    lines = []
    lines.append(
        f"summand structure   {'PASS' if structure_findings.ok else 'FAIL'}"
    )
    for r in structure_findings.records:
        lines.append(
            f"  {r.name:<10} expected {r.expected:<13} observed {r.observed:<13}"
            f" {'ok' if not r.mismatch else 'MISMATCH'}"
        )
    dom_ok = all(c["ok"] for c in dominance_checks)
    lines.append(
        f"separation dominance {'PASS' if dom_ok else 'FAIL'} "
        f"({len(dominance_checks)} pair(s))"
    )
    lines.append(f"axioms              {'PASS' if axiom_findings.ok else 'FAIL'}")
    for v in axiom_findings.violations:
        lines.append(f"  {v}")
    _emit(ReportEnvelope("verify-theorems", payload), out, lines)


@cli.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Choice(["json", "table"]), default="table")
def simulate(config_path, out):
    """Run the random-network prevalence experiment described by a config file."""
    with open(config_path, "r", encoding="utf-8") as fh:
        config = SimConfig.from_json(fh.read())
    report = run_prevalence(config)
    payload = report.to_dict()
    lines = [
        f"networks analyzed   {len(report.records)}",
        f"{'event':<8}{'frequency':>12}{'95% CI':>20}",
    ]
    for event, (freq, lo, hi) in report.frequencies.items():
        lines.append(f"{event:<8}{freq:>12.4g}    [{lo:.4g}, {hi:.4g}]")
    bad = [r.index for r in report.records if not r.axioms_ok]
    lines.append(f"axiom re-verification {'PASS' if not bad else 'FAIL: ' + str(bad)}")
    _emit(ReportEnvelope("simulate", payload, seed=config.seed), out, lines)


@cli.command()
@click.argument("name", required=False)
def examples(name):
    """List bundled example models, or print one by name."""
    data = importlib.resources.files("shapbn") / "data"
    available = sorted(p.name for p in data.iterdir() if p.name.endswith(".json"))
    if name is None:
        for item in available:
            click.echo(item)
        return
    if name not in available:
        raise click.UsageError(f"unknown example {name!r}; choose from {available}")
    click.echo((data / name).read_text())


def main():
    try:
        cli.main(standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(EXIT_INPUT)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_INPUT)
    except click.exceptions.Abort:
        sys.exit(1)
    except CapacityError as exc:
        click.echo(f"capacity error: {exc}", err=True)
        sys.exit(EXIT_CAPACITY)
    except (InputError, NumericalError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)


if __name__ == "__main__":
    main()
