"""Command-line interface: analyze, compare, simulate and sybil subcommands.

Exit codes: 0 success, 1 data/compute errors, 2 usage errors.  Seeded
commands are byte-deterministic; DESTAKE_SEED overrides the default seed and
DESTAKE_JOBS caps the worker threads used for multi-snapshot comparisons.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import report as reporting
from . import shapley as coalition
from .errors import DestakeError, InvalidSplitError
from .ingest import parse_snapshot
from .metrics import full_report, write_lorenz_csv
from .model import StakeSnapshot, WeightScheme, compute_weights
from .rewards import RewardParams, sybil_split_analysis
from .simulate import (
    SimulationConfig,
    run_compounding,
    write_proposers_csv,
    write_trace_csv,
)

_FORMATS = click.Choice(["table", "csv", "json"])
_SCHEMES = click.Choice(["linear", "srsw", "lsw", "power"])
_SHAPLEY_MODES = click.Choice(["sampled", "exact", "off"])


def _default_seed() -> int:
    raw = os.environ.get("DESTAKE_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise click.UsageError(f"DESTAKE_SEED must be an integer, got {raw!r}")


def _jobs(n_inputs: int) -> int:
    raw = os.environ.get("DESTAKE_JOBS")
    if raw is not None:
        try:
            jobs = int(raw)
        except ValueError:
            raise click.UsageError(f"DESTAKE_JOBS must be an integer, got {raw!r}")
        if jobs < 1:
            raise click.UsageError("DESTAKE_JOBS must be >= 1")
    else:
        jobs = min(4, os.cpu_count() or 1)
    return max(1, min(jobs, n_inputs))


def _build_scheme(kind: str, exponent: float | None, lsw_no_offset: bool) -> WeightScheme:
    if kind == "power":
        if exponent is None:
            raise click.UsageError("--scheme power requires --exponent")
        try:
            return WeightScheme.power(exponent)
        except ValueError as exc:
            raise click.UsageError(str(exc))
    if exponent is not None:
        raise click.UsageError(f"--exponent only applies to --scheme power, not {kind}")
    if kind == "lsw":
        return WeightScheme.lsw(offset=not lsw_no_offset)
    return WeightScheme(kind)


def _parse_or_fail(path: str) -> StakeSnapshot:
    try:
        return parse_snapshot(path)
    except DestakeError as exc:
        raise click.ClickException(str(exc))


@click.group()
def main() -> None:
    """Quantify and improve the decentralization of PoS validator sets."""


@main.command()
@click.option("--input", "input_path", required=True, help="Snapshot file (.json or .csv).")
@click.option("--format", "fmt", type=_FORMATS, default="table", show_default=True)
@click.option("--scheme", type=_SCHEMES, default="linear", show_default=True)
@click.option("--exponent", type=float, default=None, help="Exponent for --scheme power.")
@click.option("--lsw-no-offset", is_flag=True, help="Use log(s) instead of log(1+s) for lsw.")
@click.option("--shapley", type=_SHAPLEY_MODES, default="sampled", show_default=True)
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=None, help="Sampling seed (default: DESTAKE_SEED or 0).")
@click.option("--literal-thresholds", is_flag=True,
              help="Use the literal 0.33/0.66 voting-game thresholds instead of 1/3 and 2/3.")
@click.option("--lorenz-csv", type=click.Path(dir_okay=False), default=None,
              help="Also write the Lorenz curve points to this CSV file.")
@click.option("--phi-csv", type=click.Path(dir_okay=False), default=None,
              help="Also write per-validator Shapley values to this CSV file.")
def analyze(input_path, fmt, scheme, exponent, lsw_no_offset, shapley, samples, seed,
            literal_thresholds, lorenz_csv, phi_csv) -> None:
    """Compute the decentralization metrics of one snapshot."""
    if phi_csv is not None and shapley == "off":
        raise click.UsageError("--phi-csv requires --shapley sampled or exact")
    weight_scheme = _build_scheme(scheme, exponent, lsw_no_offset)
    seed = _default_seed() if seed is None else seed
    snapshot = _parse_or_fail(input_path)
    try:
        rep = full_report(
            snapshot,
            weight_scheme,
            shapley=shapley,
            samples=samples,
            seed=seed,
            literal_thresholds=literal_thresholds,
        )
        wv = compute_weights(snapshot, weight_scheme)
        if lorenz_csv is not None:
            write_lorenz_csv(wv, lorenz_csv)
        if phi_csv is not None:
            _write_phi_csv(wv, snapshot, shapley, samples, seed, literal_thresholds, phi_csv)
    except DestakeError as exc:
        raise click.ClickException(str(exc))
    if fmt == "json":
        click.echo(reporting.to_json(rep.to_dict()))
    elif fmt == "csv":
        click.echo(reporting.metrics_to_csv(rep), nl=False)
    else:
        click.echo(reporting.metrics_to_table(rep))


def _write_phi_csv(wv, snapshot, mode, samples, seed, literal, path) -> None:
    games = {
        "liveness": coalition.VotingGame.liveness(wv, literal=literal),
        "safety": coalition.VotingGame.safety(wv, literal=literal),
    }
    phis = {}
    for name, game in games.items():
        if mode == "exact":
            phis[name] = coalition.shapley_exact(game).values
        else:
            phis[name] = coalition.shapley_sampled(game, samples=samples, seed=seed).values
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "weight", "phi_liveness", "phi_safety"])
        for k, rec in enumerate(snapshot.validators):
            writer.writerow(
                [
                    rec.id,
                    repr(float(wv.weights[k])),
                    repr(float(phis["liveness"][k])),
                    repr(float(phis["safety"][k])),
                ]
            )


@main.command()
@click.option("--input", "input_paths", required=True, multiple=True,
              help="Snapshot file; repeat for multiple chains.")
@click.option("--format", "fmt", type=_FORMATS, default="table", show_default=True)
@click.option("--lsw-no-offset", is_flag=True, help="Use log(s) instead of log(1+s) for lsw.")
@click.option("--shapley", type=_SHAPLEY_MODES, default="sampled", show_default=True)
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=None, help="Sampling seed (default: DESTAKE_SEED or 0).")
@click.option("--literal-thresholds", is_flag=True)
def compare(input_paths, fmt, lsw_no_offset, shapley, samples, seed, literal_thresholds) -> None:
    """Compare linear, srsw and lsw weighting on one or more snapshots."""
    seed = _default_seed() if seed is None else seed

    def one(path: str):
        snapshot = _parse_or_fail(path)
        try:
            return reporting.compare_snapshot(
                snapshot,
                shapley=shapley,
                samples=samples,
                seed=seed,
                lsw_offset=not lsw_no_offset,
                literal_thresholds=literal_thresholds,
            )
        except DestakeError as exc:
            raise click.ClickException(f"{path}: {exc}")

    with ThreadPoolExecutor(max_workers=_jobs(len(input_paths))) as pool:
        rows = list(pool.map(one, input_paths))
    meta = None
    if shapley != "off":
        meta = {"method": shapley, "samples": samples if shapley == "sampled" else None,
                "seed": seed if shapley == "sampled" else None}
    full = reporting.build_comparison(rows, with_shapley=shapley != "off", shapley_meta=meta)
    if fmt == "json":
        click.echo(reporting.to_json(reporting.comparison_to_dict(full)))
    elif fmt == "csv":
        click.echo(reporting.comparison_to_csv(full), nl=False)
    else:
        click.echo(reporting.comparison_to_table(full))


@main.command()
@click.option("--input", "input_path", required=True, help="Snapshot file (.json or .csv).")
@click.option("--epochs", type=int, default=100, show_default=True)
@click.option("--inflation", type=float, default=0.045, show_default=True,
              help="Annual inflation rate, e.g. 0.045 or 0.091.")
@click.option("--epochs-per-year", type=int, default=365, show_default=True)
@click.option("--rounds", type=int, default=0, show_default=True,
              help="Block-proposer draws to tally from the initial weights.")
@click.option("--seed", type=int, default=None, help="Proposer seed (default: DESTAKE_SEED or 0).")
@click.option("--scheme", "schemes", type=_SCHEMES, multiple=True, default=("linear",),
              show_default=True, help="Weight scheme; repeat to simulate several.")
@click.option("--exponent", type=float, default=None, help="Exponent for --scheme power.")
@click.option("--lsw-no-offset", is_flag=True)
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
def simulate(input_path, epochs, inflation, epochs_per_year, rounds, seed, schemes,
             exponent, lsw_no_offset, out_dir) -> None:
    """Run the epoch compounding simulation and write trace files."""
    seed = _default_seed() if seed is None else seed
    if len(set(schemes)) != len(schemes):
        raise click.UsageError("each --scheme may be given only once")
    snapshot = _parse_or_fail(input_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    summary: dict = {
        "chain": snapshot.chain,
        "config": {
            "epochs": epochs,
            "annual_inflation": inflation,
            "epochs_per_year": epochs_per_year,
            "proposer_rounds": rounds,
            "seed": seed,
            "schemes": [],
        },
        "schemes": {},
    }
    gini_by_label: dict[str, list[float]] = {}
    try:
        for kind in schemes:
            weight_scheme = _build_scheme(kind, exponent, lsw_no_offset)
            config = SimulationConfig(
                epochs=epochs,
                annual_inflation=inflation,
                epochs_per_year=epochs_per_year,
                scheme=weight_scheme,
                proposer_rounds=rounds,
                seed=seed,
            )
            trace = run_compounding(snapshot, config)
            label = weight_scheme.label
            summary["config"]["schemes"].append(label)
            trace_name = f"trace_{label}.csv"
            write_trace_csv(trace, out / trace_name)
            entry = {
                "initial_gini": float(trace.gini_series[0]),
                "final_gini": float(trace.gini_series[-1]),
                "final_richest_median_ratio": float(trace.richest_median_ratio[-1]),
                "trace_csv": trace_name,
                "proposers_csv": None,
            }
            if rounds > 0:
                proposers_name = f"proposers_{label}.csv"
                write_proposers_csv(trace, out / proposers_name)
                entry["proposers_csv"] = proposers_name
            summary["schemes"][label] = entry
            gini_by_label[label] = [float(g) for g in trace.gini_series]
    except (DestakeError, ValueError) as exc:
        raise click.ClickException(str(exc))

    if {"linear", "srsw", "lsw"} <= set(gini_by_label):
        lin, sr, ls = (gini_by_label[k] for k in ("linear", "srsw", "lsw"))
        summary["orderings"] = {
            "per_epoch_gini_lsw_le_srsw": all(a <= b + 1e-12 for a, b in zip(ls, sr)),
            "per_epoch_gini_srsw_le_linear": all(a <= b + 1e-12 for a, b in zip(sr, lin)),
        }
    summary_path = out / "summary.json"
    summary_path.write_text(reporting.to_json(summary) + "\n", encoding="utf-8")
    click.echo(str(summary_path))


@main.command()
@click.option("--stake", type=int, required=True, help="Combined stake S in base units.")
@click.option("--parts", type=int, required=True, help="Number of identities to split into.")
@click.option("--scheme", type=_SCHEMES, default="srsw", show_default=True)
@click.option("--exponent", type=float, default=None, help="Exponent for --scheme power.")
@click.option("--lsw-no-offset", is_flag=True)
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--cost", type=float, default=0.0, show_default=True,
              help="Sybil cost per additional identity.")
@click.option("--format", "fmt", type=_FORMATS, default="table", show_default=True)
def sybil(stake, parts, scheme, exponent, lsw_no_offset, alpha, cost, fmt) -> None:
    """Analyze whether splitting a stake across identities pays off."""
    weight_scheme = _build_scheme(scheme, exponent, lsw_no_offset)
    try:
        params = RewardParams(alpha=alpha, sybil_cost=cost)
        analysis = sybil_split_analysis(stake, parts, weight_scheme, params)
    except (InvalidSplitError, ValueError) as exc:
        raise click.UsageError(str(exc))
    doc = {
        "stake": analysis.stake,
        "parts": analysis.parts,
        "scheme": weight_scheme.label,
        "alpha": alpha,
        "sybil_cost": analysis.sybil_cost,
        "single_reward": analysis.single_reward,
        "split_reward": analysis.split_reward,
        "min_deterrent_cost": analysis.min_deterrent_cost,
        "rational_to_split": analysis.rational_to_split,
        "lsw_asymptotic_cost": analysis.lsw_asymptotic_cost,
    }
    if fmt == "json":
        click.echo(reporting.to_json(doc))
    elif fmt == "csv":
        lines = ["field,value"] + [f"{k},{v}" for k, v in doc.items()]
        click.echo("\n".join(lines))
    else:
        width = max(len(k) for k in doc)
        for key, value in doc.items():
            if isinstance(value, float):
                value = f"{value:.6g}"
            click.echo(f"{key:<{width}}  {value}")


if __name__ == "__main__":
    main()
