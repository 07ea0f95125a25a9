"""Command-line entry points tying the pipeline together.

Commands: synth (generate a synthetic store), ingest (validate raw logs
into a store), sweep (window-config search), run (evaluation grid),
report (render figures beside the delimited results), enroll (train and
save a verifier bundle), serve (HTTP scoring with a frozen bundle).
"""

from __future__ import annotations

import hashlib
import importlib.metadata
import json
import logging
import os
import time

import click
import yaml

from .bundle import enroll as enroll_user
from .bundle import load_bundle, save_bundle
from .experiments import (
    CLASSIFIERS,
    COGNITION_CODES,
    SCENARIO_MODES,
    CognitionMap,
    ConfigCell,
    RunSettings,
    best_sweep_cell,
    run_cell,
    run_sweep,
)
from .models.gridsearch import DEFAULT_GRIDS, GridSpec
from .reports import (
    render_results_tree,
    write_cell_summary_json,
    write_det_csv,
    write_run_summary_csv,
    write_sweep_csv,
    write_user_eers_csv,
)
from .store import ingest_files, load_store, save_store
from .synthgen import generate, make_profiles
from .windowing import WindowConfig

log = logging.getLogger(__name__)

CONFIG_ENV_VAR = "KDAUTH_CONFIG"

DEFAULT_CONFIG = {
    "seed": 0,
    "window": {"length": 200, "overlap": 150},
    "select_k": 50,
    "cv_folds": 5,
    "classifiers": list(CLASSIFIERS),
    "scenario_modes": list(SCENARIO_MODES),
    "cognition_codes": list(COGNITION_CODES),
    "grids": {k: {p: list(v) for p, v in g.items()} for k, g in DEFAULT_GRIDS.items()},
    "kit_max_ms": 5000.0,
    "shuffle_labels": False,
    "cognition_map": {q: ("low" if q <= 3 else "high") for q in range(1, 7)},
    "sweep": {"lengths": None, "fractions": None},
}


def load_config(path=None):
    """Defaults, overlaid with the YAML file (flag, else $KDAUTH_CONFIG)."""
    config = json.loads(json.dumps(DEFAULT_CONFIG))  # deep copy
    path = path or os.environ.get(CONFIG_ENV_VAR)
    if path:
        with open(path) as fh:
            loaded = yaml.safe_load(fh) or {}
        for key, value in loaded.items():
            if key not in DEFAULT_CONFIG:
                raise click.ClickException(f"unknown config key {key!r}")
            if isinstance(DEFAULT_CONFIG[key], dict) and isinstance(value, dict) and key != "grids":
                config[key].update(value)
            else:
                config[key] = value
    return config


def config_hash(config):
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()


def _settings_from_config(config):
    return RunSettings(
        grid=GridSpec(grids=config["grids"], cv_folds=config["cv_folds"], seed=config["seed"]),
        select_k=config["select_k"],
        kit_max_ms=config["kit_max_ms"],
        cognition_map=CognitionMap.from_dict(config["cognition_map"]),
        shuffle_labels=config["shuffle_labels"],
    )


def _window_from_config(config):
    return WindowConfig(length=config["window"]["length"], overlap=config["window"]["overlap"])


def write_manifest(out_dir, config, outputs, elapsed_s):
    manifest = {
        "config_hash": config_hash(config),
        "seed": config["seed"],
        "version": importlib.metadata.version("kdauth"),
        "outputs": sorted(outputs),
        "elapsed_s": round(elapsed_s, 3),
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose):
    """Keystroke-dynamics active-authentication toolkit."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--users", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--keys-per-question", default=300, show_default=True)
@click.option("--base-spread", default=0.15, show_default=True,
              help="Between-user timing spread (log scale).")
@click.option("--revisit-prob", default=0.1, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def synth(users, seed, keys_per_question, base_spread, revisit_prob, out_dir):
    """Generate a synthetic multi-user event store."""
    profiles = make_profiles(users, seed=seed, base_spread=base_spread,
                             revisit_probability=revisit_prob)
    streams = generate(profiles, keystrokes_per_question=keys_per_question)
    save_store(streams, out_dir)
    click.echo(f"wrote {len(streams)} user/phase logs to {out_dir}")


@main.command()
@click.argument("paths", nargs=-1, required=False, type=click.Path(exists=True))
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "jsonl"]),
              show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def ingest(paths, fmt, out_dir):
    """Validate raw keystroke logs and persist a canonical store."""
    expanded = []
    for path in paths:
        if os.path.isdir(path):
            expanded.extend(
                os.path.join(path, n) for n in sorted(os.listdir(path))
                if n.endswith(f".{fmt}") or n.endswith(".csv")
            )
        else:
            expanded.append(path)
    n_events, errors = ingest_files(expanded, out_dir, format=fmt)
    click.echo(f"ingested {n_events} events from {len(expanded)} files into {out_dir}")
    for path, message in errors:
        click.echo(f"ERROR {path}: {message}", err=True)
    if errors:
        raise SystemExit(1)


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--classifiers", default=None, help="Comma-separated subset, e.g. 'svm,gbt'.")
def sweep(store_dir, out_dir, config_path, classifiers):
    """Search window length/overlap configurations on phase-1 data."""
    config = load_config(config_path)
    logs, _ = load_store(store_dir)
    clfs = tuple(classifiers.split(",")) if classifiers else tuple(config["classifiers"])
    sweep_cfg = config["sweep"]
    heatmap = run_sweep(
        logs, classifiers=clfs, seed=config["seed"], settings=_settings_from_config(config),
        lengths=sweep_cfg.get("lengths"), fractions=sweep_cfg.get("fractions"),
    )
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "sweep.csv")
    write_sweep_csv(heatmap, path)
    best = best_sweep_cell(heatmap)
    click.echo(f"wrote {path}; best (length, overlap) = {best}")


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--cells", default=None,
              help="Comma-separated cell ids to run (default: the full grid).")
def run(store_dir, out_dir, config_path, cells):
    """Evaluate the scenario x cognition x classifier grid; write a results tree."""
    config = load_config(config_path)
    logs, _ = load_store(store_dir)
    settings = _settings_from_config(config)
    window = _window_from_config(config)
    grid = [
        ConfigCell(mode, code, clf, window)
        for mode in config["scenario_modes"]
        for code in config["cognition_codes"]
        for clf in config["classifiers"]
    ]
    if cells:
        wanted = set(cells.split(","))
        grid = [c for c in grid if c.cell_id in wanted]
        missing = wanted - {c.cell_id for c in grid}
        if missing:
            raise click.ClickException(f"unknown cell ids: {sorted(missing)}")

    started = time.monotonic()
    os.makedirs(os.path.join(out_dir, "cells"), exist_ok=True)
    reports, outputs, failures = [], [], []
    for cell in grid:
        try:
            report = run_cell(logs, cell, seed=config["seed"], settings=settings)
        except Exception as exc:
            log.warning("cell %s failed: %s", cell.cell_id, exc)
            failures.append((cell.cell_id, str(exc)))
            continue
        cell_dir = os.path.join(out_dir, "cells", cell.cell_id)
        os.makedirs(cell_dir, exist_ok=True)
        write_user_eers_csv(report, os.path.join(cell_dir, "users.csv"))
        write_det_csv(report.pooled_det, os.path.join(cell_dir, "det.csv"))
        write_cell_summary_json(report, os.path.join(cell_dir, "summary.json"))
        outputs.append(cell_dir)
        reports.append(report)
        click.echo(
            f"{cell.cell_id}: mean EER {report.mean_eer:.4f} "
            f"(pooled {report.pooled_eer:.4f}, {len(report.users)} users)"
        )
    summary_path = os.path.join(out_dir, "summary.csv")
    write_run_summary_csv(reports, summary_path)
    outputs.append(summary_path)
    write_manifest(out_dir, config, outputs, time.monotonic() - started)
    for cell_id, message in failures:
        click.echo(f"FAILED {cell_id}: {message}", err=True)
    click.echo(f"{len(reports)}/{len(grid)} cells completed -> {out_dir}")


@main.command()
@click.option("--results", "results_dir", required=True, type=click.Path(exists=True))
def report(results_dir):
    """Render figures beside the delimited artifacts of a results tree."""
    written = render_results_tree(results_dir)
    for path in written:
        click.echo(f"rendered {path}")
    if not written:
        click.echo("no renderable artifacts found", err=True)


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--user", "user_id", required=True)
@click.option("--classifier", default="svm", type=click.Choice(list(CLASSIFIERS)),
              show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def enroll(store_dir, user_id, classifier, config_path, out_path):
    """Train a deployable verifier bundle for one user."""
    config = load_config(config_path)
    logs, _ = load_store(store_dir)
    bundle = enroll_user(
        logs, user_id, classifier,
        window=_window_from_config(config),
        grid=GridSpec(grids=config["grids"], cv_folds=config["cv_folds"], seed=config["seed"]),
        select_k=config["select_k"],
        kit_max_ms=config["kit_max_ms"],
        cognition_map=CognitionMap.from_dict(config["cognition_map"]).as_dict(),
        seed=config["seed"],
    )
    save_bundle(bundle, out_path)
    click.echo(
        f"enrolled {user_id} ({classifier}); threshold {bundle.threshold:.6f} -> {out_path}"
    )


@main.command()
@click.option("--bundle", "bundle_path", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(bundle_path, host, port):
    """Serve scoring endpoints for a frozen verifier bundle."""
    import uvicorn

    from .service import create_app

    app = create_app(load_bundle(bundle_path))
    click.echo(f"serving {bundle_path} on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
