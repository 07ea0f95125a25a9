"""Delimited result tables and the figures rendered alongside them.

Every figure has a CSV twin carrying the same numbers; figures are
rendered headlessly (Agg) straight to files.
"""

from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def write_user_eers_csv(report, path):
    """Per-user EER table for one cell."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["user_id", "eer", "threshold", "cv_score", "n_train_genuine", "n_test_genuine"]
        )
        for r in report.users:
            writer.writerow(
                [r.user_id, repr(r.eer), repr(r.threshold), repr(r.cv_score),
                 r.n_train_genuine, r.n_test_genuine]
            )


def write_det_csv(det, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "far", "frr"])
        for t, far, frr in zip(det.thresholds, det.far, det.frr):
            writer.writerow([repr(float(t)), repr(float(far)), repr(float(frr))])


def write_cell_summary_json(report, path):
    payload = {
        "cell_id": report.cell.cell_id,
        "scenario_mode": report.cell.scenario_mode,
        "cognition_code": report.cell.cognition_code,
        "classifier": report.cell.classifier,
        "window": {"length": report.cell.window.length, "overlap": report.cell.window.overlap},
        "mean_eer": report.mean_eer,
        "std_eer": report.std_eer,
        "pooled_eer": report.pooled_eer,
        "n_users": len(report.users),
        "degenerate_users": report.degenerate_users,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_run_summary_csv(reports, path):
    """One row per evaluated cell."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["cell_id", "scenario_mode", "cognition_code", "classifier",
             "length", "overlap", "mean_eer", "std_eer", "pooled_eer", "n_users"]
        )
        for report in reports:
            c = report.cell
            writer.writerow(
                [c.cell_id, c.scenario_mode, c.cognition_code, c.classifier,
                 c.window.length, c.window.overlap,
                 repr(report.mean_eer), repr(report.std_eer), repr(report.pooled_eer),
                 len(report.users)]
            )


def write_sweep_csv(heatmap, path):
    """Sweep heatmap as rows of (classifier, length, overlap, balanced_accuracy)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["classifier", "length", "overlap", "balanced_accuracy"])
        for clf in sorted(heatmap):
            for (length, overlap) in sorted(heatmap[clf]):
                writer.writerow([clf, length, overlap, repr(heatmap[clf][(length, overlap)])])


def read_sweep_csv(path):
    heatmap = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            heatmap.setdefault(row["classifier"], {})[
                (int(row["length"]), int(row["overlap"]))
            ] = float(row["balanced_accuracy"])
    return heatmap


def render_sweep_heatmap(heatmap, path):
    """One balanced-accuracy panel per classifier over the L x overlap grid."""
    classifiers = sorted(heatmap)
    fig, axes = plt.subplots(1, len(classifiers), figsize=(5 * len(classifiers), 4), squeeze=False)
    for ax, clf in zip(axes[0], classifiers):
        cells = heatmap[clf]
        lengths = sorted({L for (L, _o) in cells})
        overlaps_by_len = {L: sorted(o for (L2, o) in cells if L2 == L) for L in lengths}
        n_cols = max(len(v) for v in overlaps_by_len.values())
        grid = np.full((len(lengths), n_cols), np.nan)
        for i, L in enumerate(lengths):
            for j, o in enumerate(overlaps_by_len[L]):
                grid[i, j] = cells[(L, o)]
        im = ax.imshow(grid, aspect="auto", cmap="viridis")
        ax.set_yticks(range(len(lengths)), [str(L) for L in lengths])
        ax.set_xticks(range(n_cols), [f"{f:.0%}" for f in (0.25, 0.5, 0.75)[:n_cols]])
        ax.set_xlabel("overlap fraction")
        ax.set_ylabel("window length")
        ax.set_title(f"{clf} balanced accuracy")
        fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_det_curves(curves, path):
    """Overlayed DET curves; ``curves`` maps label -> DETCurve."""
    fig, ax = plt.subplots(figsize=(5, 5))
    for label in sorted(curves):
        det = curves[label]
        ax.plot(det.far * 100, det.frr * 100, label=label)
    ax.plot([0, 100], [0, 100], ls=":", c="gray", lw=1)
    ax.set_xlabel("FAR (%)")
    ax.set_ylabel("FRR (%)")
    ax.set_xlim(0, 50)
    ax.set_ylim(0, 50)
    ax.legend(fontsize=8)
    ax.set_title("DET")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_eer_violin(eers_by_label, path):
    """Per-user EER distribution per cell label."""
    labels = sorted(eers_by_label)
    data = [np.asarray(eers_by_label[k], dtype=float) * 100 for k in labels]
    fig, ax = plt.subplots(figsize=(max(4, 0.9 * len(labels)), 4))
    ax.violinplot(data, showmedians=True)
    ax.set_xticks(range(1, len(labels) + 1), labels, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("per-user EER (%)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_results_tree(results_dir):
    """Render figures for an existing results tree, next to its CSVs.

    Reads the delimited artifacts written by the run/sweep commands and
    drops a figure beside each: DET plot per cell, one violin of per-user
    EERs across cells, and a heatmap per sweep table.  Returns the list
    of figure paths written.
    """
    from .evaluation import DETCurve

    written = []
    cells_dir = os.path.join(results_dir, "cells")
    eers_by_label = {}
    if os.path.isdir(cells_dir):
        for cell_id in sorted(os.listdir(cells_dir)):
            cell_dir = os.path.join(cells_dir, cell_id)
            det_path = os.path.join(cell_dir, "det.csv")
            if os.path.exists(det_path):
                rows = list(csv.DictReader(open(det_path, newline="")))
                det = DETCurve(
                    thresholds=np.array([float(r["threshold"]) for r in rows]),
                    far=np.array([float(r["far"]) for r in rows]),
                    frr=np.array([float(r["frr"]) for r in rows]),
                )
                fig_path = os.path.join(cell_dir, "det.png")
                render_det_curves({cell_id: det}, fig_path)
                written.append(fig_path)
            users_path = os.path.join(cell_dir, "users.csv")
            if os.path.exists(users_path):
                rows = list(csv.DictReader(open(users_path, newline="")))
                eers_by_label[cell_id] = [float(r["eer"]) for r in rows]
    if eers_by_label:
        fig_path = os.path.join(results_dir, "eer_violin.png")
        render_eer_violin(eers_by_label, fig_path)
        written.append(fig_path)
    sweep_path = os.path.join(results_dir, "sweep.csv")
    if os.path.exists(sweep_path):
        fig_path = os.path.join(results_dir, "sweep.png")
        render_sweep_heatmap(read_sweep_csv(sweep_path), fig_path)
        written.append(fig_path)
    return written
