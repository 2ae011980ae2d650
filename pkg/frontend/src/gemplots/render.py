"""Rendering of analysis CSVs into the figure set.

Input layouts (produced by the `gemelites analyze` / `compare` commands):

  single experiment    <dir>/heatmap_*.csv, coverage.csv, convergence.csv,
                       histogram.csv [, spaceHistory_binned.csv]
  analysis root        <dir>/<space>/... one subdirectory per experiment
  comparison           <dir>/compare_coverage_*.csv, compare_delta_*.csv

Win-rate colour scales are fixed to [0, 1] so figures are comparable
across experiments. File metadata is stripped for byte-stable reruns.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib import animation  # noqa: E402

HEAT_CMAP = "viridis"
PDF_METADATA = {"CreationDate": None, "Producer": None, "Creator": None}

SUMMARY_FILES = (
    "all_space_exploration.pdf",
    "all_information_quality.pdf",
    "all_performance_distribution.pdf",
)


class PlotInputError(ValueError):
    pass


# ------------------------------------------------------------- reading


def read_matrix(path: Path) -> np.ndarray:
    """CSV matrix with empty cells meaning "no data"."""
    rows = []
    try:
        with open(path, newline="") as fh:
            for line in csv.reader(fh):
                rows.append([math.nan if v == "" else float(v) for v in line])
    except (OSError, ValueError) as exc:
        raise PlotInputError(f"{path}: {exc}") from exc
    if not rows:
        return np.zeros((0, 0))
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise PlotInputError(f"{path}: ragged matrix")
    return np.array(rows)


def read_series(path: Path, columns: int) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or len(header) != columns:
                raise PlotInputError(f"{path}: expected {columns} columns")
            data = [[float(v) for v in row] for row in reader if row]
    except (OSError, ValueError) as exc:
        raise PlotInputError(f"{path}: {exc}") from exc
    return np.array(data).reshape(-1, columns)


def _heatmap_title(path: Path) -> tuple[str, str]:
    stem = path.stem
    for prefix in ("heatmap_", "compare_coverage_", "compare_delta_"):
        if stem.startswith(prefix):
            stem = stem[len(prefix):]
            break
    x, _, y = stem.partition("_vs_")
    return x, y


# ------------------------------------------------------------ figures


def _save(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".pdf":
        fig.savefig(path, metadata=PDF_METADATA)
    else:
        fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def _render_heatmap(csv_path: Path, out_path: Path, vmin=0.0, vmax=1.0,
                    cmap=HEAT_CMAP, label="win rate") -> None:
    grid = read_matrix(csv_path)
    x_name, y_name = _heatmap_title(csv_path)
    fig, ax = plt.subplots(figsize=(4.6, 4.0), dpi=110)
    if grid.size:
        # rows are the x dimension; show x along the horizontal axis
        image = ax.imshow(grid.T, origin="lower", aspect="auto",
                          vmin=vmin, vmax=vmax, cmap=cmap)
        fig.colorbar(image, ax=ax, label=label)
    ax.set_xlabel(x_name)
    ax.set_ylabel(y_name)
    ax.set_title(f"{x_name} vs {y_name}")
    fig.tight_layout()
    _save(fig, out_path)


def _experiment_dirs(in_dir: Path) -> list[Path]:
    if (in_dir / "coverage.csv").exists():
        return [in_dir]
    subs = sorted(d for d in in_dir.iterdir() if d.is_dir() and (d / "coverage.csv").exists())
    return subs


def render_experiment(in_dir: str | Path, out_dir: str | Path, animate: bool = False) -> list[Path]:
    """Render heatmaps per experiment plus the three aggregate pages."""
    in_dir = Path(in_dir)
    out_dir = Path(out_dir)
    experiments = _experiment_dirs(in_dir)
    if not experiments:
        raise PlotInputError(f"{in_dir}: no analysis CSVs found (coverage.csv missing)")
    written = []

    for exp in experiments:
        label = exp.name if exp != in_dir else in_dir.name
        plot_dir = (out_dir / label if exp != in_dir else out_dir) / "plots"
        heatmaps = sorted(exp.glob("heatmap_*.csv"))
        if len(heatmaps) != 10:
            raise PlotInputError(f"{exp}: expected 10 heatmap CSVs, found {len(heatmaps)}")
        for csv_path in heatmaps:
            target = plot_dir / (csv_path.stem + ".png")
            _render_heatmap(csv_path, target)
            written.append(target)
        if animate:
            target = plot_dir.parent / "search_progress.gif"
            render_search_progress(exp / "spaceHistory_binned.csv", target)
            written.append(target)

    # Aggregate pages overlay every experiment found.
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=110)
    plotted = False
    for exp in experiments:
        series = read_series(exp / "coverage.csv", 2)
        if series.size:
            ax.step(series[:, 0], series[:, 1], where="post", label=exp.name)
            plotted = True
    ax.set_xlabel("iteration")
    ax.set_ylabel("behaviours found")
    ax.set_title("behaviour-space exploration")
    if plotted:
        ax.legend()
    fig.tight_layout()
    path = out_dir / "all_space_exploration.pdf"
    _save(fig, path)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=110)
    plotted = False
    for exp in experiments:
        series = read_series(exp / "convergence.csv", 2)
        if series.size:
            ax.plot(series[:, 0], series[:, 1], label=exp.name)
            plotted = True
    ax.set_xlabel("iteration")
    ax.set_ylabel("sum of best win rates")
    ax.set_title("archive quality convergence")
    if plotted:
        ax.legend()
    fig.tight_layout()
    path = out_dir / "all_information_quality.pdf"
    _save(fig, path)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=110)
    n = len(experiments)
    plotted = False
    for j, exp in enumerate(experiments):
        series = read_series(exp / "histogram.csv", 3)
        if not series.size:
            continue
        width = (series[0, 1] - series[0, 0]) / max(n, 1)
        ax.bar(series[:, 0] + j * width, series[:, 2], width=width,
               align="edge", label=exp.name)
        plotted = True
    ax.set_xlabel("win rate")
    ax.set_ylabel("behaviours")
    ax.set_title("performance distribution")
    if plotted:
        ax.legend()
    fig.tight_layout()
    path = out_dir / "all_performance_distribution.pdf"
    _save(fig, path)
    written.append(path)
    return written


def render_comparison(in_dir: str | Path, out_dir: str | Path) -> list[Path]:
    """Coverage and performance-variation figure sets for all pairs."""
    in_dir = Path(in_dir)
    out_dir = Path(out_dir)
    coverage_csvs = sorted(in_dir.glob("compare_coverage_*.csv"))
    delta_csvs = sorted(in_dir.glob("compare_delta_*.csv"))
    if len(coverage_csvs) != 10 or len(delta_csvs) != 10:
        raise PlotInputError(
            f"{in_dir}: expected 10 coverage and 10 delta CSVs, "
            f"found {len(coverage_csvs)}/{len(delta_csvs)}"
        )
    written = []
    for csv_path in coverage_csvs:
        target = out_dir / "coverage" / (csv_path.stem + ".png")
        # categorical grid: 0 neither, 1 only A, 2 only B, 3 both
        _render_heatmap(csv_path, target, vmin=0, vmax=3, cmap="Accent", label="coverage")
        written.append(target)
    for csv_path in delta_csvs:
        target = out_dir / "variation" / (csv_path.stem + ".png")
        _render_heatmap(csv_path, target, vmin=-1.0, vmax=1.0, cmap="coolwarm",
                        label="win-rate delta (B - A)")
        written.append(target)
    return written


# ----------------------------------------------------------- animation


def _read_binned_history(path: Path) -> list[tuple[int, tuple[int, int]]]:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise PlotInputError(f"{path}: empty history")
            t_idx = header.index("time")
            x_idx = header.index("Behave_D0")
            y_idx = header.index("Behave_D1")
            rows = [
                (int(float(r[t_idx])), (int(r[x_idx]), int(r[y_idx])))
                for r in reader
                if r
            ]
    except (OSError, ValueError) as exc:
        raise PlotInputError(f"{path}: {exc}") from exc
    return rows


def render_search_progress(history_csv: str | Path, out_path: str | Path,
                           buckets: int = 62, max_frames: int = 40) -> Path:
    """Animate cumulative coverage of the first metric pair over time."""
    history_csv = Path(history_csv)
    out_path = Path(out_path)
    rows = _read_binned_history(history_csv)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    total = max((t for t, _ in rows), default=0) + 1
    frame_count = min(max_frames, max(total, 1))
    cuts = [int((i + 1) * total / frame_count) for i in range(frame_count)]

    fig, ax = plt.subplots(figsize=(4.6, 4.0), dpi=90)
    image = ax.imshow(np.zeros((buckets, buckets)), origin="lower",
                      vmin=0, vmax=1, cmap="Blues", aspect="auto")
    ax.set_xlabel("Behave_D0")
    ax.set_ylabel("Behave_D1")

    def frame(i):
        grid = np.zeros((buckets, buckets))
        for t, (x, y) in rows:
            if t < cuts[i] and 0 <= x < buckets and 0 <= y < buckets:
                grid[y, x] = 1.0
        image.set_data(grid)
        ax.set_title(f"t = {cuts[i]}")
        return (image,)

    anim = animation.FuncAnimation(fig, frame, frames=frame_count, blit=False)
    anim.save(out_path, writer=animation.PillowWriter(fps=8))
    plt.close(fig)
    return out_path
