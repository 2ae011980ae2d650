"""Designer-facing summaries of behaviour archives.

Projections reduce the 5D archive onto every unordered pair of metric
dimensions (10 heatmaps per experiment) keeping the best win rate per
projected cell, so peaks are comparable across plots. Coverage and
convergence curves track the search over iterations, and two archives
over the same behaviour space can be compared cell-by-cell.

Every analysis is also written as a plain CSV so plotting stays a pure
consumer of these files.
"""

from __future__ import annotations

import csv
import math
import shutil
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .experiment import ExperimentRecord
from .qd import Archive, HistoryEntry

REDUCERS = ("max", "mean", "count")

# Comparison grid codes.
NEITHER, ONLY_A, ONLY_B, BOTH = 0, 1, 2, 3


class IncompatibleSpacesError(ValueError):
    pass


@dataclass
class Heatmap2D:
    dim_x: int
    dim_y: int
    grid: np.ndarray  # float64, NaN where no elite projects

    @property
    def filled(self) -> int:
        return int(np.sum(~np.isnan(self.grid)))


@dataclass
class ComparisonGrid:
    dim_x: int
    dim_y: int
    grid: np.ndarray  # int codes for coverage, float NaN deltas for delta


def metric_pairs(dims: int) -> list[tuple[int, int]]:
    return list(combinations(range(dims), 2))


def project_2d(archive: Archive, dim_x: int, dim_y: int, reducer: str = "max") -> Heatmap2D:
    """Project the archive onto the (dim_x, dim_y) plane. The default
    reducer keeps the best fitness across the collapsed dimensions."""
    if dim_x == dim_y:
        raise ValueError("projection needs two distinct dimensions")
    if reducer not in REDUCERS:
        raise ValueError(f"unknown reducer {reducer!r}; options: {REDUCERS}")
    bx = archive.space.metrics[dim_x].buckets
    by = archive.space.metrics[dim_y].buckets
    grid = np.full((bx, by), np.nan)
    count = np.zeros((bx, by))
    total = np.zeros((bx, by))
    for cell, elite in archive.cells.items():
        x, y = cell[dim_x], cell[dim_y]
        count[x, y] += 1
        total[x, y] += elite.fitness
        if math.isnan(grid[x, y]) or elite.fitness > grid[x, y]:
            grid[x, y] = elite.fitness
    if reducer == "count":
        grid = np.where(count > 0, count, np.nan)
    elif reducer == "mean":
        with np.errstate(invalid="ignore"):
            grid = np.where(count > 0, total / np.maximum(count, 1), np.nan)
    return Heatmap2D(dim_x, dim_y, grid)


def coverage_curve(history: list[HistoryEntry]) -> list[tuple[int, int]]:
    """Filled-cell count after each evaluation; non-decreasing steps."""
    _check_sorted(history)
    seen: set = set()
    series = []
    for entry in history:
        seen.add(entry.cell)
        series.append((entry.elite.iteration, len(seen)))
    return series


def convergence_curve(history: list[HistoryEntry]) -> list[tuple[int, float]]:
    """Sum of per-cell best fitness after each evaluation: a monotone
    bounded series starting from an empty archive."""
    _check_sorted(history)
    best: dict = {}
    total = 0.0
    series = []
    for entry in history:
        fitness = entry.elite.fitness
        cur = best.get(entry.cell)
        if cur is None:
            best[entry.cell] = fitness
            total += fitness
        elif fitness > cur:
            total += fitness - cur
            best[entry.cell] = fitness
        series.append((entry.elite.iteration, total))
    return series


def _check_sorted(history: list[HistoryEntry]) -> None:
    for prev, cur in zip(history, history[1:]):
        if cur.elite.iteration < prev.elite.iteration:
            raise ValueError("history must be iteration-sorted")


def performance_histogram(archive: Archive, bins: int = 10) -> list[int]:
    """Counts of elites per fitness bin over [0, 1]; 1.0 lands in the
    last bin."""
    counts = [0] * bins
    for elite in archive.cells.values():
        counts[min(int(elite.fitness * bins), bins - 1)] += 1
    return counts


def _check_compatible(a: Archive, b: Archive) -> None:
    if not a.space.compatible_with(b.space):
        raise IncompatibleSpacesError("behaviour spaces differ; archives not comparable")


def compare_coverage(a: Archive, b: Archive, dim_x: int, dim_y: int) -> ComparisonGrid:
    _check_compatible(a, b)
    ha = project_2d(a, dim_x, dim_y).grid
    hb = project_2d(b, dim_x, dim_y).grid
    in_a = ~np.isnan(ha)
    in_b = ~np.isnan(hb)
    grid = np.full(ha.shape, NEITHER, dtype=np.int32)
    grid[in_a & ~in_b] = ONLY_A
    grid[~in_a & in_b] = ONLY_B
    grid[in_a & in_b] = BOTH
    return ComparisonGrid(dim_x, dim_y, grid)


def compare_delta(a: Archive, b: Archive, dim_x: int, dim_y: int) -> ComparisonGrid:
    """heat_B - heat_A where both cover the projected cell, NaN elsewhere."""
    _check_compatible(a, b)
    ha = project_2d(a, dim_x, dim_y).grid
    hb = project_2d(b, dim_x, dim_y).grid
    grid = np.where(~np.isnan(ha) & ~np.isnan(hb), hb - ha, np.nan)
    return ComparisonGrid(dim_x, dim_y, grid)


# ---------------------------------------------------------- CSV export


def _write_matrix(path: Path, grid: np.ndarray, integer: bool = False) -> None:
    """Row i = first dimension index; blank cells encode NaN."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in grid:
            out = []
            for v in row:
                if isinstance(v, float) and math.isnan(v):
                    out.append("")
                elif integer:
                    out.append(int(v))
                else:
                    out.append(float(v))
            writer.writerow(out)


def read_matrix(path: Path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            rows.append([math.nan if v == "" else float(v) for v in row])
    return np.array(rows) if rows else np.zeros((0, 0))


def heatmap_filename(names, dim_x: int, dim_y: int) -> str:
    return f"heatmap_{names[dim_x]}_vs_{names[dim_y]}.csv"


def analyze_experiment(record: ExperimentRecord, out_dir: str | Path) -> list[Path]:
    """Write the full single-experiment analysis CSV set into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    archive = record.archive
    names = [m.name for m in archive.space.metrics]
    written = []

    for dx, dy in metric_pairs(archive.space.dims):
        path = out_dir / heatmap_filename(names, dx, dy)
        _write_matrix(path, project_2d(archive, dx, dy).grid)
        written.append(path)

    path = out_dir / "coverage.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "filled_cells"])
        writer.writerows(coverage_curve(archive.history))
    written.append(path)

    path = out_dir / "convergence.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "total_fitness"])
        writer.writerows(convergence_curve(archive.history))
    written.append(path)

    path = out_dir / "histogram.csv"
    counts = performance_histogram(archive)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_lo", "bin_hi", "count"])
        for i, count in enumerate(counts):
            writer.writerow([i / len(counts), (i + 1) / len(counts), count])
    written.append(path)

    # The binned history travels with the analysis so the plotting layer
    # can render search-progress animations from one directory.
    src = Path(record.config.output_dir) / "spaceHistory_binned.csv"
    if src.exists():
        shutil.copyfile(src, out_dir / "spaceHistory_binned.csv")
        written.append(out_dir / "spaceHistory_binned.csv")
    return written


def compare_experiments(
    record_a: ExperimentRecord, record_b: ExperimentRecord, out_dir: str | Path
) -> list[Path]:
    """Write coverage and delta comparison CSVs for all metric pairs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    a, b = record_a.archive, record_b.archive
    _check_compatible(a, b)
    names = [m.name for m in a.space.metrics]
    written = []
    for dx, dy in metric_pairs(a.space.dims):
        path = out_dir / f"compare_coverage_{names[dx]}_vs_{names[dy]}.csv"
        _write_matrix(path, compare_coverage(a, b, dx, dy).grid, integer=True)
        written.append(path)
        path = out_dir / f"compare_delta_{names[dx]}_vs_{names[dy]}.csv"
        _write_matrix(path, compare_delta(a, b, dx, dy).grid)
        written.append(path)
    return written
