"""Baseline labeled datasets: synthetic generator, text loader, global stats.

The generator produces Dim-style benchmarks: k isotropic unit-variance
Gaussian blobs whose centers sit on a jittered axis-aligned grid such that
any two centers are at least one grid spacing apart on every axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .seeding import derive_rng

_GENERATOR_STREAM = 0x0D5E7

# Fraction of the grid spacing used as uniform jitter on center coordinates.
_JITTER_FRACTION = 0.1


class DatasetFormatError(ValueError):
    """Raised when a data or label file does not match the text format."""


@dataclass(frozen=True)
class LabeledDataset:
    """Point matrix with ground-truth cluster labels.

    points: (n, d) float64 matrix, one point per row.
    labels: (n,) integer cluster id per row, dense in [0, n_clusters).
    """

    points: np.ndarray
    labels: np.ndarray
    n_clusters: int
    name: str = "dataset"

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if points.ndim != 2 or points.shape[0] == 0 or points.shape[1] == 0:
            raise ValueError("points must be a non-empty 2-D matrix")
        if labels.shape != (points.shape[0],):
            raise ValueError(
                f"labels length {labels.shape} does not match {points.shape[0]} points"
            )
        if not np.all(np.isfinite(points)):
            raise ValueError("points contain non-finite entries")
        if self.n_clusters < 1:
            raise ValueError("n_clusters must be positive")
        present = np.unique(labels)
        if present.size != self.n_clusters or present[0] != 0 or present[-1] != self.n_clusters - 1:
            raise ValueError(
                f"labels must cover every id in [0, {self.n_clusters}) at least once"
            )
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def n_features(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class DatasetStats:
    """Global and per-feature first/second moments of a point matrix.

    mu/sigma pool every matrix entry; sigma is the population (divide by n)
    standard deviation throughout.
    """

    mu: float
    sigma: float
    per_feature_mu: np.ndarray = field(repr=False)
    per_feature_sigma: np.ndarray = field(repr=False)


def generate_dim_like(
    d: int,
    n_clusters: int,
    points_per_cluster: int,
    separation: float,
    seed: int,
    name: str | None = None,
) -> LabeledDataset:
    """Generate k unit-variance Gaussian blobs separated on every axis.

    Center placement: on each axis independently, the k clusters are assigned
    the k grid coordinates {0, separation, ..., (k-1)*separation} in a random
    order, so any two centers differ by at least `separation` on every axis.
    Each center coordinate is then jittered by Uniform(+-0.1*separation).
    Deterministic for fixed arguments; rows are grouped by cluster.
    """
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    if n_clusters < 1:
        raise ValueError(f"n_clusters must be positive, got {n_clusters}")
    if points_per_cluster < 1:
        raise ValueError(f"points_per_cluster must be positive, got {points_per_cluster}")
    if not separation > 0:
        raise ValueError(f"separation must be positive, got {separation}")

    rng = derive_rng(seed, _GENERATOR_STREAM)
    # One independent cluster->grid-row assignment per axis.
    grid = np.empty((n_clusters, d))
    for axis in range(d):
        grid[:, axis] = rng.permutation(n_clusters) * separation
    jitter = rng.uniform(
        -_JITTER_FRACTION * separation, _JITTER_FRACTION * separation, size=(n_clusters, d)
    )
    centers = grid + jitter

    n = n_clusters * points_per_cluster
    points = rng.standard_normal((n, d))
    labels = np.repeat(np.arange(n_clusters, dtype=np.int64), points_per_cluster)
    points += centers[labels]

    return LabeledDataset(
        points=points,
        labels=labels,
        n_clusters=n_clusters,
        name=name if name is not None else f"dim{d}",
    )


def compute_stats(data: LabeledDataset) -> DatasetStats:
    """Pooled and per-feature mean / population standard deviation."""
    points = data.points
    if points.shape[0] < 2:
        raise ValueError("at least 2 rows are required to compute stats")
    return DatasetStats(
        mu=float(points.mean()),
        sigma=float(points.std()),
        per_feature_mu=points.mean(axis=0),
        per_feature_sigma=points.std(axis=0),
    )


def load_dataset(data_path: str | Path, labels_path: str | Path, name: str | None = None) -> LabeledDataset:
    """Read the plain-text point/label file pair.

    Data file: one point per line, features split on ASCII whitespace.
    Label file: one base-10 integer per line. Labels are remapped to a dense
    [0, k) range in order of first appearance.
    """
    data_path = Path(data_path)
    labels_path = Path(labels_path)

    rows = _parse_data_lines(data_path)
    raw_labels = _parse_label_lines(labels_path)
    if len(raw_labels) != len(rows):
        raise DatasetFormatError(
            f"{labels_path}: {len(raw_labels)} labels for {len(rows)} data lines in {data_path}"
        )

    remap: dict[int, int] = {}
    labels = np.empty(len(raw_labels), dtype=np.int64)
    for i, raw in enumerate(raw_labels):
        labels[i] = remap.setdefault(raw, len(remap))

    return LabeledDataset(
        points=np.array(rows, dtype=np.float64),
        labels=labels,
        n_clusters=len(remap),
        name=name if name is not None else data_path.stem,
    )


def save_dataset(data: LabeledDataset, data_path: str | Path, labels_path: str | Path) -> None:
    """Write the loader's text format; floats round-trip binary64 exactly."""
    data_lines = [" ".join(repr(v) for v in row) for row in data.points.tolist()]
    Path(data_path).write_text("\n".join(data_lines) + "\n", encoding="utf-8")
    label_lines = [str(v) for v in data.labels.tolist()]
    Path(labels_path).write_text("\n".join(label_lines) + "\n", encoding="utf-8")


def _strip_trailing_blanks(lines: list[str]) -> list[str]:
    end = len(lines)
    while end > 0 and not lines[end - 1].strip():
        end -= 1
    return lines[:end]


def _parse_data_lines(path: Path) -> list[list[float]]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetFormatError(f"{path}: cannot read data file: {exc}") from exc
    lines = _strip_trailing_blanks(text.splitlines())
    if not lines:
        raise DatasetFormatError(f"{path}: data file is empty")

    rows: list[list[float]] = []
    width = None
    for lineno, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens:
            raise DatasetFormatError(f"{path}: line {lineno}: blank line inside data")
        try:
            row = [float(tok) for tok in tokens]
        except ValueError:
            bad = next(tok for tok in tokens if not _is_number(tok))
            raise DatasetFormatError(
                f"{path}: line {lineno}: invalid numeric token {bad!r}"
            ) from None
        if not all(np.isfinite(row)):
            raise DatasetFormatError(f"{path}: line {lineno}: non-finite value")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DatasetFormatError(
                f"{path}: line {lineno}: expected {width} values, found {len(row)}"
            )
        rows.append(row)
    return rows


def _parse_label_lines(path: Path) -> list[int]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetFormatError(f"{path}: cannot read labels file: {exc}") from exc
    lines = _strip_trailing_blanks(text.splitlines())
    if not lines:
        raise DatasetFormatError(f"{path}: labels file is empty")

    labels = []
    for lineno, line in enumerate(lines, start=1):
        token = line.strip()
        try:
            labels.append(int(token, 10))
        except ValueError:
            raise DatasetFormatError(
                f"{path}: line {lineno}: invalid integer label {token!r}"
            ) from None
    return labels


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False
