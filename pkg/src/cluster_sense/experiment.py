"""Noise-ratio sweep: append, scale, cluster repeatedly, aggregate statistics.

Every cell of a sweep (one dataset, noise kind, scaling and augmentation
level) is reproducible in isolation: its k-means seeds are derived from
(master_seed, dataset index, noise code, scaling code, level, repeat index)
and its noise columns from a per-(dataset, noise) sequence seed, so results
are independent of scheduling and of which other cells run.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from . import __version__
from .dataset import LabeledDataset, compute_stats, generate_dim_like, load_dataset
from .distance import pairwise_distances
from .kmeans import KMeansConfig, fit
from .metrics import METRIC_NAMES, evaluate_clustering
from .perturb import InvalidNoiseRange, NoiseKind, NoiseSpec, append_noise
from .scale import ScalingKind, apply_scaling
from .seeding import derive_seed

WORKERS_ENV_VAR = "CLUSTER_SENSE_THREADS"

_NOISE_SEQUENCE_STREAM = 0x0153

# Stands in for the noise-kind code in level-0 seed derivation: no noise is
# drawn at the baseline, so the kind must not influence the results there.
_BASELINE_KIND_CODE = 0x0B5E


@dataclass(frozen=True)
class GeneratorSource:
    """Synthetic Dim-style dataset described inline in the sweep config."""

    name: str
    dims: int
    clusters: int = 16
    per_cluster: int = 64
    separation: float = 10.0
    seed: int = 0

    def load(self) -> LabeledDataset:
        return generate_dim_like(
            self.dims, self.clusters, self.per_cluster, self.separation, self.seed, name=self.name
        )


@dataclass(frozen=True)
class FileSource:
    """Dataset read from a data/labels text file pair."""

    name: str
    data_path: str
    labels_path: str

    def load(self) -> LabeledDataset:
        return load_dataset(self.data_path, self.labels_path, name=self.name)


DatasetSource = Union[GeneratorSource, FileSource]


@dataclass(frozen=True)
class SweepConfig:
    """Full description of one sweep run."""

    datasets: tuple[DatasetSource, ...]
    noise_kinds: tuple[NoiseKind, ...] = (NoiseKind.GAUSSIAN, NoiseKind.UNIFORM)
    scalings: tuple[ScalingKind, ...] = (
        ScalingKind.NONE,
        ScalingKind.CENTERED,
        ScalingKind.STANDARDIZED,
    )
    max_ratio: Fraction = Fraction(3)
    ratio_step: int = 1
    repeats: int = 50
    master_seed: int = 0
    redraw_noise_per_repeat: bool = False
    noise_stats_mode: str = "pooled"
    retain_raw: bool = False
    workers: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "datasets", tuple(self.datasets))
        object.__setattr__(self, "noise_kinds", tuple(self.noise_kinds))
        object.__setattr__(self, "scalings", tuple(self.scalings))
        object.__setattr__(self, "max_ratio", Fraction(self.max_ratio))
        if not self.datasets:
            raise ValueError("at least one dataset source is required")
        if not self.noise_kinds:
            raise ValueError("at least one noise kind is required")
        if not self.scalings:
            raise ValueError("at least one scaling is required")
        if self.max_ratio <= 0:
            raise ValueError(f"max_ratio must be positive, got {self.max_ratio}")
        if self.ratio_step < 1:
            raise ValueError(f"ratio_step must be >= 1, got {self.ratio_step}")
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")


@dataclass(frozen=True)
class SweepCell:
    """Aggregated statistics of one metric in one sweep cell."""

    dataset: str
    noise: str
    scaling: str
    level: int
    ratio: float
    metric: str
    mean: float
    std: float
    repeats: int
    status: str


@dataclass(frozen=True)
class RawValue:
    """One retained per-repeat metric value."""

    dataset: str
    noise: str
    scaling: str
    level: int
    ratio: float
    repeat: int
    metric: str
    value: float


@dataclass(frozen=True)
class SweepResult:
    """All cells of a sweep plus the provenance needed to rerun it."""

    cells: tuple[SweepCell, ...]
    config: SweepConfig
    version: str = __version__
    raw: Optional[tuple[RawValue, ...]] = None


def sweep_levels(n_features: int, max_ratio: Fraction, ratio_step: int) -> range:
    """Augmentation levels 0..ceil(max_ratio * D) in steps of ratio_step."""
    max_level = math.ceil(Fraction(max_ratio) * n_features)
    return range(0, max_level + 1, ratio_step)


def noise_sequence_seed(master_seed: int, dataset_index: int, kind: NoiseKind) -> int:
    """Seed of the noise-column sequence shared by every cell of one curve pair."""
    return derive_seed(master_seed, dataset_index, kind.code, _NOISE_SEQUENCE_STREAM)


def cell_kmeans_seed(
    master_seed: int,
    dataset_index: int,
    kind: NoiseKind,
    scaling: ScalingKind,
    level: int,
    repeat: int,
) -> int:
    """k-means seed of one repeat inside one sweep cell.

    At level 0 the noise kind is replaced by a fixed placeholder so that the
    baseline cells of both noise kinds are identical.
    """
    kind_code = kind.code if level > 0 else _BASELINE_KIND_CODE
    return derive_seed(master_seed, dataset_index, kind_code, scaling.code, level, repeat)


def resolve_workers(explicit: Optional[int] = None) -> int:
    """Worker count: explicit value, else CLUSTER_SENSE_THREADS, else 1 (0 = auto)."""
    value = explicit
    if value is None:
        raw = os.environ.get(WORKERS_ENV_VAR, "").strip()
        if not raw:
            return 1
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV_VAR} must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError(f"worker count must be nonnegative, got {value}")
    if value == 0:
        return os.cpu_count() or 1
    return value


def _error_code(exc: Exception) -> str:
    if isinstance(exc, InvalidNoiseRange):
        return "uniform-range"
    name = type(exc).__name__
    slug = "".join(("-" + ch.lower()) if ch.isupper() else ch for ch in name).lstrip("-")
    return slug


@dataclass(frozen=True)
class _CellPlan:
    dataset_index: int
    dataset: str
    kind: NoiseKind
    scaling: ScalingKind
    level: int
    ratio: float


def _population_std(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean((values - values.mean()) ** 2)))


def _error_cells(plan: _CellPlan, repeats: int, code: str) -> list[SweepCell]:
    return [
        SweepCell(
            dataset=plan.dataset,
            noise=plan.kind.value,
            scaling=plan.scaling.value,
            level=plan.level,
            ratio=plan.ratio,
            metric=metric,
            mean=math.nan,
            std=math.nan,
            repeats=repeats,
            status=f"error:{code}",
        )
        for metric in METRIC_NAMES
    ]


def _run_cell(
    plan: _CellPlan,
    base: LabeledDataset,
    noise_columns: Optional[np.ndarray],
    noise_error: Optional[Exception],
    spec: NoiseSpec,
    config: SweepConfig,
) -> tuple[list[SweepCell], list[RawValue]]:
    if plan.level > 0 and noise_error is not None and not config.redraw_noise_per_repeat:
        return _error_cells(plan, config.repeats, _error_code(noise_error)), []

    per_metric: dict[str, list[float]] = {name: [] for name in METRIC_NAMES}
    try:
        if config.redraw_noise_per_repeat and plan.level > 0:
            for repeat in range(config.repeats):
                augmented = append_noise(base, spec, plan.level, seed=(spec.seed, repeat))
                scaled = apply_scaling(augmented.matrix, plan.scaling)
                _run_repeat(plan, base, scaled, None, config, repeat, per_metric)
        else:
            if plan.level == 0:
                matrix = base.points
            else:
                matrix = np.hstack([base.points, noise_columns[:, : plan.level]])
            scaled = apply_scaling(matrix, plan.scaling)
            distances = pairwise_distances(scaled)
            for repeat in range(config.repeats):
                _run_repeat(plan, base, scaled, distances, config, repeat, per_metric)
    except Exception as exc:  # degraded cell, sweep continues
        return _error_cells(plan, config.repeats, _error_code(exc)), []

    cells = []
    raws = []
    for metric in METRIC_NAMES:
        values = np.array(per_metric[metric])
        if np.all(np.isfinite(values)):
            cell = SweepCell(
                dataset=plan.dataset,
                noise=plan.kind.value,
                scaling=plan.scaling.value,
                level=plan.level,
                ratio=plan.ratio,
                metric=metric,
                mean=float(values.mean()),
                std=_population_std(values),
                repeats=config.repeats,
                status="ok",
            )
        else:
            cell = SweepCell(
                dataset=plan.dataset,
                noise=plan.kind.value,
                scaling=plan.scaling.value,
                level=plan.level,
                ratio=plan.ratio,
                metric=metric,
                mean=math.nan,
                std=math.nan,
                repeats=config.repeats,
                status="error:non-finite-metric",
            )
        cells.append(cell)
        if config.retain_raw:
            raws.extend(
                RawValue(
                    dataset=plan.dataset,
                    noise=plan.kind.value,
                    scaling=plan.scaling.value,
                    level=plan.level,
                    ratio=plan.ratio,
                    repeat=r,
                    metric=metric,
                    value=float(v),
                )
                for r, v in enumerate(per_metric[metric])
            )
    return cells, raws


def _run_repeat(plan, base, scaled, distances, config, repeat, per_metric):
    seed = cell_kmeans_seed(
        config.master_seed, plan.dataset_index, plan.kind, plan.scaling, plan.level, repeat
    )
    result = fit(scaled, KMeansConfig(k=base.n_clusters, seed=seed))
    report = evaluate_clustering(scaled, result.assignments, base.labels, distances=distances)
    for metric, value in report.as_dict().items():
        per_metric[metric].append(value)


def run_sweep(config: SweepConfig) -> SweepResult:
    """Execute the full sweep described by the config.

    For each (dataset, noise kind, scaling) triple, augmentation levels run
    from 0 to ceil(max_ratio * D) columns in ratio_step increments; each cell
    clusters `repeats` times and records the mean and population standard
    deviation of every metric. Failed cells are marked error:<code> rather
    than aborting the sweep.
    """
    workers = resolve_workers(config.workers)

    tasks = []
    for dataset_index, source in enumerate(config.datasets):
        base = source.load()
        stats = compute_stats(base)
        levels = sweep_levels(base.n_features, config.max_ratio, config.ratio_step)
        max_level = levels[-1]
        for kind in config.noise_kinds:
            spec = NoiseSpec.from_stats(
                kind,
                stats,
                seed=noise_sequence_seed(config.master_seed, dataset_index, kind),
                stats_mode=config.noise_stats_mode,
            )
            noise_columns = None
            noise_error: Optional[Exception] = None
            if not config.redraw_noise_per_repeat:
                try:
                    noise_columns = append_noise(base, spec, max_level).appended
                except Exception as exc:
                    noise_error = exc
            for scaling in config.scalings:
                for level in levels:
                    plan = _CellPlan(
                        dataset_index=dataset_index,
                        dataset=base.name,
                        kind=kind,
                        scaling=scaling,
                        level=level,
                        ratio=level / base.n_features,
                    )
                    tasks.append(
                        (plan, base, noise_columns, noise_error, spec)
                    )

    def execute(task):
        plan, base, noise_columns, noise_error, spec = task
        return _run_cell(plan, base, noise_columns, noise_error, spec, config)

    if workers <= 1:
        outcomes = [execute(task) for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(execute, tasks))

    cells: list[SweepCell] = []
    raws: list[RawValue] = []
    for cell_list, raw_list in outcomes:
        cells.extend(cell_list)
        raws.extend(raw_list)
    return SweepResult(
        cells=tuple(cells),
        config=config,
        raw=tuple(raws) if config.retain_raw else None,
    )


def summarize_tipping(
    result: SweepResult, metric: str, threshold: float
) -> dict[tuple[str, str, str], Optional[float]]:
    """Smallest sampled ratio at which each curve's mean drops below the
    threshold and stays below for every larger sampled ratio; None if never.

    Curves are keyed by (dataset, noise, scaling); error cells are skipped.
    """
    if metric not in METRIC_NAMES:
        raise ValueError(f"unknown metric {metric!r} (expected one of {METRIC_NAMES})")

    curves: dict[tuple[str, str, str], list[tuple[float, float]]] = {}
    for cell in result.cells:
        if cell.metric != metric:
            continue
        key = (cell.dataset, cell.noise, cell.scaling)
        curves.setdefault(key, [])
        if cell.status == "ok":
            curves[key].append((cell.ratio, cell.mean))

    tipping: dict[tuple[str, str, str], Optional[float]] = {}
    for key, points in curves.items():
        points.sort()
        answer = None
        for ratio, mean in reversed(points):
            if mean < threshold:
                answer = ratio
            else:
                break
        tipping[key] = answer
    return tipping
