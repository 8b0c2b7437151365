"""Irrelevant random features: parameter draws, column generators, appending.

Appended columns never read the labels; they are pure functions of the
baseline's global mean/std, the noise kind, and a per-column derived RNG
stream. Column j of a sequence depends only on (seed, j), which gives the
prefix property: growing an augmentation reuses every earlier column.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset
from .seeding import derive_rng

_COLUMN_STREAM = 0xC01

_STATS_MODES = ("pooled", "per-feature")


class InvalidNoiseRange(ValueError):
    """Uniform noise bound mu + 2*sigma is not positive."""


class NoiseKind(enum.Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"

    @property
    def code(self) -> int:
        return _KIND_CODES[self]

    @classmethod
    def parse(cls, token: str) -> "NoiseKind":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown noise kind {token!r} (expected gaussian or uniform)"
            ) from None


_KIND_CODES = {NoiseKind.GAUSSIAN: 0, NoiseKind.UNIFORM: 1}


@dataclass(frozen=True)
class NoiseSpec:
    """Noise distribution kind plus the baseline stats that parameterize it."""

    kind: NoiseKind
    mu: float
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")

    @classmethod
    def from_stats(cls, kind, stats, seed: int = 0, stats_mode: str = "pooled") -> "NoiseSpec":
        """Build a spec from DatasetStats.

        stats_mode "pooled" uses the global mu/sigma over all entries;
        "per-feature" averages the per-feature means and sigmas instead
        (only sigma actually differs between the two).
        """
        if stats_mode not in _STATS_MODES:
            raise ValueError(f"unknown stats_mode {stats_mode!r} (expected one of {_STATS_MODES})")
        if stats_mode == "pooled":
            mu, sigma = stats.mu, stats.sigma
        else:
            mu = float(np.mean(stats.per_feature_mu))
            sigma = float(np.mean(stats.per_feature_sigma))
        return cls(kind=kind, mu=mu, sigma=sigma, seed=seed)


@dataclass(frozen=True)
class GaussianFeatureParams:
    """Per-column Gaussian parameters.

    mu_r = sign * (mu + sigma) * eta and sigma_r = sigma * (1 + sign2 * eta2),
    with all four draws independent (eta, eta2 ~ Uniform[0,1); each sign is +1
    when its own Uniform[0,1) draw is >= 0.5, else -1).
    """

    eta: float
    sign: int
    eta2: float
    sign2: int
    mu_r: float
    sigma_r: float


def _draw_sign(rng: np.random.Generator) -> int:
    return 1 if rng.uniform() >= 0.5 else -1


def draw_gaussian_params(spec: NoiseSpec, rng: np.random.Generator) -> GaussianFeatureParams:
    """Draw one column's (mu_r, sigma_r).

    Draw order is fixed (eta, sign, eta2, sign2) so a caller holding an
    identically seeded generator can reproduce the parameters.
    """
    if spec.kind is not NoiseKind.GAUSSIAN:
        raise ValueError(f"spec.kind must be gaussian, got {spec.kind.value}")
    eta = float(rng.uniform())
    sign = _draw_sign(rng)
    eta2 = float(rng.uniform())
    sign2 = _draw_sign(rng)
    return GaussianFeatureParams(
        eta=eta,
        sign=sign,
        eta2=eta2,
        sign2=sign2,
        mu_r=sign * (spec.mu + spec.sigma) * eta,
        sigma_r=spec.sigma * (1.0 + sign2 * eta2),
    )


def gaussian_feature(spec: NoiseSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """One Gaussian noise column: fresh (mu_r, sigma_r), then n normal samples."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    params = draw_gaussian_params(spec, rng)
    return rng.normal(params.mu_r, params.sigma_r, size=n)


def uniform_feature(spec: NoiseSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """One Uniform noise column over [-(mu + 2*sigma), +(mu + 2*sigma)]."""
    if spec.kind is not NoiseKind.UNIFORM:
        raise ValueError(f"spec.kind must be uniform, got {spec.kind.value}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    bound = spec.mu + 2.0 * spec.sigma
    if bound <= 0:
        raise InvalidNoiseRange(
            f"uniform noise range [-(mu+2*sigma), +(mu+2*sigma)] is inverted: "
            f"mu={spec.mu}, sigma={spec.sigma} gives bound {bound}"
        )
    return rng.uniform(-bound, bound, size=n)


@dataclass(frozen=True)
class AugmentedDataset:
    """A baseline dataset plus appended noise columns (to the right)."""

    base: LabeledDataset
    appended: np.ndarray

    def __post_init__(self):
        appended = np.asarray(self.appended, dtype=np.float64)
        if appended.ndim != 2 or appended.shape[0] != self.base.n_points:
            raise ValueError(
                f"appended must have {self.base.n_points} rows, got shape {appended.shape}"
            )
        object.__setattr__(self, "appended", appended)

    @property
    def ratio(self) -> tuple[int, int]:
        """(appended columns, baseline columns) -- the m:D bookkeeping pair."""
        return self.appended.shape[1], self.base.n_features

    @property
    def ratio_value(self) -> float:
        m, d = self.ratio
        return m / d

    @property
    def matrix(self) -> np.ndarray:
        """Baseline and noise columns stacked, noise to the right."""
        if self.appended.shape[1] == 0:
            return self.base.points.copy()
        return np.hstack([self.base.points, self.appended])


def column_rng(seed, column_index: int) -> np.random.Generator:
    """Derived RNG stream for noise column `column_index` of sequence `seed`."""
    parts = seed if isinstance(seed, tuple) else (seed,)
    return derive_rng(*parts, _COLUMN_STREAM, column_index)


def append_noise(
    base: LabeledDataset,
    spec: NoiseSpec,
    count: int,
    seed=None,
) -> AugmentedDataset:
    """Append `count` noise columns of the spec's kind to the baseline.

    Column j is drawn from its own RNG stream keyed by (seed, j), so for a
    fixed seed the first m columns of any longer augmentation equal the
    m-column augmentation exactly. `seed` defaults to spec.seed; passing a
    tuple of ints keys an alternative sequence (e.g. one per repeat).
    """
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    effective = spec.seed if seed is None else seed
    n = base.n_points
    columns = np.empty((n, count))
    for j in range(count):
        rng = column_rng(effective, j)
        if spec.kind is NoiseKind.GAUSSIAN:
            columns[:, j] = gaussian_feature(spec, n, rng)
        else:
            columns[:, j] = uniform_feature(spec, n, rng)
    return AugmentedDataset(base=base, appended=columns)
