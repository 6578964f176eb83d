"""Seeded Gaussian return ensembles and their covariance matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EnsembleSpec:
    n_assets: int
    scenario_ratio: float
    master_seed: int = 0
    n_samples: int = 1

    def __post_init__(self):
        if self.n_assets < 2:
            raise ValueError(f"n_assets must be >= 2, got {self.n_assets}")
        if not self.scenario_ratio > 0:
            raise ValueError(f"scenario_ratio must be > 0, got {self.scenario_ratio}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.n_scenarios < 1:
            raise ValueError("scenario_ratio * n_assets rounds to zero scenarios")

    @property
    def n_scenarios(self) -> int:
        return int(round(self.scenario_ratio * self.n_assets))

    @property
    def realized_alpha(self) -> float:
        return self.n_scenarios / self.n_assets


@dataclass(frozen=True)
class ReturnMatrix:
    """Scaled returns ``x / sqrt(N)``, shape (N, p)."""

    entries: np.ndarray

    @classmethod
    def from_raw(cls, raw) -> "ReturnMatrix":
        x = np.array(raw, dtype=np.float64, ndmin=2)
        if x.ndim != 2:
            raise ValueError(f"raw returns must be 2-D, got shape {x.shape}")
        return cls(x / math.sqrt(x.shape[0]))

    @property
    def n_assets(self) -> int:
        return self.entries.shape[0]

    @property
    def n_scenarios(self) -> int:
        return self.entries.shape[1]

    @property
    def realized_alpha(self) -> float:
        return self.n_scenarios / self.n_assets

    @property
    def raw(self) -> np.ndarray:
        return self.entries * math.sqrt(self.n_assets)


def sample_generator(master_seed: int, sample_index: int) -> np.random.Generator:
    """Counter-based Philox stream keyed by ``(master_seed, sample_index)``.

    The stream depends only on the key, so samples can be drawn in any order or
    on any thread and still come out bit-identical.
    """
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(sample_index),))
    return np.random.Generator(np.random.Philox(seq))


def sample_return_matrix(spec: EnsembleSpec, sample_index: int) -> ReturnMatrix:
    if not 0 <= sample_index < spec.n_samples:
        raise IndexError(f"sample_index {sample_index} outside [0, {spec.n_samples})")
    rng = sample_generator(spec.master_seed, sample_index)
    raw = rng.standard_normal((spec.n_assets, spec.n_scenarios))
    return ReturnMatrix(raw / math.sqrt(spec.n_assets))


def covariance(x: ReturnMatrix) -> np.ndarray:
    """``J = X X^T``; the 1/N of the raw-return definition is already in X."""
    j = x.entries @ x.entries.T
    # BLAS may round the two triangles differently; make symmetry exact.
    return 0.5 * (j + j.T)
