"""Ensemble experiments: quenched sweep, self-averaging scan, Chernoff-bound check.

Every per-sample quantity is a pure function of ``(master_seed, sample_index)``,
and aggregates are reduced in sample order after the workers finish, so results
do not depend on the thread count.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

import risklab
from risklab.errors import SingularError
from risklab.market import EnsembleSpec, sample_return_matrix
from risklab.risk import SampleStats, analyze
from risklab.theory import free_energy_theory, rate_free_energy, theory_point

log = logging.getLogger(__name__)

T = TypeVar("T")

# Singular draws above this ratio (at N >= SINGULAR_CHECK_MIN_N) mean something is wrong.
SINGULAR_ABORT_ALPHA = 1.05
SINGULAR_CHECK_MIN_N = 100
DEFAULT_CHERNOFF_OFFSETS = (-0.15, -0.1, -0.05, -0.02, 0.0, 0.02, 0.05, 0.1, 0.15)


@dataclass(frozen=True)
class SweepRecord:
    alpha_nominal: float
    alpha_realized: float
    n_assets: int
    n_samples: int
    eps_mean: float
    eps_stderr: float
    qw_mean: float
    qw_stderr: float
    eps_theory: float
    qw_theory: float
    eps_or: float
    qw_or: float
    n_skipped: int = field(default=0, metadata={"csv": False})


@dataclass(frozen=True)
class ConcentrationRecord:
    n_assets: int
    alpha: float
    beta: float
    statistic: str
    n_samples: int
    mean: float
    variance: float
    theory: float

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.n_samples)


@dataclass(frozen=True)
class ChernoffRecord:
    threshold: float
    side: str
    empirical: float
    stderr: float
    rate: float
    bound: float
    passed: bool


def _map(fn: Callable[[int], T], indices: Sequence[int], threads: int) -> list[T]:
    if threads <= 1:
        return [fn(i) for i in indices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, indices))


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    if values.size == 0:
        return math.nan, math.nan
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.size))


def ensemble_stats(spec: EnsembleSpec, beta: float | None = None, threads: int = 1) -> tuple[list[SampleStats], int]:
    """Per-sample statistics in index order, plus the number of singular draws skipped."""

    def one(i: int) -> SampleStats | None:
        try:
            return analyze(sample_return_matrix(spec, i), beta)
        except SingularError:
            return None

    results = _map(one, range(spec.n_samples), threads)
    kept = [r for r in results if r is not None]
    skipped = len(results) - len(kept)
    if skipped:
        log.warning("alpha=%g N=%d: %d of %d draws singular", spec.scenario_ratio, spec.n_assets, skipped, spec.n_samples)
        if spec.realized_alpha > SINGULAR_ABORT_ALPHA and spec.n_assets >= SINGULAR_CHECK_MIN_N:
            raise SingularError(
                f"{skipped} singular covariance draws at alpha={spec.realized_alpha:g}, "
                f"N={spec.n_assets}; expected none"
            )
    return kept, skipped


def sweep(
    alphas: Iterable[float],
    n_assets: int,
    n_samples: int,
    master_seed: int,
    threads: int = 1,
) -> list[SweepRecord]:
    """Quenched ensemble means of risk and concentration next to both theories.

    For ``alpha <= 1`` no sampling is done: the record carries the limiting
    values (zero risk, divergent concentration).
    """
    records = []
    for a in alphas:
        spec = EnsembleSpec(n_assets, a, master_seed, n_samples)
        realized = spec.realized_alpha
        tp = theory_point(realized)
        if realized <= 1:
            records.append(
                SweepRecord(a, realized, n_assets, n_samples, 0.0, 0.0, math.inf, 0.0,
                            tp.eps_quenched, tp.qw_quenched, tp.eps_annealed, tp.qw_annealed)
            )
            continue
        stats, skipped = ensemble_stats(spec, threads=threads)
        eps_mean, eps_se = _mean_stderr(np.array([s.epsilon for s in stats]))
        qw_mean, qw_se = _mean_stderr(np.array([s.q_w for s in stats]))
        records.append(
            SweepRecord(a, realized, n_assets, n_samples, eps_mean, eps_se, qw_mean, qw_se,
                        tp.eps_quenched, tp.qw_quenched, tp.eps_annealed, tp.qw_annealed,
                        n_skipped=skipped)
        )
        log.info("alpha=%g eps=%.6f+-%.6f qw=%.6f+-%.6f", realized, eps_mean, eps_se, qw_mean, qw_se)
    return records


def self_averaging_scan(
    alpha: float,
    n_list: Iterable[int],
    n_samples: int,
    seed: int,
    beta: float = 1.0,
    threads: int = 1,
) -> list[ConcentrationRecord]:
    """Sample variance of the minimal risk and of the free energy for each N.

    Risk rows carry ``beta = inf``, the zero-temperature limit they belong to.
    Theory values use the realized ratio p/N.
    """
    records = []
    for n in n_list:
        spec = EnsembleSpec(n, alpha, seed, n_samples)
        a = spec.realized_alpha
        stats, _ = ensemble_stats(spec, beta=beta, threads=threads)
        eps = np.array([s.epsilon for s in stats])
        fe = np.array([s.f_value for s in stats])
        k = len(stats)
        records.append(ConcentrationRecord(n, a, math.inf, "epsilon", k, float(eps.mean()),
                                           float(eps.var(ddof=1)), theory_point(a).eps_quenched))
        records.append(ConcentrationRecord(n, a, beta, "free_energy", k, float(fe.mean()),
                                           float(fe.var(ddof=1)), free_energy_theory(a, beta)))
    return records


def default_thresholds(alpha: float, beta: float) -> list[float]:
    center = free_energy_theory(alpha, beta)
    return [center + d for d in DEFAULT_CHERNOFF_OFFSETS]


def chernoff_check(
    alpha: float,
    beta: float,
    n_assets: int,
    n_samples: int,
    thresholds: Iterable[float] | None,
    seed: int,
    threads: int = 1,
) -> list[ChernoffRecord]:
    """Empirical free-energy tails against ``exp(-N R)`` on both sides of each threshold.

    ``plus`` is ``Pr[f <= t]`` and ``minus`` is ``Pr[f >= t]``. A record passes
    when the empirical frequency is at most the bound plus three standard errors.
    """
    spec = EnsembleSpec(n_assets, alpha, seed, n_samples)
    a = spec.realized_alpha
    if thresholds is None:
        thresholds = default_thresholds(a, beta)
    stats, _ = ensemble_stats(spec, beta=beta, threads=threads)
    fe = np.array([s.f_value for s in stats])
    k = fe.size
    records = []
    for t in thresholds:
        for side, hits in (("plus", fe <= t), ("minus", fe >= t)):
            p = float(hits.mean())
            se = math.sqrt(p * (1 - p) / k)
            rv = rate_free_energy(a, beta, t, side)
            bound = rv.bound(n_assets)
            records.append(ChernoffRecord(t, side, p, se, rv.value, bound, p <= bound + 3 * se))
    return records


# -- persistence ---------------------------------------------------------------


def csv_fields(cls) -> list[str]:
    return [f.name for f in dataclasses.fields(cls) if f.metadata.get("csv", True)]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def metadata_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".json")


def persist(records: Sequence, path: str | Path, cls=None, config: dict | None = None, seed: int | None = None) -> Path:
    """Write records as CSV (12 significant digits) with a JSON metadata sidecar.

    ``cls`` names the record type when ``records`` is empty, so the header can
    still be written.
    """
    path = Path(path)
    if cls is None:
        if not records:
            raise ValueError("cannot infer the record type of an empty list; pass cls")
        cls = type(records[0])
    names = csv_fields(cls)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(names)
            for r in records:
                w.writerow([_fmt(getattr(r, n)) for n in names])
        meta = {
            "record_type": cls.__name__,
            "seed": seed,
            "version": risklab.__version__,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "python": platform.python_version(),
            "numpy": np.__version__,
            "error_bars": "standard error of the mean (sample std / sqrt(n)); sample std = stderr * sqrt(n)",
            "config": config or {},
        }
        extra = [dataclasses.asdict(r) for r in records if any(
            not f.metadata.get("csv", True) for f in dataclasses.fields(r))]
        if extra:
            meta["non_csv_fields"] = [
                {f.name: d[f.name] for f in dataclasses.fields(cls) if not f.metadata.get("csv", True)}
                for d in extra
            ]
        metadata_path(path).write_text(json.dumps(meta, indent=2, default=str) + "\n")
    except OSError as exc:
        raise OSError(f"could not write results to {path}: {exc}") from exc
    return path


def _parse(value: str, typ):
    if typ is bool or typ == "bool":
        return value == "true"
    if typ is int or typ == "int":
        return int(value)
    if typ is float or typ == "float":
        return float(value)
    return value


def load_records(path: str | Path, cls) -> list:
    """Parse a CSV written by :func:`persist` back into ``cls`` instances."""
    types = {f.name: f.type for f in dataclasses.fields(cls)}
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        return [cls(**{k: _parse(v, types[k]) for k, v in row.items()}) for row in reader]
