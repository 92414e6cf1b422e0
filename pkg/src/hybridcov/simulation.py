"""Monte-Carlo rejection-probability experiments.

Every replication draws from its own ``RngStream``, keyed by the master
seed and a stream id derived from the grid cell and the replication index,
so results do not depend on execution order or on the number of workers.
"""

import csv
import io
import json
import logging
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .distributions import RngStream, chi2_4_quantile
from .exceptions import ConfigError, CovTestError
from .fisher import fisher_statistic
from .models import CovModelSpec, generate_sample, model_diagonal
from .spike import (
    eigen_stat_multi,
    eigen_stat_single,
    estimate_spikes,
    spectrum,
    spike_sigma_hat,
)
from .ustat import frobenius_test
from .validation import check_probability

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("model", "delta", "method", "dist", "p", "n", "reps", "rate")


class SimulationError(CovTestError):
    pass


@dataclass(frozen=True)
class SimConfig:
    model: str
    p: int = 200
    n: int = 100
    dist: str = "gaussian"
    alpha: float = 0.05
    ms: tuple = (1,)
    draws: int = 10000
    seed: int = 0

    def __post_init__(self):
        check_probability(self.alpha)
        ms = tuple(sorted({int(m) for m in self.ms}))
        if not ms or ms[0] < 1:
            raise ConfigError(f"spike counts must be >= 1, got {self.ms}")
        object.__setattr__(self, "ms", ms)
        # validates model, p parity, distribution
        spec = CovModelSpec(self.model, 0.0, self.p, self.n, self.dist)
        object.__setattr__(self, "dist", spec.dist)

    def methods(self):
        return [f"fc_{m}" for m in self.ms] + ["lc_only"] + [f"eigen_only_{m}" for m in self.ms]


@dataclass(frozen=True)
class Replication:
    t1: float
    p1: float
    eigen: dict  # m -> (statistic, p2)
    t_fc: dict  # m -> Fisher statistic


@dataclass
class SimReport:
    rows: list
    config: dict
    runtimes: dict = field(default_factory=dict)

    def rate(self, delta, method):
        for row in self.rows:
            if row["delta"] == delta and row["method"] == method:
                return row["rate"]
        raise KeyError((delta, method))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
        return buf.getvalue()

    def to_json(self):
        payload = {
            "config": self.config,
            "cells": self.rows,
            "runtime_seconds": {repr(k): v for k, v in self.runtimes.items()},
            "version": __version__,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def cell_stream(model, delta, r):
    """Stream id of replication ``r`` in grid cell ``(model, delta)``."""
    h = zlib.crc32(f"{model}:{float(delta)!r}".encode())
    return (h << 32) + r


def run_replication(config, delta, r):
    stream = RngStream(config.seed, cell_stream(config.model, delta, r))
    gen = stream.generator()
    base = CovModelSpec(config.model, delta, config.p, config.n, config.dist)
    x1 = generate_sample(model_diagonal(base.with_sample(1)), config.n, config.dist, gen)
    x2 = generate_sample(model_diagonal(base.with_sample(2)), config.n, config.dist, gen)

    frob = frobenius_test(x1, x2)
    k = max(config.ms)
    spec1, spec2 = spectrum(x1), spectrum(x2)
    cov = spike_sigma_hat(
        estimate_spikes(x1, k, spec1), estimate_spikes(x2, k, spec2), k
    )
    eigen, t_fc = {}, {}
    for m in config.ms:
        if m == 1:
            e = eigen_stat_single(spec1, spec2, cov)
        else:
            e = eigen_stat_multi(spec1, spec2, cov, m, config.draws, stream.substream(m))
        eigen[m] = (e.statistic, e.p2)
        t_fc[m] = fisher_statistic(max(frob.p1, 1e-300), max(e.p2, 1e-300))
    return Replication(frob.t1, frob.p1, eigen, t_fc)


def _run_chunk(args):
    config, delta, start, stop = args
    out = []
    for r in range(start, stop):
        try:
            out.append(run_replication(config, delta, r))
        except CovTestError as exc:
            raise SimulationError(
                f"model={config.model} delta={delta} replication={r}: "
                f"{type(exc).__name__}: {exc}"
            ) from exc
    return out


def _chunks(config, delta, reps, workers):
    size = max(1, -(-reps // (4 * workers)))
    return [(config, delta, s, min(s + size, reps)) for s in range(0, reps, size)]


def simulate_cell(config, delta, reps, workers=1, executor=None):
    """All replications of one grid cell, in replication order."""
    if reps < 1:
        raise ConfigError(f"reps must be >= 1, got {reps}")
    CovModelSpec(config.model, delta, config.p, config.n, config.dist)
    tasks = _chunks(config, delta, reps, max(workers, 1))
    if executor is None:
        results = [_run_chunk(t) for t in tasks]
    else:
        results = list(executor.map(_run_chunk, tasks))
    return [rep for chunk in results for rep in chunk]


def rejection_rates(config, reps_list):
    q = chi2_4_quantile(1.0 - config.alpha)
    rates = {}
    for m in config.ms:
        rates[f"fc_{m}"] = float(np.mean([rep.t_fc[m] > q for rep in reps_list]))
    rates["lc_only"] = float(np.mean([rep.p1 < config.alpha for rep in reps_list]))
    for m in config.ms:
        rates[f"eigen_only_{m}"] = float(
            np.mean([rep.eigen[m][1] < config.alpha for rep in reps_list])
        )
    return rates


def rejection_curve(config, deltas, reps=500, workers=1):
    """Empirical rejection rates of every method over a grid of ``delta``."""
    if config.p >= 500:
        logger.warning("p=%d is beyond desk scale; expect long runtimes", config.p)
    rows, runtimes = [], {}
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for delta in deltas:
            delta = float(delta)
            start = time.perf_counter()
            reps_list = simulate_cell(config, delta, reps, workers, executor)
            runtimes[delta] = time.perf_counter() - start
            for method, rate in rejection_rates(config, reps_list).items():
                rows.append(
                    {
                        "model": config.model,
                        "delta": delta,
                        "method": method,
                        "dist": config.dist,
                        "p": config.p,
                        "n": config.n,
                        "reps": reps,
                        "rate": rate,
                    }
                )
    finally:
        if executor is not None:
            executor.shutdown()
    cfg = asdict(config)
    cfg["ms"] = list(config.ms)
    cfg["deltas"] = [float(d) for d in deltas]
    cfg["reps"] = reps
    return SimReport(rows, cfg, runtimes)
