"""Monte Carlo study of estimator accuracy over (n, p = q) grids.

Every random draw comes from a stream keyed by labels, e.g. truth values use
``("truth", family, param)`` and replication k of cell (family, param, n) uses
``("rep", family, param, n, k)``. Adding grid points or changing the thread
count therefore leaves existing cells untouched.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .measures import IndexSpec, estimate_index, population_value
from .parallel import ordered_map
from .rng import DEFAULT_SEED, DistSpec, rng_new, sample as draw, split, stream_key

CSV_HEADER = ("family", "param", "n", "true_value", "mare", "rmse")


def mare(estimates: Sequence[float], truth: float) -> float:
    """Mean absolute relative error of ``estimates`` around ``truth``."""
    est = np.asarray(estimates, dtype=np.float64)
    if est.size == 0:
        raise DomainError("mare needs at least one estimate")
    if truth == 0:
        raise DomainError("mare is undefined for a zero true value")
    return math.fsum(np.abs((est - truth) / truth)) / est.size


def rmse(estimates: Sequence[float], truth: float) -> float:
    est = np.asarray(estimates, dtype=np.float64)
    if est.size == 0:
        raise DomainError("rmse needs at least one estimate")
    return math.sqrt(math.fsum((est - truth) ** 2) / est.size)


@dataclass(frozen=True)
class SimConfig:
    dist: DistSpec = field(default_factory=DistSpec)
    n_grid: tuple[int, ...] = (30, 50, 100, 200, 500)
    param_grid: tuple[float, ...] = (1.1, 2.0, 5.0, 10.0, 50.0)
    families: tuple[str, ...] = ("GP", "HQ")
    n_sim: int = 500
    truth_draws: int = 10**6
    master_seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "param_grid", tuple(float(p) for p in self.param_grid))
        object.__setattr__(self, "families", tuple(self.families))
        if not self.n_grid or not self.param_grid or not self.families:
            raise DomainError("simulation grids must be nonempty")
        if min(self.n_grid) < 2:
            raise DomainError("every sample size must be at least 2")
        if self.n_sim < 1:
            raise DomainError("n_sim must be at least 1")
        if self.truth_draws < 10**4:
            raise DomainError("truth_draws must be at least 10^4")
        for family in self.families:
            if family not in ("GP", "HQ"):
                raise DomainError(f"simulation families are GP and HQ, got {family!r}")
            for param in self.param_grid:
                IndexSpec.make(family, param)

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        data = dict(data)
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise DomainError(f"unknown simulation config keys: {sorted(unknown)}")
        if "dist" in data:
            data["dist"] = DistSpec(**data["dist"])
        return cls(**data)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["n_grid"] = list(self.n_grid)
        out["param_grid"] = list(self.param_grid)
        out["families"] = list(self.families)
        return out


@dataclass(frozen=True)
class SimCell:
    family: str
    param: float
    n: int
    true_value: float
    mare: float
    rmse: float
    n_sim: int


def replicate_estimates(config: SimConfig, spec: IndexSpec, n: int, threads: int = 1) -> list[float]:
    master = rng_new(config.master_seed)

    def one(k):
        stream = split(master, stream_key("rep", spec.family, spec.param, n, k))
        return estimate_index(draw(stream, config.dist, n), spec).point

    return list(ordered_map(one, range(config.n_sim), threads))


def truth_value(config: SimConfig, spec: IndexSpec) -> float:
    master = rng_new(config.master_seed)
    stream = split(master, stream_key("truth", spec.family, spec.param))
    return population_value(config.dist, spec, config.truth_draws, stream)


def run_simulation(config: SimConfig, threads: int = 1) -> list[SimCell]:
    """All cells in (family, param, n) grid order."""
    cells = []
    for family in config.families:
        for param in config.param_grid:
            spec = IndexSpec.make(family, param)
            truth = truth_value(config, spec)
            for n in config.n_grid:
                est = replicate_estimates(config, spec, n, threads)
                cells.append(
                    SimCell(family, param, n, truth, mare(est, truth), rmse(est, truth), config.n_sim)
                )
    return cells


def cells_to_csv(cells: Sequence[SimCell]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for c in cells:
        writer.writerow([c.family, repr(c.param), c.n, repr(c.true_value), repr(c.mare), repr(c.rmse)])
    return buf.getvalue()


def cells_to_json(config: SimConfig, cells: Sequence[SimCell]) -> str:
    payload = {"config": config.to_dict(), "cells": [asdict(c) for c in cells]}
    return json.dumps(payload, indent=2) + "\n"
