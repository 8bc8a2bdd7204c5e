"""Experiment orchestration: enumerate once per noisy-flag configuration,
evaluate arbitrarily many (bias set, eta, p) grid points from the binned
tallies, and reduce to tomography metrics.

The enumeration for the 24 tomography circuits is embarrassingly parallel;
workers own disjoint circuits and results are reduced in a fixed order, so
the output is bitwise independent of the worker count.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .gadget import (
    BASES,
    STATES,
    BinnedTally,
    GadgetConfig,
    NoisyFlags,
    TomographyId,
    compile_gadget,
    enumerate_gadget,
    estimate_configs,
)
from .tomography import (
    CircuitTally,
    NoiseMetrics,
    expectation_vectors,
    extract_noise,
    reconstruct_ptm,
)

WORKERS_ENV = "MAGICBIAS_WORKERS"

ALL_CIRCUITS = tuple(
    TomographyId(s, b, br) for s in STATES for b in BASES for br in (0, 1)
)


def worker_count(override: int | None = None) -> int:
    if override is not None and override > 0:
        return override
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return 1


def _enumerate_one(args) -> tuple[str, BinnedTally]:
    flags_key, order, tomo_key, set_spec = args
    flags = NoisyFlags(*(c == "1" for c in flags_key))
    state, basis, branch = tomo_key.split("|")
    cfg = GadgetConfig(
        noisy_flags=flags,
        truncation_order=order,
        tomography_id=TomographyId(state, basis, int(branch)),
    )
    return tomo_key, enumerate_gadget(cfg, bias_sets=_sets_from_spec(set_spec))


def _sets_from_spec(set_spec) -> tuple:
    from .gadget import DEFAULT_SETS
    from .noise import BiasSet
    from .pauli import PauliString

    if set_spec is None:
        return DEFAULT_SETS
    out = []
    for name, gens in set_spec:
        out.append(
            BiasSet(2, tuple(PauliString.parse(g, 2) for g in gens), name=name)
        )
    return tuple(out)


def sets_to_spec(sets) -> list[tuple[str, list[str]]] | None:
    from .gadget import DEFAULT_SETS

    if sets is DEFAULT_SETS:
        return None
    return [(s.name, [str(g) for g in s.generators]) for s in sets]


@dataclass
class EnumeratedGadget:
    """Binned tallies for all 24 tomography circuits at one flag/order choice."""

    flags: NoisyFlags
    order: int
    tallies: dict[str, BinnedTally]
    seconds: float

    def grid_point(self, set_name: str, eta: float, p: float) -> "PointResult":
        per_circuit: dict[tuple[str, str, int], CircuitTally] = {}
        accept = leak = total = 0.0
        for tomo in ALL_CIRCUITS:
            g = self.tallies[tomo.key()].grid_point(set_name, eta, p)
            ct = CircuitTally(**g)
            per_circuit[(tomo.state, tomo.basis, tomo.branch)] = ct
            accept += ct.accept
            leak += ct.leak
            total += ct.total
        exps = expectation_vectors(per_circuit)
        ptm = reconstruct_ptm(exps)
        metrics = extract_noise(ptm)
        metrics.accept_rate = accept / total
        metrics.leak_rate = leak / total
        return PointResult(set_name, eta, p, metrics, ptm, per_circuit)


@dataclass
class PointResult:
    set_name: str
    eta: float
    p: float
    metrics: NoiseMetrics
    ptm: "object"
    per_circuit: dict


def enumerate_flags(
    flags: NoisyFlags, order: int, workers: int | None = None, bias_sets=None
) -> EnumeratedGadget:
    """Enumerate all tomography circuits for one noisy-flag configuration."""
    t0 = time.time()
    from .gadget import DEFAULT_SETS

    set_spec = sets_to_spec(bias_sets if bias_sets is not None else DEFAULT_SETS)
    jobs = [(flags.key(), order, tomo.key(), set_spec) for tomo in ALL_CIRCUITS]
    n_workers = worker_count(workers)
    tallies: dict[str, BinnedTally] = {}
    if n_workers <= 1:
        results = map(_enumerate_one, jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=n_workers)
        results = pool.map(_enumerate_one, jobs)
    for key, tally in results:  # fixed job order: deterministic reduction
        tallies[key] = tally
    if n_workers > 1:
        pool.shutdown()
    return EnumeratedGadget(flags, order, tallies, time.time() - t0)


def cost_estimate(flags: NoisyFlags, order: int) -> int:
    """Total configurations across the 24 tomography circuits."""
    cfg = GadgetConfig(noisy_flags=flags, truncation_order=order)
    from .gadget import build_gadget_circuit

    n_sites = len(build_gadget_circuit(cfg).circuit.fault_sites)
    return 24 * estimate_configs(n_sites, order)


def fit_loglog_slope(xs: list[float], ys: list[float]) -> float:
    """Least-squares slope of log y against log x."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    n = len(lx)
    mx = sum(lx) / n
    my = sum(ly) / n
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den
