"""
Monte Carlo traffic aggregation module for the capacity planner.

This module draws the aggregate rate of n independent sources slot by slot
and measures how often it exceeds a candidate capacity. It is the empirical
check for the closed-form sizing in stat_mux.

Random streams: slots are grouped into fixed-size blocks and block b draws
from PCG64(SeedSequence([seed, b])). Block sizes depend only on the source
count, never on the worker count, and per-block partial statistics are
merged with a fixed pairwise tree, so serial and threaded runs return
bit-identical summaries.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import constants
from .errors import InputDomainError
from .stat_mux import Convention, SourceModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimRun:
    """
    One Monte Carlo experiment.

    Attributes:
        model (SourceModel): The sources
        trials (int): Number of slots to draw
        seed (int): Base seed, 64-bit
        capacity (float, optional): Capacity to measure exceedance against
    """

    model: SourceModel
    trials: int = constants.DEFAULT_TRIALS
    seed: int = 0
    capacity: Optional[float] = None

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise InputDomainError(f"trials must be an integer >= 1, got {self.trials!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise InputDomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.capacity is not None and math.isnan(self.capacity):
            raise InputDomainError("capacity must be a number")


@dataclass(frozen=True)
class SimSummary:
    mean: float
    stddev: float
    exceedance_rate: float
    max_observed: float
    trials: int


@dataclass(frozen=True)
class _Partial:
    count: int
    mean: float
    m2: float
    exceed: int
    maximum: float


def substream(seed, index):
    """
    Independent generator for block ``index`` of a run seeded with ``seed``.

    Args:
        seed (int): Base seed
        index (int): Block index

    Returns:
        numpy.random.Generator: PCG64 generator for that block
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def simulate_slot(model, rng):
    """
    Aggregate rate of all sources during one slot.

    Each source draws its rate uniformly from [0, R], the distribution whose
    standard deviation is R / (2 sqrt 3).

    Args:
        model (SourceModel): The sources
        rng (numpy.random.Generator): Generator, advanced by n draws

    Returns:
        float: Aggregate rate in bits/s
    """
    if model.n == 0:
        return 0.0
    return float(rng.uniform(0.0, model.rate, size=model.n).sum())


def block_slots(model):
    """Slots per block, sized so one block holds at most SIM_BLOCK_DRAWS draws."""
    per_slot = max(model.n, 1)
    return max(1, min(constants.SIM_BLOCK_SLOTS, constants.SIM_BLOCK_DRAWS // per_slot))


def _simulate_block(sim, index, slots):
    rng = substream(sim.seed, index)
    if sim.model.n == 0:
        totals = np.zeros(slots)
    else:
        totals = rng.uniform(0.0, sim.model.rate, size=(slots, sim.model.n)).sum(axis=1)

    mean = float(totals.mean())
    m2 = float(((totals - mean) ** 2).sum())
    exceed = 0 if sim.capacity is None else int(np.count_nonzero(totals > sim.capacity))
    return _Partial(count=slots, mean=mean, m2=m2, exceed=exceed, maximum=float(totals.max()))


def _merge(left, right):
    # Chan et al. pairwise update of mean and sum of squared deviations
    count = left.count + right.count
    delta = right.mean - left.mean
    mean = left.mean + delta * right.count / count
    m2 = left.m2 + right.m2 + delta * delta * left.count * right.count / count
    return _Partial(
        count=count,
        mean=mean,
        m2=m2,
        exceed=left.exceed + right.exceed,
        maximum=max(left.maximum, right.maximum),
    )


def _tree_reduce(partials):
    level = list(partials)
    while len(level) > 1:
        merged = [_merge(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            merged.append(level[-1])
        level = merged
    return level[0]


def target_exceedance(qos):
    """Exceedance rate a capacity sized with ``qos`` should show."""
    if qos.convention is Convention.TWO_SIDED:
        return qos.epsilon / 2.0
    return qos.epsilon


def run(sim, workers=1):
    """
    Run a Monte Carlo experiment.

    Args:
        sim (SimRun): The experiment
        workers (int): Threads used to draw blocks; does not affect the result

    Returns:
        SimSummary: Sample mean, sample standard deviation, exceedance rate
            and largest aggregate observed
    """
    if workers < 1:
        raise InputDomainError(f"workers must be >= 1, got {workers!r}")

    slots = block_slots(sim.model)
    sizes = [slots] * (sim.trials // slots)
    if sim.trials % slots:
        sizes.append(sim.trials % slots)

    logger.info("Simulating %d slots of %d sources in %d blocks on %d worker(s)",
                sim.trials, sim.model.n, len(sizes), workers)
    started = time.perf_counter()

    if workers == 1:
        partials = [_simulate_block(sim, index, size) for index, size in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda item: _simulate_block(sim, *item), enumerate(sizes)))

    total = _tree_reduce(partials)
    stddev = math.sqrt(total.m2 / (total.count - 1)) if total.count > 1 else 0.0

    summary = SimSummary(
        mean=total.mean,
        stddev=stddev,
        exceedance_rate=total.exceed / total.count,
        max_observed=total.maximum,
        trials=total.count,
    )
    logger.info("Simulation finished in %.2f seconds: mean=%g stddev=%g exceedance=%g",
                time.perf_counter() - started, summary.mean, summary.stddev, summary.exceedance_rate)
    return summary
