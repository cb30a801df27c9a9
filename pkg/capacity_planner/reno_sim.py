"""
TCP Reno congestion-control module for the capacity planner.

This module provides the four congestion control algorithms (slow start,
congestion avoidance, fast retransmit, fast recovery) as pure transitions on
a RenoState, and a round-based simulator that drives them over a path with
independent per-segment losses.

Round model:
    - each round lasts one RTT and sends floor(min(cwnd, rwnd, bottleneck) / SMSS)
      segments, each lost independently with probability p;
    - segments ahead of the first loss are acknowledged one ACK each;
    - when at least three segments after the first loss arrive, their
      duplicate ACKs trigger fast retransmit / fast recovery and a new ACK
      for the whole window ends recovery;
    - otherwise the loss is detected by the retransmission timer, which
      costs RTO_SILENT_ROUNDS silent rounds and a restart in slow start.
"""

import csv
import enum
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from . import constants
from .errors import InputDomainError

logger = logging.getLogger(__name__)


class Phase(str, enum.Enum):
    SLOW_START = "slow-start"
    CONGESTION_AVOIDANCE = "congestion-avoidance"
    FAST_RECOVERY = "fast-recovery"


def phase_for(cwnd, ssthresh):
    """Slow start below ssthresh, congestion avoidance at or above it."""
    return Phase.SLOW_START if cwnd < ssthresh else Phase.CONGESTION_AVOIDANCE


@dataclass(frozen=True)
class RenoState:
    """
    Congestion state of a TCP sender. Window sizes are in bytes.

    Attributes:
        cwnd (float): Congestion window
        ssthresh (float): Slow start threshold
        smss (int): Sender maximum segment size
        rwnd (float): Receiver advertised window
        flight_size (float): Bytes sent and not yet acknowledged
        dup_acks (int): Consecutive duplicate ACKs
        phase (Phase): Algorithm in charge of cwnd
        retransmits (int): Segments retransmitted so far
        timeouts (int): Retransmission timer expiries so far
    """

    cwnd: float
    ssthresh: float
    smss: int
    rwnd: float = math.inf
    flight_size: float = 0.0
    dup_acks: int = 0
    phase: Phase = Phase.SLOW_START
    retransmits: int = 0
    timeouts: int = 0

    @classmethod
    def initial(cls, smss, rwnd=math.inf):
        """
        State of a fresh connection.

        cwnd starts at the initial window and ssthresh at the advertised
        window, the largest window the receiver allows.
        """
        if not rwnd > 0:
            raise InputDomainError(f"rwnd must be > 0, got {rwnd!r}")
        cwnd = initial_window(smss)
        return cls(cwnd=cwnd, ssthresh=rwnd, smss=smss, rwnd=rwnd, phase=phase_for(cwnd, rwnd))

    @property
    def send_window(self):
        return min(self.cwnd, self.rwnd)


def initial_window(smss):
    """
    Initial congestion window for a segment size.

    Args:
        smss (int): Sender maximum segment size in bytes

    Returns:
        int: 2 * SMSS above 2190 bytes, 3 * SMSS above 1095 bytes, else 4 * SMSS
    """
    if not smss > 0:
        raise InputDomainError(f"smss must be > 0, got {smss!r}")
    if smss > 2190:
        segments = 2
    elif smss > 1095:
        segments = 3
    else:
        segments = 4
    return segments * smss


def loss_threshold(flight_size, smss):
    """ssthresh after a loss: max(FlightSize / 2, 2 * SMSS)."""
    return max(flight_size / 2, 2 * smss)


def on_ack(state, newly_acked):
    """
    Apply an ACK acknowledging ``newly_acked`` new bytes.

    In slow start cwnd grows by min(N, SMSS); in congestion avoidance by
    SMSS * SMSS / cwnd. An ACK arriving in fast recovery deflates cwnd to
    ssthresh and returns to congestion avoidance.

    Args:
        state (RenoState): Current state
        newly_acked (float): Bytes acknowledged by this ACK

    Returns:
        RenoState: The new state
    """
    if newly_acked < 0:
        raise InputDomainError(f"newly_acked must be >= 0, got {newly_acked!r}")

    flight_size = max(0.0, state.flight_size - newly_acked)

    if state.phase is Phase.FAST_RECOVERY:
        return replace(
            state,
            cwnd=state.ssthresh,
            flight_size=flight_size,
            dup_acks=0,
            phase=Phase.CONGESTION_AVOIDANCE,
        )

    cwnd = state.cwnd
    if newly_acked > 0:
        if state.phase is Phase.SLOW_START:
            cwnd += min(newly_acked, state.smss)
        else:
            cwnd += state.smss * state.smss / cwnd

    return replace(
        state,
        cwnd=cwnd,
        flight_size=flight_size,
        dup_acks=0,
        phase=phase_for(cwnd, state.ssthresh),
    )


def ack_segments(state, count):
    """
    Apply ``count`` ACKs of one full segment each.

    Equivalent to calling on_ack(state, state.smss) ``count`` times, with the
    window arithmetic kept in locals and a single new state built at the end.
    """
    if count < 0:
        raise InputDomainError(f"count must be >= 0, got {count!r}")
    if count == 0:
        return state
    if state.phase is Phase.FAST_RECOVERY:
        state = on_ack(state, state.smss)
        count -= 1

    smss = state.smss
    ssthresh = state.ssthresh
    cwnd = state.cwnd
    flight_size = state.flight_size
    for _ in range(count):
        if cwnd < ssthresh:
            cwnd += smss
        else:
            cwnd += smss * smss / cwnd
        flight_size = max(0.0, flight_size - smss)

    return replace(
        state,
        cwnd=cwnd,
        flight_size=flight_size,
        dup_acks=0,
        phase=phase_for(cwnd, ssthresh),
    )


def on_dup_ack(state):
    """
    Apply a duplicate ACK.

    The third duplicate triggers fast retransmit: ssthresh drops to
    max(FlightSize / 2, 2 * SMSS), the missing segment is resent and fast
    recovery starts with cwnd = ssthresh + 3 * SMSS. Each further duplicate
    during recovery inflates cwnd by SMSS.
    """
    dup_acks = state.dup_acks + 1

    if state.phase is Phase.FAST_RECOVERY:
        return replace(state, cwnd=state.cwnd + state.smss, dup_acks=dup_acks)

    if dup_acks == constants.DUP_ACK_THRESHOLD:
        ssthresh = loss_threshold(state.flight_size, state.smss)
        return replace(
            state,
            ssthresh=ssthresh,
            cwnd=ssthresh + constants.DUP_ACK_THRESHOLD * state.smss,
            dup_acks=dup_acks,
            phase=Phase.FAST_RECOVERY,
            retransmits=state.retransmits + 1,
        )

    return replace(state, dup_acks=dup_acks)


def on_timeout(state):
    """
    Apply a retransmission timer expiry.

    ssthresh drops to max(FlightSize / 2, 2 * SMSS), cwnd restarts at one
    segment in slow start and the oldest outstanding segment is resent.
    flight_size is left to the caller.
    """
    return replace(
        state,
        ssthresh=loss_threshold(state.flight_size, state.smss),
        cwnd=float(state.smss),
        dup_acks=0,
        phase=Phase.SLOW_START,
        retransmits=state.retransmits + 1,
        timeouts=state.timeouts + 1,
    )


@dataclass(frozen=True)
class PathConfig:
    """
    A simulated single-bottleneck path.

    Attributes:
        rtt (float): Round-trip time in seconds
        loss_p (float): Independent per-segment loss probability
        duration (int): Number of RTT rounds to simulate
        seed (int): Base seed of the loss stream
        rwnd (float): Receiver advertised window in bytes
        bottleneck (float, optional): Rate cap in bits/s
        smss (int): Sender maximum segment size in bytes
    """

    rtt: float
    loss_p: float
    duration: int
    seed: int = 0
    rwnd: float = math.inf
    bottleneck: Optional[float] = None
    smss: int = constants.DEFAULT_SMSS

    def __post_init__(self):
        if not self.rtt > 0:
            raise InputDomainError(f"rtt must be > 0, got {self.rtt!r}")
        if not 0 <= self.loss_p < 1:
            raise InputDomainError(f"loss probability must lie in [0, 1), got {self.loss_p!r}")
        if int(self.duration) != self.duration or self.duration < 1:
            raise InputDomainError(f"duration must be an integer >= 1, got {self.duration!r}")
        if not self.rwnd > 0:
            raise InputDomainError(f"rwnd must be > 0, got {self.rwnd!r}")
        if self.bottleneck is not None and not (self.bottleneck > 0 and math.isfinite(self.bottleneck)):
            raise InputDomainError(f"bottleneck must be finite and > 0, got {self.bottleneck!r}")
        if not self.smss > 0:
            raise InputDomainError(f"smss must be > 0, got {self.smss!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise InputDomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.rwnd < self.smss:
            raise InputDomainError(f"rwnd must hold at least one segment of {self.smss} bytes, got {self.rwnd!r}")
        if self.round_cap < self.smss:
            raise InputDomainError(
                f"bottleneck must carry at least one segment per rtt, got {self.round_cap!r} bytes per round")
        if self.loss_p == 0 and math.isinf(self.rwnd) and self.bottleneck is None:
            raise InputDomainError("a lossless path needs a finite rwnd or a bottleneck")

    @property
    def round_cap(self):
        """Bytes per round the bottleneck lets through."""
        if self.bottleneck is None:
            return math.inf
        return self.bottleneck * self.rtt / 8


@dataclass(frozen=True)
class CwndSample:
    round: int
    cwnd: float
    event: str
    sent: float


@dataclass(frozen=True)
class LossEvent:
    round: int
    kind: str
    flight_size: float
    ssthresh: float
    smss: int


@dataclass(frozen=True)
class TraceSummary:
    """
    Outcome of one simulation.

    Attributes:
        delivered (float): Bytes acknowledged in order
        throughput (float): 8 * delivered / (duration * rtt), bits/s
        retransmits (int): Segments retransmitted
        timeouts (int): Retransmission timer expiries
        cwnd_trace (tuple): One CwndSample per round, cwnd at round start
        loss_events (tuple): One LossEvent per fast retransmit or timeout
        segments_sent (int): Segments put on the wire (retransmissions excluded)
        segments_lost (int): Segments dropped by the path
    """

    delivered: float
    throughput: float
    retransmits: int
    timeouts: int
    cwnd_trace: Tuple[CwndSample, ...] = field(repr=False)
    loss_events: Tuple[LossEvent, ...] = field(repr=False)
    segments_sent: int = 0
    segments_lost: int = 0

    @property
    def mean_segments_between_losses(self):
        if self.segments_lost == 0:
            return math.inf
        return self.segments_sent / self.segments_lost


def run(config):
    """
    Simulate a Reno sender over a lossy path.

    Args:
        config (PathConfig): The path and run length

    Returns:
        TraceSummary: Delivered bytes, throughput, counters and traces
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed)))
    smss = config.smss
    state = RenoState.initial(smss, config.rwnd)

    delivered = 0.0
    segments_sent = 0
    segments_lost = 0
    silent_rounds = 0
    trace = []
    events = []
    started = time.perf_counter()

    for rnd in range(config.duration):
        if silent_rounds:
            silent_rounds -= 1
            trace.append(CwndSample(rnd, state.cwnd, "rto-wait", 0.0))
            continue

        cwnd_at_start = state.cwnd
        window = min(state.send_window, config.round_cap)
        segments = int(window // smss)
        lost = rng.random(segments) < config.loss_p if config.loss_p > 0 else np.zeros(segments, dtype=bool)
        n_lost = int(np.count_nonzero(lost))
        segments_sent += segments
        segments_lost += n_lost
        state = replace(state, flight_size=float(segments * smss))

        if n_lost == 0:
            state = ack_segments(state, segments)
            delivered += segments * smss
            trace.append(CwndSample(rnd, cwnd_at_start, "", float(segments * smss)))
            continue

        first = int(np.argmax(lost))
        state = ack_segments(state, first)
        delivered += first * smss

        # ACK clocking has refilled the pipe by the time the loss is detected
        state = replace(state, flight_size=float(segments * smss))
        survivors = segments - first - n_lost

        if survivors >= constants.DUP_ACK_THRESHOLD:
            flight_size = state.flight_size
            for _ in range(survivors):
                state = on_dup_ack(state)
            events.append(LossEvent(rnd, "fast-retransmit", flight_size, state.ssthresh, smss))
            # The remaining holes are repaired within the same recovery
            state = replace(state, retransmits=state.retransmits + n_lost - 1)
            state = on_ack(state, state.flight_size)
            delivered += (segments - first) * smss
            event = "fast-retransmit"
        else:
            flight_size = state.flight_size
            state = on_timeout(state)
            state = replace(state, flight_size=0.0)
            events.append(LossEvent(rnd, "timeout", flight_size, state.ssthresh, smss))
            silent_rounds = constants.RTO_SILENT_ROUNDS
            event = "timeout"

        logger.debug("round %d: %s, %d/%d segments lost, ssthresh=%g",
                     rnd, event, n_lost, segments, state.ssthresh)
        trace.append(CwndSample(rnd, cwnd_at_start, event, float(segments * smss)))

    throughput = 8 * delivered / (config.duration * config.rtt)
    logger.info("Simulated %d rounds in %.2f seconds: %s, %d retransmits, %d timeouts",
                config.duration, time.perf_counter() - started,
                f"{throughput:.6g} bit/s", state.retransmits, state.timeouts)

    return TraceSummary(
        delivered=delivered,
        throughput=throughput,
        retransmits=state.retransmits,
        timeouts=state.timeouts,
        cwnd_trace=tuple(trace),
        loss_events=tuple(events),
        segments_sent=segments_sent,
        segments_lost=segments_lost,
    )


def sweep(configs, workers=1):
    """
    Run independent simulations, optionally in a process pool.

    Args:
        configs (list of PathConfig): Simulations to run
        workers (int): Worker processes; 1 runs serially

    Returns:
        list of TraceSummary: Results in input order
    """
    configs = list(configs)
    if workers < 1:
        raise InputDomainError(f"workers must be >= 1, got {workers!r}")
    logger.info("Running %d simulations on %d worker(s)", len(configs), workers)
    if workers == 1 or len(configs) < 2:
        return [run(config) for config in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, configs))


def median_throughput(summaries):
    return statistics.median(summary.throughput for summary in summaries)


def write_trace_csv(summary, path):
    """
    Write the per-round congestion window trace as CSV.

    Args:
        summary (TraceSummary): Simulation result
        path (str): Output file

    Returns:
        str: The path written
    """
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["round", "cwnd_bytes", "event"])
        for sample in summary.cwnd_trace:
            writer.writerow([sample.round, repr(float(sample.cwnd)), sample.event])
    logger.info("Congestion window trace written to %s", path)
    return path
