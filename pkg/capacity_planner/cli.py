#!/usr/bin/env python
"""
Command-line interface for the capacity planner.

This module provides the command-line interface for running the capacity
planner calculators, simulators and audits.

Exit codes: 0 success, 1 fabric audit found violations, 2 invalid input or
file. Errors are reported as a single "error: <code>: <message>" line on
stderr.
"""

import argparse
import logging
import math
import sys

from . import constants
from . import ether_calc
from . import fabric_plan
from . import reno_sim
from . import stat_mux
from . import traffic_sim
from . import transport_calc
from .errors import CapacityPlannerError, InputDomainError
from .report_generator import OUTPUT_FORMATS, Report, ReportGenerator
from .utils import (
    format_bytes,
    format_count,
    format_number,
    format_rate,
    format_ratio,
    format_seconds,
    parse_quantity,
)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_INVALID = 2


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors fit on one line."""

    def error(self, message):
        print(f"error: usage: {message}", file=sys.stderr)
        sys.exit(EXIT_INVALID)


def main(argv=None):
    """Main entry point for the command-line interface."""
    common = _Parser(add_help=False)
    common.add_argument("--format", "-f", choices=OUTPUT_FORMATS, default="table", help="Output format")
    common.add_argument("--verbose", "-v", action="count", default=0, help="Log progress (-vv for debug)")

    parser = _Parser(prog="capacity-planner", description="Network capacity planning calculators and simulators")

    # Create subparsers for different commands
    subparsers = parser.add_subparsers(dest='command', help='Commands')

    stat_parser = subparsers.add_parser('stat', parents=[common], help='Size a link for n on/off sources')
    add_stat_arguments(stat_parser)
    stat_parser.set_defaults(func=stat_command)

    frames_parser = subparsers.add_parser('frames', parents=[common], help='Ethernet frame rate and goodput')
    add_frames_arguments(frames_parser)
    frames_parser.set_defaults(func=frames_command)

    goodput_parser = subparsers.add_parser('goodput', parents=[common], help='TCP/IP or UDP/IP goodput over Ethernet')
    add_goodput_arguments(goodput_parser)
    goodput_parser.set_defaults(func=goodput_command)

    mathis_parser = subparsers.add_parser('mathis', parents=[common], help='Loss-limited TCP throughput')
    add_mathis_arguments(mathis_parser)
    mathis_parser.set_defaults(func=mathis_command)

    tcp_parser = subparsers.add_parser('tcp-sim', parents=[common], help='Simulate a TCP Reno sender on a lossy path')
    add_tcp_sim_arguments(tcp_parser)
    tcp_parser.set_defaults(func=tcp_sim_command)

    fabric_parser = subparsers.add_parser('fabric', parents=[common], help='Audit a topology against over-subscription ratios')
    add_fabric_arguments(fabric_parser)
    fabric_parser.set_defaults(func=fabric_command)

    args = parser.parse_args(argv)

    if not hasattr(args, 'func'):
        parser.print_help(sys.stderr)
        return EXIT_INVALID

    configure_logging(args.verbose)

    try:
        report, status = args.func(args)
    except CapacityPlannerError as e:
        print(f"error: {e.code}: {e}", file=sys.stderr)
        return EXIT_INVALID

    sys.stdout.write(ReportGenerator(args.format).generate(report))
    return status


def configure_logging(verbosity):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _quantity(text):
    try:
        return parse_quantity(text)
    except InputDomainError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _whole(text):
    value = _quantity(text)
    if not float(value).is_integer():
        raise argparse.ArgumentTypeError(f"not a whole number: {text!r}")
    return int(value)


def _positive_whole(text):
    value = _whole(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {text!r}")
    return value


def _link(text):
    try:
        if text in constants.LINK_PRESETS:
            return ether_calc.LinkRate.preset(text)
        return ether_calc.LinkRate(parse_quantity(text))
    except InputDomainError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _tcp_options(text):
    if text in constants.TCP_OPTION_PRESETS:
        return constants.TCP_OPTION_PRESETS[text]
    return _whole(text)


def add_stat_arguments(parser):
    """Add arguments for the stat command."""
    parser.add_argument("--sources", "-n", type=_whole, required=True, help="Number of on/off sources")
    parser.add_argument("--rate", "-r", type=_quantity, required=True, help="Peak rate per source (bits/s, k/M/G suffixes)")
    parser.add_argument("--epsilon", "-e", type=float, default=0.01, help="Exceedance budget")
    parser.add_argument("--period", type=float, default=1.0, help="Burst period T in seconds")
    parser.add_argument("--one-sided", action="store_true", help="Use the one-sided normal quantile")
    parser.add_argument("--link-capacity", type=_quantity, help="Report how many sources fit this link")
    parser.add_argument("--validate", action="store_true", help="Check the sizing with a Monte Carlo run")
    parser.add_argument("--trials", type=_positive_whole, default=constants.DEFAULT_TRIALS, help="Monte Carlo slots")
    parser.add_argument("--seed", type=_whole, default=0, help="Monte Carlo seed")
    parser.add_argument("--workers", type=_positive_whole, default=1, help="Monte Carlo worker threads")


def add_frames_arguments(parser):
    """Add arguments for the frames command."""
    parser.add_argument("--link", "-l", type=_link, required=True, help="Link rate in bits/s or preset (GigE, 10GigE, ...)")
    parser.add_argument("--payload", "-p", type=_whole, required=True, help="Ethernet payload in bytes")
    parser.add_argument("--vlan", type=_whole, default=0, help="Number of 802.1Q tags")
    parser.add_argument("--jumbo", action="store_true", help="Allow payloads up to 9000 bytes")


def add_goodput_arguments(parser):
    """Add arguments for the goodput command."""
    parser.add_argument("--link", "-l", type=_link, required=True, help="Link rate in bits/s or preset")
    parser.add_argument("--payload", "-p", type=_whole, required=True, help="Ethernet payload in bytes")
    parser.add_argument("--proto", choices=[protocol.value for protocol in transport_calc.Protocol], default="tcp")
    parser.add_argument("--options", type=_tcp_options, default=0, help="TCP option bytes or preset (none, timestamps)")
    parser.add_argument("--vlan", type=_whole, default=0, help="Number of 802.1Q tags")
    parser.add_argument("--jumbo", action="store_true", help="Allow payloads up to 9000 bytes")


def add_mathis_arguments(parser):
    """Add arguments for the mathis command."""
    parser.add_argument("--mss", type=_quantity, required=True, help="Maximum segment size in bytes")
    parser.add_argument("--rtt", type=float, required=True, help="Round-trip time in seconds")
    parser.add_argument("--loss", type=float, required=True, help="Segment loss probability")
    parser.add_argument("--window", type=_quantity, help="Window size in bytes for the window-limited rate")
    parser.add_argument("--target", type=_quantity, help="Throughput to reach; reports the loss rate it tolerates")


def add_tcp_sim_arguments(parser):
    """Add arguments for the tcp-sim command."""
    parser.add_argument("--smss", type=_whole, default=constants.DEFAULT_SMSS, help="Sender maximum segment size")
    parser.add_argument("--rtt", type=float, required=True, help="Round-trip time in seconds")
    parser.add_argument("--loss", type=float, required=True, help="Per-segment loss probability")
    parser.add_argument("--rounds", type=_positive_whole, default=5000, help="Number of RTT rounds")
    parser.add_argument("--seed", type=_whole, default=0, help="Loss stream seed")
    parser.add_argument("--rwnd", type=_quantity, default=math.inf, help="Receiver window in bytes (default unbounded)")
    parser.add_argument("--bottleneck", type=_quantity, help="Bottleneck rate in bits/s")
    parser.add_argument("--seeds", type=_positive_whole, default=1, help="Run this many consecutive seeds and report the median")
    parser.add_argument("--workers", type=_positive_whole, default=1, help="Worker processes for --seeds")
    parser.add_argument("--trace", help="Write the congestion window trace of the first run as CSV")


def add_fabric_arguments(parser):
    """Add arguments for the fabric command."""
    parser.add_argument("--topology", "-t", required=True, help="Topology JSON file")
    parser.add_argument("--policy", help="Policy JSON file overriding the default ratios")


def stat_command(args):
    """Run the statistical over-subscription sizing."""
    convention = stat_mux.Convention.ONE_SIDED if args.one_sided else stat_mux.Convention.TWO_SIDED
    model = stat_mux.SourceModel(args.sources, args.rate, args.period)
    qos = stat_mux.QosSpec.from_epsilon(args.epsilon, convention)
    estimate = stat_mux.stat_capacity(model, qos)

    report = Report("stat", "Statistical over-subscription")
    report.add("sources", model.n, "count", format_count(model.n))
    report.add("peak_rate", model.rate, "bit/s", format_rate(model.rate))
    report.add("epsilon", qos.epsilon, "probability", format_number(qos.epsilon))
    report.add("convention", qos.convention.value, "", qos.convention.value)
    report.add("c_epsilon", qos.c_epsilon, "", format_number(qos.c_epsilon, 10))
    report.add("c_max", estimate.c_max, "bit/s", format_rate(estimate.c_max))
    report.add("c_mean", estimate.c_mean, "bit/s", format_rate(estimate.c_mean))
    report.add("s_max", estimate.s_max, "bit/s", format_rate(estimate.s_max))
    report.add("c_stat", estimate.c_stat, "bit/s", format_rate(estimate.c_stat))
    report.add("oversubscription", estimate.oversubscription, "ratio", format_ratio(round(estimate.oversubscription, 2)))

    if args.link_capacity is not None:
        fits = stat_mux.max_sources(args.link_capacity, model.rate, qos)
        report.add("max_sources", fits, "count", format_count(fits))

    if args.validate:
        sim = traffic_sim.SimRun(model, trials=args.trials, seed=args.seed, capacity=estimate.c_stat)
        summary = traffic_sim.run(sim, workers=args.workers)
        report.add("sim_trials", summary.trials, "count", format_count(summary.trials))
        report.add("sim_mean", summary.mean, "bit/s", format_rate(summary.mean))
        report.add("sim_stddev", summary.stddev, "bit/s", format_rate(summary.stddev))
        report.add("sim_max", summary.max_observed, "bit/s", format_rate(summary.max_observed))
        report.add("exceedance_rate", summary.exceedance_rate, "probability", format_number(summary.exceedance_rate, 4))
        target = traffic_sim.target_exceedance(qos)
        report.add("target_exceedance", target, "probability", format_number(target, 4))

    return report, EXIT_OK


def frames_command(args):
    """Run the Ethernet frame rate calculation."""
    link = args.link
    size = ether_calc.frame_physical_size(args.payload, args.vlan, args.jumbo)
    fps = ether_calc.max_frames_per_second(link, args.payload, args.vlan, args.jumbo)
    with_crc = ether_calc.ethernet_goodput(link, args.payload, args.vlan, include_crc=True, jumbo=args.jumbo)
    without_crc = ether_calc.ethernet_goodput(link, args.payload, args.vlan, include_crc=False, jumbo=args.jumbo)
    efficiency = ether_calc.wire_efficiency(args.payload, args.vlan, args.jumbo)
    gap = ether_calc.interframe_gap_time(link)

    report = Report("frames", "Ethernet frame rate")
    report.add("link_rate", link.rate, "bit/s", format_rate(link.rate))
    report.add("payload", args.payload, "B", format_bytes(args.payload))
    report.add("vlan_tags", args.vlan, "count", format_count(args.vlan))
    report.add("physical_size", size, "B", format_bytes(size))
    report.add("frames_per_second", fps.frames, "frame/s", format_count(fps.frames, "f/s"))
    report.add("frames_per_second_exact", fps.exact, "frame/s", format_number(fps.exact, 12))
    report.add("goodput_with_crc", with_crc, "bit/s", format_rate(with_crc))
    report.add("goodput_without_crc", without_crc, "bit/s", format_rate(without_crc))
    report.add("wire_efficiency", efficiency, "ratio", f"{efficiency:.2%}")
    report.add("interframe_gap_time", gap, "s", format_seconds(gap))
    return report, EXIT_OK


def goodput_command(args):
    """Run the transport goodput calculation."""
    if args.proto == transport_calc.Protocol.UDP.value:
        if args.options:
            raise InputDomainError("UDP carries no TCP options")
        spec = transport_calc.TransportSpec.udp()
    else:
        spec = transport_calc.TransportSpec.tcp(args.options)

    data = spec.application_bytes(args.payload)
    fps = ether_calc.max_frames_per_second(args.link, args.payload, args.vlan, args.jumbo)
    goodput = transport_calc.transport_goodput(args.link, args.payload, spec, args.vlan, args.jumbo)

    report = Report("goodput", f"{spec.protocol.value.upper()}/IP goodput")
    report.add("link_rate", args.link.rate, "bit/s", format_rate(args.link.rate))
    report.add("payload", args.payload, "B", format_bytes(args.payload))
    report.add("protocol", spec.protocol.value, "", spec.protocol.value)
    report.add("tcp_options", spec.tcp_options, "B", format_bytes(spec.tcp_options))
    report.add("header_size", spec.header_size, "B", format_bytes(spec.header_size))
    report.add("application_bytes", data, "B", format_bytes(data))
    report.add("frames_per_second", fps.frames, "frame/s", format_count(fps.frames, "f/s"))
    report.add("goodput", goodput, "bit/s", format_rate(goodput))
    return report, EXIT_OK


def mathis_command(args):
    """Run the loss-based TCP throughput model."""
    path = transport_calc.PathModel(mss=args.mss, rtt=args.rtt, loss_p=args.loss)
    window = transport_calc.mathis_window(path.loss_p)
    throughput = transport_calc.mathis_throughput(path)

    report = Report("mathis", "Loss-limited TCP throughput")
    report.add("mss", path.mss, "B", format_bytes(path.mss))
    report.add("rtt", path.rtt, "s", format_seconds(path.rtt))
    report.add("loss", path.loss_p, "probability", format_number(path.loss_p))
    report.add("mathis_window", window, "segment", f"{window:.2f} segments")
    report.add("mathis_throughput", throughput, "bit/s", format_rate(throughput))

    if args.window is not None:
        rate = transport_calc.window_throughput(args.window, path.rtt)
        report.add("window_throughput", rate, "bit/s", format_rate(rate))
        limit = min(rate, throughput)
        report.add("throughput_limit", limit, "bit/s", format_rate(limit))

    if args.target is not None:
        loss = transport_calc.mathis_loss_rate(path.mss, path.rtt, args.target)
        bdp = transport_calc.bandwidth_delay_product(args.target, path.rtt)
        report.add("target", args.target, "bit/s", format_rate(args.target))
        report.add("max_loss_for_target", loss, "probability", format_number(loss))
        report.add("window_for_target", bdp, "B", format_bytes(round(bdp)))

    return report, EXIT_OK


def tcp_sim_command(args):
    """Run the TCP Reno simulator."""
    configs = [
        reno_sim.PathConfig(
            rtt=args.rtt,
            loss_p=args.loss,
            duration=args.rounds,
            seed=args.seed + offset,
            rwnd=args.rwnd,
            bottleneck=args.bottleneck,
            smss=args.smss,
        )
        for offset in range(args.seeds)
    ]
    summaries = reno_sim.sweep(configs, workers=args.workers)
    first = summaries[0]

    if args.trace:
        try:
            reno_sim.write_trace_csv(first, args.trace)
        except OSError as e:
            raise InputDomainError(f"cannot write trace {args.trace}: {e.strerror}") from None

    report = Report("tcp-sim", "TCP Reno simulation")
    report.add("smss", args.smss, "B", format_bytes(args.smss))
    report.add("rtt", args.rtt, "s", format_seconds(args.rtt))
    report.add("loss", args.loss, "probability", format_number(args.loss))
    report.add("rounds", args.rounds, "count", format_count(args.rounds))

    if len(summaries) == 1:
        report.add("delivered", first.delivered, "B", format_bytes(first.delivered))
        report.add("throughput", first.throughput, "bit/s", format_rate(first.throughput))
        report.add("retransmits", first.retransmits, "count", format_count(first.retransmits))
        report.add("timeouts", first.timeouts, "count", format_count(first.timeouts))
        report.add("loss_events", len(first.loss_events), "count", format_count(len(first.loss_events)))
        between = first.mean_segments_between_losses
        report.add("segments_between_losses", between, "segment", format_number(between))
        throughput = first.throughput
    else:
        throughput = reno_sim.median_throughput(summaries)
        report.add("seeds", len(summaries), "count", format_count(len(summaries)))
        report.add("median_throughput", throughput, "bit/s", format_rate(throughput))
        report.add_records({
            "seed": config.seed,
            "throughput": summary.throughput,
            "retransmits": summary.retransmits,
            "timeouts": summary.timeouts,
        } for config, summary in zip(configs, summaries))

    if 0 < args.loss < 1:
        model = transport_calc.mathis_throughput(transport_calc.PathModel(args.smss, args.rtt, args.loss))
        report.add("mathis_throughput", model, "bit/s", format_rate(model))
        report.add("simulated_to_model", throughput / model, "ratio", f"{throughput / model:.3f}")

    return report, EXIT_OK


def fabric_command(args):
    """Run the fabric over-subscription audit."""
    topology = fabric_plan.load_topology(args.topology)
    policy = fabric_plan.load_policy(args.policy) if args.policy else fabric_plan.FabricPolicy()
    audit = fabric_plan.audit(topology, policy)

    report = Report("fabric", "Fabric over-subscription audit")
    report.add("groups", len(audit.groups), "count", format_count(len(audit.groups)))
    report.add("violations", len(audit.violations), "count", format_count(len(audit.violations)))
    report.add("orphans", len(audit.orphans), "count", ", ".join(audit.orphans) or "0")
    if audit.fabric is not None:
        report.add("clos_verdict", audit.fabric.value, "", audit.fabric.value)
        report.add("strict_sense_nonblocking", audit.strict_sense, "", "yes" if audit.strict_sense else "no")

    report.add_records({
        "node": group.node,
        "tier": group.tier.value,
        "upper_tier": group.upper_tier.value,
        "downstream_bps": float(group.downstream),
        "upstream_bps": float(group.upstream),
        "ratio": float(group.ratio),
        "ratio_display": format_ratio(group.ratio),
        "threshold": format_ratio(group.threshold),
        "verdict": group.verdict.value,
    } for group in audit.groups)

    return report, EXIT_OK if audit.ok else EXIT_VIOLATIONS


if __name__ == "__main__":
    sys.exit(main())
