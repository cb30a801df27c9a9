"""
Fabric planning module for the capacity planner.

This module audits tiered topologies (Three-Tier access / distribution /
core, server farms, Leaf-Spine) against over-subscription thresholds and
evaluates Clos non-blocking conditions. Ratios are computed with exact
rational arithmetic so that a link group sitting exactly on a threshold is
accepted and anything above it is rejected.

For small Clos instances, route_permutation searches for a middle-stage
assignment of every connection of a permutation, which gives an
independent check of the k >= n rule.
"""

import enum
import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from . import constants
from .errors import InputDomainError, PolicyError, TopologyError
from .utils import to_fraction

logger = logging.getLogger(__name__)


class Tier(str, enum.Enum):
    ACCESS = "access"
    DISTRIBUTION = "distribution"
    CORE = "core"
    SERVER_ACCESS = "server-access"
    LEAF = "leaf"
    SPINE = "spine"


# Height of each tier; links between equal heights are not audited
TIER_RANK = {
    Tier.ACCESS: 0,
    Tier.SERVER_ACCESS: 0,
    Tier.LEAF: 0,
    Tier.DISTRIBUTION: 1,
    Tier.SPINE: 1,
    Tier.CORE: 2,
}

POLICY_PAIRS = {
    (Tier.ACCESS, Tier.DISTRIBUTION): "access_distribution",
    (Tier.DISTRIBUTION, Tier.CORE): "distribution_core",
    (Tier.SERVER_ACCESS, Tier.CORE): "server_core",
    (Tier.LEAF, Tier.SPINE): "leaf_spine",
}

UPLINK_TIERS = frozenset(lower for lower, _ in POLICY_PAIRS)


class Verdict(str, enum.Enum):
    OK = "ok"
    VIOLATION = "violation"


class FabricVerdict(str, enum.Enum):
    NON_BLOCKING = "non-blocking"
    ACCEPTABLE = "acceptable-oversubscribed"
    BLOCKING = "blocking"


def _positive(value, what, error=TopologyError):
    try:
        number = to_fraction(value)
    except InputDomainError:
        raise error(f"{what} must be a number, got {value!r}") from None
    if number <= 0:
        raise error(f"{what} must be > 0, got {value!r}")
    return number


def _count(value, what, error=TopologyError):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise error(f"{what} must be an integer >= 1, got {value!r}")
    return value


def _check_keys(data, allowed, required, where, error=TopologyError):
    if not isinstance(data, dict):
        raise error(f"{where} must be an object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise error(f"unknown key(s) in {where}: {', '.join(unknown)}")
    missing = sorted(set(required) - set(data))
    if missing:
        raise error(f"missing key(s) in {where}: {', '.join(missing)}")


@dataclass(frozen=True)
class Port:
    """A group of identical ports or links: ``count`` times ``bps``."""

    bps: Fraction
    count: int = 1

    @property
    def capacity(self):
        return self.bps * self.count


@dataclass(frozen=True)
class Node:
    id: str
    tier: Tier
    edge_ports: Tuple[Port, ...] = ()


@dataclass(frozen=True)
class Link:
    source: str
    target: str
    bps: Fraction
    count: int = 1

    @property
    def capacity(self):
        return self.bps * self.count


@dataclass(frozen=True)
class ClosParams:
    """
    A three-stage Clos / Leaf-Spine fabric.

    Attributes:
        n (int): Input ports per ingress switch
        r (int): Ingress (and egress) switch count
        k (int): Middle-stage switch count
        uplink_bps (Fraction): Speed i of each uplink, one per middle switch
        downlink_bps (Fraction): Speed j of each input port
    """

    n: int
    r: int
    k: int
    uplink_bps: Fraction
    downlink_bps: Fraction

    def __post_init__(self):
        for name in ("n", "r", "k"):
            _count(getattr(self, name), f"clos {name}", InputDomainError)
        object.__setattr__(self, "uplink_bps", _positive(self.uplink_bps, "clos uplink_bps", InputDomainError))
        object.__setattr__(self, "downlink_bps", _positive(self.downlink_bps, "clos downlink_bps", InputDomainError))


@dataclass(frozen=True)
class Topology:
    nodes: Tuple[Node, ...]
    links: Tuple[Link, ...]
    clos: Optional[ClosParams] = None

    def __post_init__(self):
        seen = set()
        for node in self.nodes:
            if node.id in seen:
                raise TopologyError(f"duplicate node id {node.id!r}")
            seen.add(node.id)
        for link in self.links:
            for end in (link.source, link.target):
                if end not in seen:
                    raise TopologyError(f"link references unknown node {end!r}")
            if link.source == link.target:
                raise TopologyError(f"link loops on node {link.source!r}")


@dataclass(frozen=True)
class FabricPolicy:
    """
    Maximum downstream:upstream ratio per tier pair.

    Defaults: 20:1 access to distribution, 4:1 distribution to core, 1:1
    server access to core, 3:1 leaf to spine.
    """

    access_distribution: Fraction = Fraction(constants.DEFAULT_POLICY["access_distribution"])
    distribution_core: Fraction = Fraction(constants.DEFAULT_POLICY["distribution_core"])
    server_core: Fraction = Fraction(constants.DEFAULT_POLICY["server_core"])
    leaf_spine: Fraction = Fraction(constants.DEFAULT_POLICY["leaf_spine"])

    def __post_init__(self):
        for key in constants.DEFAULT_POLICY:
            object.__setattr__(self, key, _positive(getattr(self, key), f"policy {key}", PolicyError))

    def threshold(self, lower, upper):
        """Threshold for a tier pair, or None when the policy has no rule for it."""
        key = POLICY_PAIRS.get((Tier(lower), Tier(upper)))
        return getattr(self, key) if key else None


@dataclass(frozen=True)
class RatioGroup:
    """Aggregated link capacities of one node towards one upper tier."""

    node: str
    tier: Tier
    upper_tier: Tier
    downstream: Fraction
    upstream: Fraction
    ratio: Fraction
    threshold: Fraction
    verdict: Verdict


@dataclass(frozen=True)
class AuditReport:
    groups: Tuple[RatioGroup, ...]
    orphans: Tuple[str, ...] = ()
    fabric: Optional[FabricVerdict] = None
    strict_sense: Optional[bool] = None
    unchecked: Tuple[Tuple[str, str], ...] = ()

    @property
    def violations(self):
        return tuple(group for group in self.groups if group.verdict is Verdict.VIOLATION)

    @property
    def ok(self):
        return not self.violations


def oversubscription_ratio(downstream, upstream):
    """
    Over-subscription ratio downstream / upstream, exact.

    Args:
        downstream: Aggregate downstream capacity in bits/s
        upstream: Aggregate upstream capacity in bits/s

    Returns:
        Fraction: The ratio
    """
    upstream = to_fraction(upstream)
    downstream = to_fraction(downstream)
    if upstream <= 0:
        raise InputDomainError("upstream capacity must be > 0 (orphaned tier)")
    if downstream < 0:
        raise InputDomainError("downstream capacity must be >= 0")
    return downstream / upstream


def audit(topology, policy=None):
    """
    Audit every node's uplinks against the policy.

    For each node the downstream capacity is its edge ports plus links from
    lower tiers; the upstream capacity is its links to each higher tier.
    Nodes of an uplink tier with downstream capacity and no uplinks are
    reported as orphans.

    Args:
        topology (Topology): The network
        policy (FabricPolicy): Thresholds, defaults when omitted

    Returns:
        AuditReport: One RatioGroup per node and upper tier
    """
    policy = policy or FabricPolicy()
    tiers = {node.id: node.tier for node in topology.nodes}
    downstream = defaultdict(Fraction)
    upstream = defaultdict(lambda: defaultdict(Fraction))

    for node in topology.nodes:
        downstream[node.id] += sum((port.capacity for port in node.edge_ports), Fraction(0))

    for link in topology.links:
        a, b = tiers[link.source], tiers[link.target]
        if TIER_RANK[a] == TIER_RANK[b]:
            logger.debug("Ignoring %s link %s-%s", a.value, link.source, link.target)
            continue
        lower, upper = (link.source, link.target) if TIER_RANK[a] < TIER_RANK[b] else (link.target, link.source)
        downstream[upper] += link.capacity
        upstream[lower][tiers[upper]] += link.capacity

    groups = []
    orphans = []
    unchecked = []
    for node in topology.nodes:
        uplinks = upstream.get(node.id)
        if not uplinks:
            if node.tier in UPLINK_TIERS and downstream[node.id] > 0:
                logger.warning("Node %s carries downstream traffic but has no uplinks", node.id)
                orphans.append(node.id)
            continue

        for upper_tier in sorted(uplinks, key=lambda tier: TIER_RANK[tier]):
            threshold = policy.threshold(node.tier, upper_tier)
            if threshold is None:
                logger.warning("No policy for %s to %s links on node %s",
                               node.tier.value, upper_tier.value, node.id)
                unchecked.append((node.id, upper_tier.value))
                continue
            ratio = oversubscription_ratio(downstream[node.id], uplinks[upper_tier])
            groups.append(RatioGroup(
                node=node.id,
                tier=node.tier,
                upper_tier=upper_tier,
                downstream=downstream[node.id],
                upstream=uplinks[upper_tier],
                ratio=ratio,
                threshold=threshold,
                verdict=Verdict.OK if ratio <= threshold else Verdict.VIOLATION,
            ))

    fabric = strict = None
    if topology.clos is not None:
        fabric = clos_nonblocking(topology.clos, policy.leaf_spine)
        strict = strictly_nonblocking(topology.clos)

    report = AuditReport(
        groups=tuple(groups),
        orphans=tuple(orphans),
        fabric=fabric,
        strict_sense=strict,
        unchecked=tuple(unchecked),
    )
    logger.info("Audited %d link group(s): %d violation(s), %d orphan(s)",
                len(report.groups), len(report.violations), len(report.orphans))
    return report


def path_oversubscription(report, node_ids):
    """
    End-to-end over-subscription along a chain of nodes.

    Args:
        report (AuditReport): Audit of the topology
        node_ids (list of str): Nodes from the edge towards the core

    Returns:
        Fraction: Product of each node's ratio towards the next tier
    """
    ratios = {}
    for group in report.groups:
        ratios.setdefault(group.node, group.ratio)
    product = Fraction(1)
    for node_id in node_ids:
        if node_id not in ratios:
            raise InputDomainError(f"node {node_id!r} has no audited uplink group")
        product *= ratios[node_id]
    return product


def clos_nonblocking(params, ratio=constants.LEAF_SPINE_PLANNING_RATIO):
    """
    Classify a Clos / Leaf-Spine fabric.

    Non-blocking when i * k >= j * n (k >= n with equal speeds), acceptably
    over-subscribed when i * k >= j * n / ratio, blocking otherwise.

    Args:
        params (ClosParams): The fabric
        ratio: Planning ratio for the acceptable band (3 by default)

    Returns:
        FabricVerdict: The verdict
    """
    ratio = to_fraction(ratio)
    if ratio <= 0:
        raise InputDomainError(f"planning ratio must be > 0, got {ratio}")
    up = params.uplink_bps * params.k
    down = params.downlink_bps * params.n
    if up >= down:
        return FabricVerdict.NON_BLOCKING
    if up * ratio >= down:
        return FabricVerdict.ACCEPTABLE
    return FabricVerdict.BLOCKING


def strictly_nonblocking(params):
    """Strict-sense non-blocking condition k >= 2n - 1."""
    return params.k >= 2 * params.n - 1


def min_spines(n, downlink_bps, uplink_bps, ratio=1):
    """
    Fewest middle-stage (spine) switches meeting a leaf over-subscription ratio.

    Args:
        n (int): Host-facing ports per leaf
        downlink_bps: Speed j of each host-facing port
        uplink_bps: Speed i of each leaf uplink
        ratio: Allowed over-subscription (1 for non-blocking)

    Returns:
        int: Smallest k with i * k * ratio >= j * n
    """
    _count(n, "n", InputDomainError)
    down = _positive(downlink_bps, "downlink_bps", InputDomainError) * n
    up = _positive(uplink_bps, "uplink_bps", InputDomainError) * _positive(ratio, "ratio", InputDomainError)
    return math.ceil(down / up)


@dataclass(frozen=True)
class RoutingResult:
    """
    Outcome of a permutation routing search.

    Attributes:
        feasible (bool): Whether every connection got a middle switch
        assignment (tuple, optional): Middle switch per input port
        witness (str, optional): Why no assignment exists
    """

    feasible: bool
    assignment: Optional[Tuple[int, ...]] = None
    witness: Optional[str] = None


def route_permutation(n, r, k, mapping):
    """
    Route a permutation through a three-stage Clos network.

    Input port p sits on ingress switch p // n and output port q on egress
    switch q // n. Each connection needs a middle switch that carries no
    other connection from the same ingress or to the same egress switch;
    the search backtracks over middle switches until every connection is
    placed or all choices are exhausted.

    Args:
        n (int): Ports per edge switch
        r (int): Ingress (and egress) switch count
        k (int): Middle switch count
        mapping (sequence of int): mapping[p] is the output port of input p

    Returns:
        RoutingResult: The assignment, or an infeasibility witness
    """
    for name, value in (("n", n), ("r", r), ("k", k)):
        _count(value, name, InputDomainError)
    ports = n * r
    if ports > constants.CLOS_ORACLE_MAX_PORTS:
        raise InputDomainError(f"n * r = {ports} exceeds the {constants.CLOS_ORACLE_MAX_PORTS} port search limit")
    mapping = tuple(mapping)
    if len(mapping) != ports or sorted(mapping) != list(range(ports)):
        raise InputDomainError(f"mapping is not a permutation of {ports} ports")

    connections = [(p // n, mapping[p] // n) for p in range(ports)]
    ingress_busy = [0] * r
    egress_busy = [0] * r
    assignment = [0] * ports

    def place(index):
        if index == ports:
            return True
        a, b = connections[index]
        busy = ingress_busy[a] | egress_busy[b]
        for middle in range(k):
            bit = 1 << middle
            if busy & bit:
                continue
            ingress_busy[a] |= bit
            egress_busy[b] |= bit
            assignment[index] = middle
            if place(index + 1):
                return True
            ingress_busy[a] &= ~bit
            egress_busy[b] &= ~bit
        return False

    if place(0):
        return RoutingResult(feasible=True, assignment=tuple(assignment))

    load = defaultdict(int)
    for a, _ in connections:
        load[a] += 1
    for switch in sorted(load):
        if load[switch] > k:
            return RoutingResult(
                feasible=False,
                witness=f"ingress switch {switch} carries {load[switch]} connections over {k} middle switch(es)",
            )
    return RoutingResult(feasible=False, witness="exhaustive search found no assignment")


def _egress_sequences(counts, length):
    if length == 0:
        yield ()
        return
    for switch, remaining in enumerate(counts):
        if remaining:
            counts[switch] -= 1
            for rest in _egress_sequences(counts, length - 1):
                yield (switch,) + rest
            counts[switch] += 1


def permutation_classes(n, r):
    """
    One representative permutation per ingress-to-egress demand pattern.

    Output ports of the same egress switch are interchangeable for routing,
    so these representatives cover every permutation of n * r ports.

    Yields:
        tuple of int: A mapping suitable for route_permutation
    """
    for sequence in _egress_sequences([n] * r, n * r):
        next_port = [switch * n for switch in range(r)]
        mapping = []
        for switch in sequence:
            mapping.append(next_port[switch])
            next_port[switch] += 1
        yield tuple(mapping)


def all_permutations_routable(n, r, k):
    """
    Exhaustively check that every permutation routes through (n, r, k).

    Returns:
        tuple: (True, None) or (False, first mapping that does not route)
    """
    for mapping in permutation_classes(n, r):
        if not route_permutation(n, r, k, mapping).feasible:
            return False, mapping
    return True, None


def topology_from_dict(data):
    """
    Build a Topology from its JSON object form.

    Raises:
        TopologyError: On unknown or missing keys and invalid values
    """
    _check_keys(data, ("nodes", "links", "clos"), ("nodes", "links"), "topology")
    if not isinstance(data["nodes"], list) or not isinstance(data["links"], list):
        raise TopologyError("topology nodes and links must be arrays")

    nodes = []
    for entry in data["nodes"]:
        _check_keys(entry, ("id", "tier", "edge_ports"), ("id", "tier"), "node")
        try:
            tier = Tier(entry["tier"])
        except ValueError:
            known = ", ".join(tier.value for tier in Tier)
            raise TopologyError(f"unknown tier {entry['tier']!r} (known: {known})") from None
        edge_ports = entry.get("edge_ports", [])
        if not isinstance(edge_ports, list):
            raise TopologyError("node edge_ports must be an array")
        ports = []
        for port in edge_ports:
            _check_keys(port, ("bps", "count"), ("bps",), "edge port")
            ports.append(Port(_positive(port["bps"], "edge port bps"), _count(port.get("count", 1), "edge port count")))
        nodes.append(Node(str(entry["id"]), tier, tuple(ports)))

    links = []
    for entry in data["links"]:
        _check_keys(entry, ("from", "to", "bps", "count"), ("from", "to", "bps"), "link")
        links.append(Link(
            source=str(entry["from"]),
            target=str(entry["to"]),
            bps=_positive(entry["bps"], "link bps"),
            count=_count(entry.get("count", 1), "link count"),
        ))

    clos = None
    if "clos" in data:
        block = data["clos"]
        _check_keys(block, ("n", "r", "k", "uplink_bps", "downlink_bps"),
                    ("n", "r", "k", "uplink_bps", "downlink_bps"), "clos")
        try:
            clos = ClosParams(block["n"], block["r"], block["k"], block["uplink_bps"], block["downlink_bps"])
        except InputDomainError as e:
            raise TopologyError(str(e)) from None

    return Topology(tuple(nodes), tuple(links), clos)


def policy_from_dict(data):
    """Build a FabricPolicy; keys not given keep their defaults."""
    _check_keys(data, tuple(constants.DEFAULT_POLICY), (), "policy", PolicyError)
    return FabricPolicy(**{key: _positive(value, f"policy {key}", PolicyError) for key, value in data.items()})


def _load_json(path, error):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except OSError as e:
        raise error(f"cannot read {path}: {e.strerror}") from None
    except UnicodeDecodeError as e:
        raise error(f"{path} is not valid UTF-8: byte {e.start}") from None
    except json.JSONDecodeError as e:
        raise error(f"{path} is not valid JSON: {e.msg} at line {e.lineno}") from None


def load_topology(path):
    """
    Load a topology file.

    Args:
        path (str): JSON file with "nodes", "links" and optional "clos"

    Returns:
        Topology: The parsed topology
    """
    logger.info("Loading topology from %s", path)
    return topology_from_dict(_load_json(path, TopologyError))


def load_policy(path):
    logger.info("Loading policy from %s", path)
    return policy_from_dict(_load_json(path, PolicyError))
