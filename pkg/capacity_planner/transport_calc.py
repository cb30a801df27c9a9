"""
TCP/UDP performance module for the capacity planner.

This module provides IPv4 encapsulation overhead, transport goodput over
Ethernet, window-limited throughput and the loss-based throughput model

    throughput = MSS * sqrt(3/2) / (RTT * sqrt(p))

which follows from a sawtooth window peaking at W = sqrt(8 / 3p) segments,
with MSS * (3/8) W^2 bytes sent every RTT * W/2 seconds.
"""

import enum
import math
from dataclasses import dataclass

from . import constants
from .ether_calc import max_frames_per_second
from .errors import InputDomainError

_SQRT_3_2 = math.sqrt(1.5)


class Protocol(str, enum.Enum):
    TCP = "tcp"
    UDP = "udp"


@dataclass(frozen=True)
class TransportSpec:
    """
    Transport encapsulation inside an Ethernet payload.

    Attributes:
        protocol (Protocol): TCP or UDP
        tcp_options (int): TCP option bytes (12 with timestamps, else 0)
    """

    protocol: Protocol = Protocol.TCP
    tcp_options: int = 0

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        if isinstance(self.tcp_options, bool) or not isinstance(self.tcp_options, int) or self.tcp_options < 0:
            raise InputDomainError(f"tcp_options must be a non-negative integer, got {self.tcp_options!r}")
        if self.protocol is Protocol.UDP and self.tcp_options:
            raise InputDomainError("UDP carries no TCP options")

    @classmethod
    def tcp(cls, options="none"):
        """
        TCP with a named option preset.

        Args:
            options (str or int): "none", "timestamps" or a byte count
        """
        if isinstance(options, str):
            try:
                options = constants.TCP_OPTION_PRESETS[options]
            except KeyError:
                known = ", ".join(constants.TCP_OPTION_PRESETS)
                raise InputDomainError(f"unknown TCP option preset {options!r} (known: {known})") from None
        return cls(Protocol.TCP, options)

    @classmethod
    def udp(cls):
        return cls(Protocol.UDP, 0)

    @property
    def header_size(self):
        """IPv4 plus transport header bytes, options included."""
        if self.protocol is Protocol.TCP:
            return constants.IPV4_HEADER + constants.TCP_HEADER + self.tcp_options
        return constants.IPV4_HEADER + constants.UDP_HEADER

    def application_bytes(self, payload):
        """
        Application data carried by one Ethernet payload.

        Raises:
            InputDomainError: If the headers do not fit in the payload
        """
        data = payload - self.header_size
        if data < 0:
            raise InputDomainError(
                f"{self.protocol.value} headers ({self.header_size} B) exceed the {payload} B payload"
            )
        return data


@dataclass(frozen=True)
class PathModel:
    """
    A TCP path for the loss model.

    Attributes:
        mss (float): Maximum segment size in bytes
        rtt (float): Round-trip time in seconds
        loss_p (float): Segment loss probability
        window (float): Window size in bytes
    """

    mss: float
    rtt: float
    loss_p: float
    window: float = 0.0

    def __post_init__(self):
        if not self.mss > 0:
            raise InputDomainError(f"mss must be > 0, got {self.mss!r}")
        if not self.rtt > 0:
            raise InputDomainError(f"rtt must be > 0, got {self.rtt!r}")
        if not 0 < self.loss_p < 1:
            raise InputDomainError(f"loss probability must lie in (0, 1), got {self.loss_p!r}")
        if not self.window >= 0:
            raise InputDomainError(f"window must be >= 0, got {self.window!r}")


def transport_goodput(link, payload, spec, vlan_tags=0, jumbo=False):
    """
    Application throughput of TCP/IP or UDP/IP over an Ethernet link.

    Args:
        link (LinkRate): The link
        payload (int): Ethernet payload in bytes
        spec (TransportSpec): Encapsulation
        vlan_tags (int): Number of VLAN tags
        jumbo (bool): Whether jumbo payloads are allowed

    Returns:
        float: Goodput in bits/s
    """
    fps = max_frames_per_second(link, payload, vlan_tags, jumbo)
    return fps.exact * spec.application_bytes(payload) * 8


def window_throughput(window, rtt):
    """
    Window-limited TCP throughput, window / RTT.

    Args:
        window (float): Window size in bytes
        rtt (float): Round-trip time in seconds

    Returns:
        float: Throughput in bits/s
    """
    if not rtt > 0:
        raise InputDomainError(f"rtt must be > 0, got {rtt!r}")
    if not window >= 0:
        raise InputDomainError(f"window must be >= 0, got {window!r}")
    return 8 * window / rtt


def bandwidth_delay_product(rate, rtt):
    """Window in bytes needed to keep a path of ``rate`` bits/s busy."""
    if not rtt > 0:
        raise InputDomainError(f"rtt must be > 0, got {rtt!r}")
    if not rate >= 0:
        raise InputDomainError(f"rate must be >= 0, got {rate!r}")
    return rate * rtt / 8


def mathis_window(p):
    """
    Peak congestion window, in segments, of the loss-model sawtooth.

    Args:
        p (float): Segment loss probability in (0, 1)

    Returns:
        float: sqrt(8 / 3p)
    """
    if not 0 < p < 1:
        raise InputDomainError(f"loss probability must lie in (0, 1), got {p!r}")
    return math.sqrt(8.0 / (3.0 * p))


def mathis_throughput(path):
    """
    Loss-limited TCP throughput, 8 * MSS * sqrt(3/2) / (RTT * sqrt(p)).

    Args:
        path (PathModel): Segment size, round-trip time and loss probability

    Returns:
        float: Throughput in bits/s
    """
    return 8 * path.mss * _SQRT_3_2 / (path.rtt * math.sqrt(path.loss_p))


def mathis_loss_rate(mss, rtt, throughput):
    """
    Loss probability at which the loss model yields ``throughput`` bits/s.

    Raises:
        InputDomainError: If the answer falls outside (0, 1)
    """
    if not mss > 0 or not rtt > 0 or not throughput > 0:
        raise InputDomainError("mss, rtt and throughput must all be > 0")
    p = (8 * mss * _SQRT_3_2 / (rtt * throughput)) ** 2
    if not 0 < p < 1:
        raise InputDomainError(
            f"throughput {throughput!r} bit/s is out of reach of the loss model for this path"
        )
    return p
