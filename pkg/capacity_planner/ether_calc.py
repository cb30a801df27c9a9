"""
Ethernet performance module for the capacity planner.

This module provides frame-size, frame-rate and goodput arithmetic for
Ethernet links. A frame occupies on the wire:

    IFG 12 + preamble/SFD 8 + MAC header 14 + payload + CRC 4 (+ 4 per VLAN tag)

so the physical size ranges from 84 bytes (46 byte payload) to 1538 bytes
(1500 byte payload), or 9038 bytes for a 9000 byte jumbo payload.
"""

import math
from dataclasses import dataclass

from . import constants
from .errors import (
    InputDomainError,
    JumboFrameRequiredError,
    OversizedPayloadError,
    UndersizedPayloadError,
)


@dataclass(frozen=True)
class LinkRate:
    """An Ethernet data rate in bits/s."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0 or math.isinf(self.rate):
            raise InputDomainError(f"link rate must be finite and > 0, got {self.rate!r}")

    @classmethod
    def preset(cls, name):
        """
        Build a LinkRate from a named variant such as "GigE" or "10GigE".

        Args:
            name (str): One of constants.LINK_PRESETS

        Returns:
            LinkRate: The link
        """
        try:
            return cls(constants.LINK_PRESETS[name])
        except KeyError:
            known = ", ".join(constants.LINK_PRESETS)
            raise InputDomainError(f"unknown link preset {name!r} (known: {known})") from None


@dataclass(frozen=True)
class FrameSpec:
    """
    Anatomy of one Ethernet frame.

    Attributes:
        payload (int): Network PDU size in bytes
        vlan_tags (int): Number of 802.1Q tags (0, 1 or 2)
        jumbo (bool): Whether payloads above 1500 bytes are allowed
    """

    payload: int
    vlan_tags: int = 0
    jumbo: bool = False

    def __post_init__(self):
        check_payload(self.payload, self.vlan_tags, self.jumbo)

    @property
    def header_size(self):
        """MAC addresses, EtherType and VLAN tags."""
        return constants.MAC_HEADER + constants.VLAN_TAG * self.vlan_tags

    @property
    def physical_size(self):
        return self.payload + constants.FRAME_OVERHEAD + constants.VLAN_TAG * self.vlan_tags

    def counted_size(self, include_crc):
        """Bytes that count towards goodput: header, payload and optionally the CRC."""
        size = self.header_size + self.payload
        return size + constants.CRC if include_crc else size


@dataclass(frozen=True)
class FrameRate:
    """
    Frame rate of a link.

    Attributes:
        exact (float): Unfloored frames per second, used for goodput chaining
        frames (int): Whole frames per second, as displayed
    """

    exact: float
    frames: int


def check_payload(payload, vlan_tags=0, jumbo=False):
    """
    Validate a payload size and VLAN tag count.

    Args:
        payload (int): Payload in bytes
        vlan_tags (int): Number of VLAN tags
        jumbo (bool): Whether jumbo payloads are allowed

    Raises:
        UndersizedPayloadError: payload below 46 bytes
        JumboFrameRequiredError: payload 1501..9000 bytes without jumbo
        OversizedPayloadError: payload above 9000 bytes
        InputDomainError: bad VLAN tag count or non-integral payload
    """
    whole = isinstance(payload, int) or (isinstance(payload, float) and payload.is_integer())
    if isinstance(payload, bool) or not whole:
        raise InputDomainError(f"payload must be a whole number of bytes, got {payload!r}")
    if isinstance(vlan_tags, bool) or vlan_tags not in range(constants.MAX_VLAN_TAGS + 1):
        raise InputDomainError(f"vlan_tags must be 0, 1 or 2, got {vlan_tags!r}")
    if payload < constants.MIN_PAYLOAD:
        raise UndersizedPayloadError(
            f"payload {payload} B is below the {constants.MIN_PAYLOAD} B minimum"
        )
    if payload > constants.JUMBO_MAX_PAYLOAD:
        raise OversizedPayloadError(
            f"payload {payload} B exceeds the {constants.JUMBO_MAX_PAYLOAD} B jumbo ceiling"
        )
    if payload > constants.MAX_PAYLOAD and not jumbo:
        raise JumboFrameRequiredError(
            f"payload {payload} B exceeds {constants.MAX_PAYLOAD} B and needs jumbo frames"
        )


def frame_physical_size(payload, vlan_tags=0, jumbo=False):
    """
    Bytes a frame occupies on the wire, IFG and preamble included.

    Args:
        payload (int): Payload in bytes
        vlan_tags (int): Number of VLAN tags
        jumbo (bool): Whether jumbo payloads are allowed

    Returns:
        int: Physical frame size in bytes
    """
    return FrameSpec(payload, vlan_tags, jumbo).physical_size


def max_frames_per_second(link, payload, vlan_tags=0, jumbo=False):
    """
    Maximum frame rate of a link for a given frame size.

    Args:
        link (LinkRate): The link
        payload (int): Payload in bytes
        vlan_tags (int): Number of VLAN tags
        jumbo (bool): Whether jumbo payloads are allowed

    Returns:
        FrameRate: Exact and floored frames per second
    """
    bits = 8 * frame_physical_size(payload, vlan_tags, jumbo)
    exact = link.rate / bits
    return FrameRate(exact=exact, frames=math.floor(exact))


def ethernet_goodput(link, payload, vlan_tags=0, include_crc=True, jumbo=False):
    """
    Ethernet throughput once IFG and preamble are discounted.

    The MAC header, any VLAN tags and the payload always count; the CRC
    counts only with include_crc. A minimum untagged frame therefore counts
    64 bytes with CRC and 60 without.

    Args:
        link (LinkRate): The link
        payload (int): Payload in bytes
        vlan_tags (int): Number of VLAN tags
        include_crc (bool): Count the 4 byte check sequence
        jumbo (bool): Whether jumbo payloads are allowed

    Returns:
        float: Goodput in bits/s
    """
    spec = FrameSpec(payload, vlan_tags, jumbo)
    fps = max_frames_per_second(link, payload, vlan_tags, jumbo)
    return fps.exact * 8 * spec.counted_size(include_crc)


def wire_efficiency(payload, vlan_tags=0, jumbo=False):
    """Share of the wire carrying payload, payload / physical size."""
    return payload / frame_physical_size(payload, vlan_tags, jumbo)


def interframe_gap_time(link):
    """
    Duration of the inter frame gap: 96 bit-times.

    Returns:
        float: Seconds (9.6e-8 at 1 Gbit/s, 9.6e-9 at 10 Gbit/s)
    """
    return constants.IFG_BITS / link.rate
