"""
Constants shared across the capacity planner modules.

All sizes are in bytes, rates in bits per second and times in seconds.
"""

# Ethernet frame parts
IFG = 12
PREAMBLE_SFD = 8
DST_MAC = 6
SRC_MAC = 6
ETHERTYPE = 2
CRC = 4
VLAN_TAG = 4

MAC_HEADER = DST_MAC + SRC_MAC + ETHERTYPE
FRAME_OVERHEAD = IFG + PREAMBLE_SFD + MAC_HEADER + CRC  # 38

MIN_PAYLOAD = 46
MAX_PAYLOAD = 1500
JUMBO_MAX_PAYLOAD = 9000
MAX_VLAN_TAGS = 2

# The inter frame gap expressed in bit-times
IFG_BITS = IFG * 8

LINK_PRESETS = {
    "GigE": 1_000_000_000,
    "10GigE": 10_000_000_000,
    "25GigE": 25_000_000_000,
    "40GigE": 40_000_000_000,
    "100GigE": 100_000_000_000,
}

# IPv4 / transport headers
IPV4_HEADER = 20
TCP_HEADER = 20
UDP_HEADER = 8

TCP_OPTION_PRESETS = {
    "none": 0,
    "timestamps": 12,
}

# Over-subscription thresholds (downstream:upstream), overridable by policy file
DEFAULT_POLICY = {
    "access_distribution": 20,
    "distribution_core": 4,
    "server_core": 1,
    "leaf_spine": 3,
}

# Leaf-Spine planning ratio used by the Clos verdict
LEAF_SPINE_PLANNING_RATIO = 3

# Monte Carlo defaults
DEFAULT_TRIALS = 200_000
SIM_BLOCK_SLOTS = 4096
SIM_BLOCK_DRAWS = 1 << 20

# Reno simulator defaults
DEFAULT_SMSS = 1460
RTO_SILENT_ROUNDS = 2
DUP_ACK_THRESHOLD = 3

# Exhaustive Clos routing is limited to desk-scale instances
CLOS_ORACLE_MAX_PORTS = 12
