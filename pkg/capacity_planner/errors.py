"""
Exception hierarchy for the capacity planner.

Every error carries a short machine-readable ``code`` which the command-line
interface prints in front of the message.
"""


class CapacityPlannerError(Exception):
    """Base class for all capacity planner errors."""

    code = "error"


class InputDomainError(CapacityPlannerError, ValueError):
    """A value lies outside the domain an operation is defined on."""

    code = "input-domain"


class UndersizedPayloadError(InputDomainError):
    """Ethernet payload below the 46 byte minimum."""

    code = "payload-undersized"


class OversizedPayloadError(InputDomainError):
    """Ethernet payload above the jumbo frame ceiling."""

    code = "payload-oversized"


class JumboFrameRequiredError(InputDomainError):
    """Payload between 1501 and 9000 bytes without jumbo frames enabled."""

    code = "jumbo-required"


class ConfigError(CapacityPlannerError):
    """Invalid configuration file."""

    code = "config"


class TopologyError(ConfigError):
    code = "topology"


class PolicyError(ConfigError):
    code = "policy"
