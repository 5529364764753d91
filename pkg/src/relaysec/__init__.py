"""Secrecy outage of a three-node untrusted-relay network.

Closed-form outage probabilities for direct transmission,
amplify-and-forward relaying, and cooperative jamming; an independent
Monte Carlo channel simulator; asymptotic limits; and a numerical
power-allocation optimizer with a figure-oriented CLI.
"""

from .model import (
    ChannelDraw,
    LinkGains,
    PowerAllocation,
    Scheme,
    SchemeId,
    SelectionMode,
    SopEstimate,
    SystemParams,
    db_to_linear,
    derived_coefficients,
    sample_channel,
)
from .montecarlo import McConfig, estimate_sop, positive_secrecy_probability, secrecy_rate, sweep
from .powerallo import minimize_sop
from .specfun import QuadratureSpec

__all__ = [
    "ChannelDraw",
    "LinkGains",
    "McConfig",
    "PowerAllocation",
    "QuadratureSpec",
    "Scheme",
    "SchemeId",
    "SelectionMode",
    "SopEstimate",
    "SystemParams",
    "db_to_linear",
    "derived_coefficients",
    "estimate_sop",
    "minimize_sop",
    "positive_secrecy_probability",
    "sample_channel",
    "secrecy_rate",
    "sweep",
]

__version__ = "0.1.0"
