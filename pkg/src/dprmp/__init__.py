"""Key-rate engine for mode-pairing QKD with discrete phase randomization.

Modules: core_math (pseudo-photon series), fidelity (basis-dependence bound),
channel (click and pairing model), decoy (two-stage decoy LP), keyrate
(asymptotic rate and sweeps), pairing_mc (Monte Carlo pairing check), cli.
"""
from ._accel import backend_name
from .channel import ChannelParams
from .core_math import PhaseConfig
from .keyrate import CONTINUOUS, SweepGrid, key_rate, optimize_mu, plob_bound, sweep

__version__ = "0.1.0"

__all__ = [
    "CONTINUOUS",
    "ChannelParams",
    "PhaseConfig",
    "SweepGrid",
    "backend_name",
    "key_rate",
    "optimize_mu",
    "plob_bound",
    "sweep",
]
