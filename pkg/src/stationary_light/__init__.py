"""Stationary light pulses in a Lambda-type atomic medium: guided modes,
forward/backward polariton propagation and a Kerr phase-shift protocol."""

from .medium import (
    C_LIGHT,
    ControlDrive,
    DerivedParams,
    MediumParams,
    SlowLightCoefficients,
    derive,
    slow_light,
)

__version__ = "0.1.0"

__all__ = [
    "C_LIGHT",
    "ControlDrive",
    "DerivedParams",
    "MediumParams",
    "SlowLightCoefficients",
    "derive",
    "slow_light",
]
