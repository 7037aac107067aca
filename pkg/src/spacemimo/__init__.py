"""Numerical analysis of distributed-array MIMO links in free space.

Submodules:
    linkmodel   link parameters, channel gain, input SNR, degrees of freedom
    geometry    seeded random and user-supplied array geometries
    channel     line-of-sight channel matrix, log-det spectral efficiency, bounds
    kernel      kernel-operator spectrum on the aperture disc
    tradeoff    spectral efficiency vs energy per bit, optimal antenna count
    montecarlo  ergodic spectral efficiency over random placements
    cli         ``spacemimo`` command-line tool
"""
from spacemimo.errors import NumericalError, SpaceMimoError, ValidationError
from spacemimo.linkmodel import (
    ApertureRegion,
    LinkBudget,
    channel_gain,
    dof_count,
    input_snr,
    siso_spectral_efficiency,
)

__version__ = "0.1.0"

__all__ = [
    "ApertureRegion",
    "LinkBudget",
    "NumericalError",
    "SpaceMimoError",
    "ValidationError",
    "channel_gain",
    "dof_count",
    "input_snr",
    "siso_spectral_efficiency",
]
