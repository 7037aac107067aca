"""Physical link parameters and the scalar quantities derived from them.

Everything here is strict SI: meters, watts, hertz, W/Hz.  Decibel values are
converted at the command-line boundary and never stored.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import InitVar, asdict, dataclass, fields

from spacemimo.errors import ValidationError

LOG2E = 1.0 / math.log(2.0)

# relative slack for the |S|/(lambda d) >= 1 boundary and for ceil(c^2)
_BOUNDARY_RTOL = 1e-9


class WeakLinkAssumptionWarning(UserWarning):
    """Channel gain is not small compared with one."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def loss_db_to_factor(loss_db: float) -> float:
    """Convert a loss in dB (positive = attenuation) to the linear factor L."""
    return 10.0 ** (-loss_db / 10.0)


def _require_positive(name, value):
    if value is None:
        raise ValidationError(f"missing required field '{name}'", field=name)
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"field '{name}' must be a number, got {value!r}", field=name)
    if not math.isfinite(value) or value <= 0.0:
        raise ValidationError(f"field '{name}' must be finite and > 0, got {value!r}", field=name)
    return value


@dataclass(frozen=True)
class LinkBudget:
    """SISO link parameters.

    Attributes:
        power_watts: Total transmit power P.
        bandwidth_hz: Signal bandwidth B.
        tx_aperture_m2: Effective transmit aperture area A_T.
        rx_aperture_m2: Effective receive aperture area A_R.
        range_m: Link range d.
        wavelength_m: Carrier wavelength.
        loss_factor: Lumped unmodeled losses L, linear, 0 < L <= 1.
        noise_psd_w_per_hz: Complex-baseband noise spectral density N0.
    """

    power_watts: float
    bandwidth_hz: float
    tx_aperture_m2: float
    rx_aperture_m2: float
    range_m: float
    wavelength_m: float
    loss_factor: float
    noise_psd_w_per_hz: float

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _require_positive(f.name, getattr(self, f.name)))
        if self.loss_factor > 1.0:
            raise ValidationError(
                f"field 'loss_factor' must be <= 1, got {self.loss_factor!r}", field="loss_factor"
            )
        g = channel_gain(self)
        if g >= 1.0:
            warnings.warn(
                f"channel gain g = {g:.6g} is not << 1; space-link assumptions may not hold",
                WeakLinkAssumptionWarning,
                stacklevel=3,
            )

    @classmethod
    def from_dict(cls, data: dict) -> "LinkBudget":
        names = [f.name for f in fields(cls)]
        return cls(**{n: data.get(n) for n in names})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ApertureRegion:
    """Planar disc of radius R shared by both ends of the link.

    The disc area must be at least one ``wavelength * range`` unit, i.e. the
    aperture ratio ``c = pi R^2 / (lambda d)`` is >= 1.  Pass ``strict=False``
    to admit smaller discs, e.g. for the near-constant-kernel limit.
    """

    radius_m: float
    wavelength_m: float
    range_m: float
    strict: InitVar[bool] = True

    def __post_init__(self, strict):
        for f in fields(self):
            object.__setattr__(self, f.name, _require_positive(f.name, getattr(self, f.name)))
        if strict and self.aperture_ratio < 1.0 - _BOUNDARY_RTOL:
            raise ValidationError(
                f"aperture ratio |S|/(lambda d) = {self.aperture_ratio:.6g} must be >= 1",
                field="radius_m",
            )

    @classmethod
    def from_ratio(cls, c: float, wavelength_m: float = 1.0, range_m: float = 1.0,
                   strict: bool = True) -> "ApertureRegion":
        """Region whose aperture ratio ``|S|/(lambda d)`` equals ``c``."""
        c = _require_positive("c", c)
        return cls(math.sqrt(c * wavelength_m * range_m / math.pi), wavelength_m, range_m, strict)

    @classmethod
    def from_dict(cls, data: dict) -> "ApertureRegion":
        return cls(data.get("radius_m"), data.get("wavelength_m"), data.get("range_m"))

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def area(self) -> float:
        return math.pi * self.radius_m**2

    @property
    def lambda_d(self) -> float:
        return self.wavelength_m * self.range_m

    @property
    def aperture_ratio(self) -> float:
        return self.area / self.lambda_d

    def contains(self, points, rtol: float = 1e-12) -> bool:
        import numpy as np

        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return bool(np.all(np.hypot(pts[:, 0], pts[:, 1]) <= self.radius_m * (1.0 + rtol)))


def channel_gain(lb: LinkBudget) -> float:
    """Free-space channel gain ``A_T A_R L / (lambda d)^2``."""
    return lb.tx_aperture_m2 * lb.rx_aperture_m2 * lb.loss_factor / (lb.wavelength_m * lb.range_m) ** 2


def input_snr(lb: LinkBudget) -> float:
    """Input SNR ``P / (B N0)``."""
    return lb.power_watts / (lb.bandwidth_hz * lb.noise_psd_w_per_hz)


def dof_from_ratio(c: float) -> int:
    """Spatial degrees of freedom ``ceil(c^2)`` for aperture ratio ``c``.

    A relative slack of 1e-9 absorbs round-off so that exact squares such as
    ``c = 5`` map to 25 rather than 26.
    """
    x = c * c
    return max(1, math.ceil(x * (1.0 - _BOUNDARY_RTOL)))


def dof_count(region: ApertureRegion) -> int:
    """Number of spatial degrees of freedom supported by ``region``."""
    return dof_from_ratio(region.aperture_ratio)


def siso_spectral_efficiency(g: float, gamma: float) -> float:
    """Single-antenna AWGN spectral efficiency in b/s/Hz."""
    if g <= 0 or gamma <= 0:
        raise ValidationError("g and gamma must be > 0")
    return math.log1p(gamma * g) * LOG2E
