"""Transmit/receive array geometries on the aperture disc.

Random geometries come from numpy's Philox4x64 counter-based generator.  The
128-bit Philox key is ``(seed, stream)``: ``seed`` is the user's 64-bit seed
and ``stream`` selects an independent substream (0 for one-off sampling,
trial index ``t >= 1`` inside Monte Carlo runs).  Because each substream is
addressed directly by its key, any trial can be regenerated without replaying
the ones before it.

Draw order for one geometry: a ``(2, m, 2)`` block of uniforms on [0, 1),
indexed ``[end, point, (U1, U2)]`` with end 0 = transmit, 1 = receive.  Each
point is ``r = R sqrt(U1)``, ``theta = 2 pi U2``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from spacemimo.errors import ValidationError
from spacemimo.linkmodel import ApertureRegion

_U64 = (1 << 64) - 1


def philox_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator keyed by ``(seed, stream)``; both are reduced modulo 2**64."""
    key = np.array([int(seed) & _U64, int(stream) & _U64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """M transmit and M receive points, each inside the region's disc."""

    tx_positions: np.ndarray
    rx_positions: np.ndarray
    region: ApertureRegion

    @property
    def m(self) -> int:
        return self.tx_positions.shape[0]

    def to_dict(self) -> dict:
        return {
            "region": self.region.to_dict(),
            "tx": self.tx_positions.tolist(),
            "rx": self.rx_positions.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "ArrayGeometry":
        if "region" not in data or "tx" not in data or "rx" not in data:
            raise ValidationError("geometry document needs 'region', 'tx' and 'rx'")
        return from_positions(data["tx"], data["rx"], ApertureRegion.from_dict(data["region"]))

    @classmethod
    def from_json(cls, text: str) -> "ArrayGeometry":
        return cls.from_dict(json.loads(text))


def _as_points(pts, name):
    arr = np.array(pts, dtype=float)
    if arr.size == 0:
        raise ValidationError(f"'{name}' must hold at least one point", field=name)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError(f"'{name}' must be a list of [x, y] pairs", field=name)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"'{name}' has non-finite coordinates", field=name)
    return arr


def from_positions(tx, rx, region: ApertureRegion) -> ArrayGeometry:
    """Wrap user-supplied positions after checking length and containment."""
    tx_arr = _as_points(tx, "tx")
    rx_arr = _as_points(rx, "rx")
    if tx_arr.shape[0] != rx_arr.shape[0]:
        raise ValidationError(
            f"length mismatch: {tx_arr.shape[0]} transmit vs {rx_arr.shape[0]} receive points"
        )
    for name, arr in (("tx", tx_arr), ("rx", rx_arr)):
        if not region.contains(arr):
            raise ValidationError(f"point outside disc of radius {region.radius_m:g} in '{name}'", field=name)
    tx_arr.setflags(write=False)
    rx_arr.setflags(write=False)
    return ArrayGeometry(tx_arr, rx_arr, region)


def sample_uniform_disc(region: ApertureRegion, m: int, seed: int, stream: int = 0) -> ArrayGeometry:
    """Draw ``m`` i.i.d. area-uniform points per end of the link.

    Args:
        region: Disc to sample from.
        m: Points per end, >= 1.
        seed: 64-bit seed.
        stream: Substream index; see the module docstring.

    Returns:
        A geometry that depends only on ``(region, m, seed, stream)``.
    """
    if int(m) != m or m < 1:
        raise ValidationError(f"m must be a positive integer, got {m!r}", field="m")
    m = int(m)
    u = philox_generator(seed, stream).random((2, m, 2))
    r = region.radius_m * np.sqrt(u[..., 0])
    theta = 2.0 * np.pi * u[..., 1]
    pts = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
    tx, rx = pts[0].copy(), pts[1].copy()
    tx.setflags(write=False)
    rx.setflags(write=False)
    return ArrayGeometry(tx, rx, region)
