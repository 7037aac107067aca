"""Line-of-sight MIMO channel matrix and uniform-power spectral efficiency.

The discrete channel keeps only the phase of the free-space kernel,
``h_ij = exp(i 2 pi <v_i, u_j> / (lambda d))``; the amplitude is carried by
the per-link gain ``g / M^2``.  The common range phase is dropped because it
cancels in ``H H^*``.

Bound helpers in this module take the product ``gamma * g`` apart only for
readability: every formula depends on the product alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from spacemimo.errors import NumericalError, ValidationError
from spacemimo.geometry import ArrayGeometry
from spacemimo.linkmodel import LOG2E

# eigenvalues below this fraction of the largest are treated as exact zeros
EIGEN_CLAMP_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    entries: np.ndarray

    @property
    def m(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class CapacityResult:
    """Spectral efficiency and the decreasing eigenvalues of ``H H^*``."""

    xi: float
    eigenvalues: tuple
    m: int

    def to_dict(self) -> dict:
        return {"xi": self.xi, "eigenvalues": list(self.eigenvalues), "m": self.m}


def _check_m(m):
    if int(m) != m or m < 1:
        raise ValidationError(f"m must be a positive integer, got {m!r}", field="m")
    return int(m)


def _check_snr(gamma, g):
    if not (gamma > 0 and g > 0 and math.isfinite(gamma) and math.isfinite(g)):
        raise ValidationError(f"gamma and g must be finite and > 0, got gamma={gamma!r}, g={g!r}")


def build_channel_matrix(geom: ArrayGeometry) -> ChannelMatrix:
    """Phase-only channel: rows are receive points, columns transmit points."""
    k = 2.0 * np.pi / geom.region.lambda_d
    phase = k * (geom.rx_positions @ geom.tx_positions.T)
    return ChannelMatrix(np.exp(1j * phase))


def gram_eigenvalues(h: ChannelMatrix) -> np.ndarray:
    """Eigenvalues of ``H H^*`` in decreasing order, tiny ones clamped to zero."""
    hh = h.entries @ h.entries.conj().T
    try:
        ev = np.linalg.eigvalsh(hh)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigen-solve failed: {exc}") from exc
    if not np.all(np.isfinite(ev)):
        raise NumericalError("Hermitian eigen-solve returned non-finite eigenvalues")
    ev = ev[::-1].copy()
    ev[ev < EIGEN_CLAMP_RTOL * max(ev[0], 0.0)] = 0.0
    return ev


def spectral_efficiency(h: ChannelMatrix, gamma: float, g: float) -> CapacityResult:
    """Uniform-power spectral efficiency ``log2 det(I + gamma g / M^3 H H^*)``.

    Evaluated as a sum over the eigenvalues of ``H H^*``.

    Raises:
        NumericalError: if the eigen-solve fails or is non-finite.
    """
    _check_snr(gamma, g)
    m = h.m
    ev = gram_eigenvalues(h)
    scale = gamma * g / m**3
    xi = float(np.sum(np.log1p(scale * ev)) * LOG2E)
    return CapacityResult(xi=xi, eigenvalues=tuple(float(v) for v in ev), m=m)


def capacity_upper_bound(m: int, dof: int, gamma: float, g: float) -> float:
    """Pointwise upper bound on the spectral efficiency of any channel matrix.

    ``k log2(1 + gamma g / (M k))`` with ``k = min(M, dof)``.
    """
    m = _check_m(m)
    dof = _check_m(dof)
    _check_snr(gamma, g)
    k = min(m, dof)
    return k * math.log1p(gamma * g / (m * k)) * LOG2E


def ergodic_lower_bound(m: int, c: float, gamma: float, g: float) -> float:
    """Lower bound on the mean spectral efficiency for uniformly placed nodes.

    Args:
        m: Antennas per end.
        c: Aperture ratio ``|S| / (lambda d)``, >= 1.  ``math.inf`` gives the
            limit of an unboundedly large region.
        gamma: Input SNR.
        g: Channel gain.

    The numerator is ``(M/4) log2(1 + gamma g / (2 M^2))``; the bound tightens
    as ``c`` grows because the denominator falls toward ``2 - 1/M``.
    """
    m = _check_m(m)
    _check_snr(gamma, g)
    if not c >= 1.0 - 1e-9:
        raise ValidationError(f"aperture ratio c must be >= 1, got {c!r}", field="c")
    numerator = (m / 4.0) * math.log1p(gamma * g / (2.0 * m * m)) * LOG2E
    spread = (m - 2.0 + 1.0 / m) / c
    return numerator / ((2.0 - 1.0 / m) + 32.0 / (9.0 * math.pi) * spread)


def uniform_power_approximation(m: int, gamma: float, g: float) -> float:
    """Full-rank approximation ``M log2(1 + gamma g / M^2)``."""
    m = _check_m(m)
    _check_snr(gamma, g)
    return m * math.log1p(gamma * g / (m * m)) * LOG2E
