"""Spectrum of the continuous free-space kernel operator on the aperture disc.

The operator maps square-integrable fields on the disc to fields on the disc
through the kernel ``H(v, u) = sqrt(L) / (lambda d) * exp(i 2 pi <v, u> / (lambda d))``.
It is discretized with a symmetrized product quadrature: Gauss-Legendre in
the radius (measure ``r dr``) times the trapezoidal rule in angle, and the
matrix ``K_ab = sqrt(w_a) H(x_a, x_b) sqrt(w_b)`` stands in for the operator.

Because the angular nodes are uniform, ``K`` is block-circulant over the
angular index.  A DFT along that index splits it into ``angular_order``
independent ``radial_order x radial_order`` blocks whose singular values,
taken together, are exactly those of ``K``.  The dense SVD of ``K`` is kept
as a cross-check.

The kernel is complex-symmetric rather than Hermitian, so singular values are
used as the mode magnitudes ``|nu_n|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from spacemimo.errors import NumericalError, ValidationError
from spacemimo.linkmodel import LOG2E, ApertureRegion

# Relative slack allowed when comparing discretized bounds with closed forms.
# Discrete singular values can exceed sqrt(L) only through quadrature error,
# which is far below this level at the default orders.
QUADRATURE_SLACK_RTOL = 1e-6


def default_orders(c: float) -> tuple[int, int]:
    """Default ``(radial, angular)`` orders for aperture ratio ``c``.

    Chosen so the kernel phase, which winds through up to ``2 c`` radians
    across the disc, is resolved.
    """
    cc = math.ceil(c * (1.0 - 1e-9))
    return max(16, 4 * cc), max(32, 8 * cc)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Product rule on a disc.

    Nodes are stored angle-major: node ``p * radial_order + i`` sits at radius
    ``radii[i]`` and angle ``2 pi p / angular_order``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    radii: np.ndarray
    radial_weights: np.ndarray
    angular_order: int

    @property
    def radial_order(self) -> int:
        return self.radii.shape[0]

    @property
    def order(self) -> int:
        return self.weights.shape[0]

    def integrate(self, f) -> complex:
        """Integrate ``f(x, y)`` (vectorized) over the disc."""
        return np.sum(self.weights * f(self.nodes[:, 0], self.nodes[:, 1]))


def build_disc_quadrature(region: ApertureRegion, radial_order: int | None = None,
                          angular_order: int | None = None) -> QuadratureGrid:
    """Gauss-Legendre x trapezoidal quadrature on the disc of ``region``.

    Weights are positive and sum to ``pi R^2``.  Polynomials in ``x, y`` of
    total degree below ``min(2 * radial_order - 1, angular_order)`` are
    integrated exactly.
    """
    dr, da = default_orders(region.aperture_ratio)
    nr = dr if radial_order is None else radial_order
    na = da if angular_order is None else angular_order
    if int(nr) != nr or int(na) != na or nr < 1 or na < 1:
        raise ValidationError(f"quadrature orders must be positive integers, got {nr!r}, {na!r}")
    nr, na = int(nr), int(na)

    R = region.radius_m
    x, w = np.polynomial.legendre.leggauss(nr)
    radii = 0.5 * R * (x + 1.0)
    radial_weights = 0.5 * R * w * radii  # integrates f(r) r dr on [0, R]
    theta = 2.0 * np.pi * np.arange(na) / na

    rr = np.tile(radii, na)
    tt = np.repeat(theta, nr)
    nodes = np.column_stack([rr * np.cos(tt), rr * np.sin(tt)])
    weights = np.tile(radial_weights, na) * (2.0 * np.pi / na)
    return QuadratureGrid(nodes, weights, radii, radial_weights, na)


@dataclass(frozen=True, eq=False)
class KernelSpectrum:
    """Decreasing singular values of the discretized kernel operator."""

    singular_values: np.ndarray
    region: ApertureRegion
    loss_factor: float
    grid_order: int

    @property
    def squared(self) -> np.ndarray:
        return self.singular_values**2

    @property
    def expected_energy(self) -> float:
        """Closed-form Hilbert-Schmidt norm squared, ``L |S|^2 / (lambda d)^2``."""
        return self.loss_factor * self.region.area**2 / self.region.lambda_d**2

    def rows(self):
        """Yield ``(index, singular_value, squared, cumulative_fraction)``, 1-based."""
        sq = self.squared
        cum = np.cumsum(sq) / self.expected_energy
        for n, (s, s2, f) in enumerate(zip(self.singular_values, sq, cum), start=1):
            yield n, float(s), float(s2), float(f)


def _kernel_amplitude(region, loss_factor):
    if not 0.0 < loss_factor <= 1.0:
        raise ValidationError(f"loss_factor must be in (0, 1], got {loss_factor!r}", field="loss_factor")
    return math.sqrt(loss_factor) / region.lambda_d


def kernel_matrix(region: ApertureRegion, loss_factor: float, grid: QuadratureGrid) -> np.ndarray:
    """Dense symmetrized kernel matrix ``sqrt(w_a) H(x_a, x_b) sqrt(w_b)``."""
    amp = _kernel_amplitude(region, loss_factor)
    k = 2.0 * np.pi / region.lambda_d
    sw = np.sqrt(grid.weights)
    return (amp * sw[:, None]) * np.exp(1j * k * (grid.nodes @ grid.nodes.T)) * sw[None, :]


def _svdvals(a):
    try:
        s = scipy.linalg.svdvals(a, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"singular value decomposition failed: {exc}") from exc
    if not np.all(np.isfinite(s)):
        raise NumericalError("singular value decomposition returned non-finite values")
    return s


def _circulant_singular_values(region, loss_factor, grid):
    amp = _kernel_amplitude(region, loss_factor)
    k = 2.0 * np.pi / region.lambda_d
    na = grid.angular_order
    r = grid.radii
    sw = np.sqrt(grid.radial_weights * (2.0 * np.pi / na))
    dtheta = 2.0 * np.pi * np.arange(na) / na
    # first block row C(q)[i, j], q = angular offset
    blocks = np.exp(1j * k * np.cos(dtheta)[:, None, None] * np.outer(r, r)[None, :, :])
    blocks *= amp * sw[None, :, None] * sw[None, None, :]
    modes = np.fft.fft(blocks, axis=0)
    return np.concatenate([_svdvals(b) for b in modes])


def kernel_spectrum(region: ApertureRegion, loss_factor: float = 1.0,
                    grid: QuadratureGrid | None = None, method: str = "circulant") -> KernelSpectrum:
    """Singular values of the discretized kernel operator, largest first.

    Args:
        region: Aperture disc, wavelength and range.
        loss_factor: Linear loss L in (0, 1].
        grid: Quadrature; defaults to ``build_disc_quadrature(region)``.
        method: ``"circulant"`` (block-DFT, fast) or ``"dense"`` (full SVD).

    Raises:
        NumericalError: if a decomposition fails.
    """
    if grid is None:
        grid = build_disc_quadrature(region)
    if method == "circulant":
        s = _circulant_singular_values(region, loss_factor, grid)
    elif method == "dense":
        s = _svdvals(kernel_matrix(region, loss_factor, grid))
    else:
        raise ValidationError(f"unknown method {method!r}", field="method")
    s = np.sort(s)[::-1].copy()
    s.setflags(write=False)
    return KernelSpectrum(s, region, float(loss_factor), grid.order)


def kernel_modes(region: ApertureRegion, loss_factor: float, grid: QuadratureGrid, n: int):
    """Top ``n`` singular values with left mode functions sampled at the grid nodes.

    Mode values are normalized so that ``sum_a w_a |p(x_a)|^2 = 1``.
    """
    K = kernel_matrix(region, loss_factor, grid)
    try:
        u, s, _ = scipy.linalg.svd(K)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"singular value decomposition failed: {exc}") from exc
    return s[:n], u[:, :n] / np.sqrt(grid.weights)[:, None]


def kernel_lower_bound(spectrum: KernelSpectrum, m: int, gamma: float,
                       tx_aperture_m2: float, rx_aperture_m2: float) -> float:
    """Achievable rate of M streams over the M strongest kernel modes.

    ``sum_{n<=M} log2(1 + (gamma / M) (A_T A_R / |S|^2) |nu_n|^2)``.  When M
    exceeds the number of computed modes the missing terms are zero.
    """
    if int(m) != m or m < 1:
        raise ValidationError(f"m must be a positive integer, got {m!r}", field="m")
    if not gamma > 0:
        raise ValidationError(f"gamma must be > 0, got {gamma!r}", field="gamma")
    area = spectrum.region.area
    for name, a in (("tx_aperture_m2", tx_aperture_m2), ("rx_aperture_m2", rx_aperture_m2)):
        if not 0.0 < a <= area * (1.0 + 1e-12):
            raise ValidationError(f"{name} must be in (0, |S|], got {a!r}", field=name)
    m = int(m)
    top = spectrum.squared[:m]
    scale = gamma / m * tx_aperture_m2 * rx_aperture_m2 / area**2
    return float(np.sum(np.log1p(scale * top)) * LOG2E)


def dof_limited_approximation(m: int, dof: int, gamma: float, g: float) -> float:
    """Best uniform spectral efficiency with a degrees-of-freedom ceiling.

    ``k log2(1 + gamma g / (M k))``, ``k = min(M, dof)``.  Same algebra as
    :func:`spacemimo.channel.capacity_upper_bound`, but this is an estimate of
    what distributed apertures achieve, not a bound on a fixed matrix.
    """
    for name, v in (("m", m), ("dof", dof)):
        if int(v) != v or v < 1:
            raise ValidationError(f"{name} must be a positive integer, got {v!r}", field=name)
    if not (gamma > 0 and g > 0):
        raise ValidationError("gamma and g must be > 0")
    k = min(int(m), int(dof))
    return k * math.log1p(gamma * g / (m * k)) * LOG2E
