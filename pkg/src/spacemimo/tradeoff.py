"""Spectral efficiency versus energy per bit for the idealized MIMO link.

The positive branch of ``xi = k log2(1 + eta xi g / (M k))`` is found through
the per-stream SNR ``s = eta xi g / (M k)``.  Substituting gives the scalar
equation

    s / ln(1 + s) = kappa,    kappa = eta / eta0(M, g) = eta g / (M ln 2),

whose left side rises strictly from 1 at ``s = 0``.  A positive root exists
iff ``kappa > 1`` and then ``xi = k log2(1 + s)``.  Without a degrees-of-freedom
cap, ``k = M``.  Working in ``s`` keeps the solve well conditioned close to
the onset, where ``xi`` itself is tiny.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from spacemimo.errors import NumericalError, ValidationError
from spacemimo.linkmodel import LOG2E

LN2 = math.log(2.0)
DEFAULT_TOL = 1e-9
DEFAULT_M_MAX = 1024
_MAX_ITER = 200


@dataclass(frozen=True)
class TradeoffPoint:
    eta: float
    eta_db: float
    xi: float
    m: int
    g: float


def _check_m(m, name="m"):
    if int(m) != m or m < 1:
        raise ValidationError(f"{name} must be a positive integer, got {m!r}", field=name)
    return int(m)


def _check_pos(value, name):
    if not (value > 0 and math.isfinite(value)):
        raise ValidationError(f"{name} must be finite and > 0, got {value!r}", field=name)
    return float(value)


def shannon_limit(m: int, g: float) -> float:
    """Minimum energy per bit ``M / (g log2 e)`` for reliable transmission."""
    m = _check_m(m)
    g = _check_pos(g, "g")
    return m * (LN2 / g)


def wideband_slope(m: int) -> float:
    """Slope of xi versus ``10 log10 eta`` at the Shannon limit, b/s/Hz per dB."""
    m = _check_m(m)
    return m * LOG2E * math.log(10.0) / 5.0


def _phi(s):
    # s / log1p(s), continuous at 0
    out = np.ones_like(s)
    nz = s > 0
    out[nz] = s[nz] / np.log1p(s[nz])
    return out


def _dphi(s):
    out = np.full_like(s, 0.5)
    nz = s > 1e-4
    l = np.log1p(s[nz])
    out[nz] = (l - s[nz] / (1.0 + s[nz])) / (l * l)
    small = ~nz
    out[small] = 0.5 - s[small] / 6.0
    return out


def _solve_stream_snr(kappa: np.ndarray) -> np.ndarray:
    """Root ``s > 0`` of ``s / log1p(s) = kappa`` for each ``kappa > 1``.

    Safeguarded Newton inside a bracket.  The bracket starts at ``[0, hi]``
    with ``hi`` doubled until ``phi(hi) >= kappa``; Newton steps that leave the
    bracket are replaced by bisection.
    """
    kappa = np.asarray(kappa, dtype=float)
    lo = np.zeros_like(kappa)
    hi = np.maximum(4.0 * (kappa - 1.0), 1e-300)
    for _ in range(2100):
        short = _phi(hi) < kappa
        if not short.any():
            break
        hi[short] *= 2.0
    else:
        raise NumericalError("could not bracket the root")

    s = 2.0 * (kappa - 1.0)  # Newton step from s = 0
    s = np.clip(s, lo, hi)
    done = np.zeros(kappa.shape, dtype=bool)
    for _ in range(_MAX_ITER):
        f = _phi(s) - kappa
        lo = np.where(f < 0, s, lo)
        hi = np.where(f > 0, s, hi)
        step = f / _dphi(s)
        s_new = s - step
        outside = (s_new <= lo) | (s_new >= hi) | ~np.isfinite(s_new)
        s_new = np.where(outside, 0.5 * (lo + hi), s_new)
        conv = (np.abs(s_new - s) <= 4.0 * np.finfo(float).eps * s_new) | (f == 0)
        s = np.where(done, s, s_new)
        done |= conv
        if done.all():
            return s
    raise NumericalError(f"root solve did not converge in {_MAX_ITER} iterations")


def _streams(m, dof_cap):
    if dof_cap is None:
        return m
    return min(m, _check_m(dof_cap, "dof_cap"))


def residual(xi: float, eta: float, m: int, g: float, dof_cap: int | None = None) -> float:
    """``xi - k log2(1 + eta xi g / (M k))``; zero on the trade-off curve."""
    k = _streams(m, dof_cap)
    return xi - k * math.log1p(eta * xi * g / (m * k)) * LOG2E


def solve_xi_array(eta, m, g: float, tol: float = DEFAULT_TOL, dof_cap: int | None = None) -> np.ndarray:
    """Vectorized positive-branch solve; ``eta`` and ``m`` broadcast together.

    Returns 0 wherever ``eta`` does not exceed the Shannon limit.

    Raises:
        NumericalError: if any residual exceeds ``tol``.
    """
    g = _check_pos(g, "g")
    tol = _check_pos(tol, "tol")
    eta, m = np.broadcast_arrays(np.asarray(eta, dtype=float), np.asarray(m))
    if np.any(~(eta > 0)) or np.any(~np.isfinite(eta)):
        raise ValidationError("eta must be finite and > 0", field="eta")
    if np.any(m < 1) or np.any(m != np.floor(m)):
        raise ValidationError("m must be a positive integer", field="m")
    m = m.astype(np.int64)
    k = m if dof_cap is None else np.minimum(m, _check_m(dof_cap, "dof_cap"))

    kappa = eta * g / (m * LN2)
    xi = np.zeros(eta.shape)
    pos = kappa > 1.0
    if pos.any():
        s = _solve_stream_snr(kappa[pos])
        xi[pos] = k[pos] * np.log1p(s) * LOG2E
        res = xi[pos] - k[pos] * np.log1p(eta[pos] * xi[pos] * g / (m[pos] * k[pos])) * LOG2E
        if np.any(np.abs(res) > tol):
            raise NumericalError(f"trade-off residual {np.max(np.abs(res)):.3g} exceeds tol {tol:g}")
    return xi


def solve_xi(eta: float, m: int, g: float, tol: float = DEFAULT_TOL,
             dof_cap: int | None = None) -> TradeoffPoint:
    """Largest non-negative spectral efficiency consistent with energy per bit ``eta``.

    Args:
        eta: Normalized energy per bit, linear.
        m: Number of antennas (streams) per end.
        g: Channel gain; 1 gives the received-SNR normalization.
        tol: Bound on the absolute residual of the implicit equation.
        dof_cap: Optional cap on the number of usable spatial streams.

    Returns:
        The trade-off point; ``xi == 0`` when ``eta <= shannon_limit(m, g)``.
    """
    m = _check_m(m)
    eta = _check_pos(eta, "eta")
    xi = float(solve_xi_array(eta, m, g, tol=tol, dof_cap=dof_cap))
    return TradeoffPoint(eta=eta, eta_db=10.0 * math.log10(eta), xi=xi, m=m, g=float(g))


def inverse_eta(xi: float, m: int, g: float, dof_cap: int | None = None) -> float:
    """Energy per bit at which the curve reaches spectral efficiency ``xi``."""
    m = _check_m(m)
    xi = _check_pos(xi, "xi")
    g = _check_pos(g, "g")
    k = _streams(m, dof_cap)
    return math.expm1(xi * LN2 / k) * m * k / (g * xi)


def optimal_antenna_count(eta: float, g: float, m_max: int = DEFAULT_M_MAX,
                          dof_cap: int | None = None) -> tuple[int, float]:
    """Antenna count in ``1..m_max`` maximizing xi at energy per bit ``eta``.

    Ties go to the smallest count; ``(1, 0.0)`` when no count reaches a
    positive rate.
    """
    m_max = _check_m(m_max, "m_max")
    eta = _check_pos(eta, "eta")
    ms = np.arange(1, m_max + 1)
    xi = solve_xi_array(np.full(m_max, eta), ms, g, dof_cap=dof_cap)
    best = int(np.argmax(xi))
    return best + 1, float(xi[best])


def optimal_antenna_scan(eta_db, g: float, m_max: int = DEFAULT_M_MAX, dof_cap: int | None = None):
    """:func:`optimal_antenna_count` over a grid of ``eta`` values in dB.

    Returns:
        ``(m_star, xi_star)`` integer and float arrays aligned with ``eta_db``.
    """
    eta_db = np.asarray(eta_db, dtype=float)
    m_max = _check_m(m_max, "m_max")
    ms = np.arange(1, m_max + 1)
    m_star = np.empty(eta_db.shape, dtype=np.int64)
    xi_star = np.empty(eta_db.shape)
    for i, e in enumerate(eta_db):
        xi = solve_xi_array(np.full(m_max, 10.0 ** (e / 10.0)), ms, g, dof_cap=dof_cap)
        best = int(np.argmax(xi))
        m_star[i] = best + 1
        xi_star[i] = xi[best]
    return m_star, xi_star


def db_grid(lo: float, hi: float, steps: int) -> np.ndarray:
    """Inclusive uniform grid of ``steps`` points on ``[lo, hi]``."""
    if int(steps) != steps or steps < 2:
        raise ValidationError(f"steps must be an integer >= 2, got {steps!r}", field="steps")
    if not lo < hi:
        raise ValidationError(f"grid needs lo < hi, got {lo!r}:{hi!r}", field="eta_db")
    return np.linspace(lo, hi, int(steps))


def tradeoff_curve(m: int, g: float, eta_db_range: tuple[float, float], steps: int,
                   dof_cap: int | None = None) -> list[TradeoffPoint]:
    """Trade-off points on a uniform grid in ``10 log10 eta``."""
    m = _check_m(m)
    grid = db_grid(eta_db_range[0], eta_db_range[1], steps)
    eta = 10.0 ** (grid / 10.0)
    xi = solve_xi_array(eta, m, g, dof_cap=dof_cap)
    return [TradeoffPoint(float(e), float(d), float(x), m, float(g)) for e, d, x in zip(eta, grid, xi)]
