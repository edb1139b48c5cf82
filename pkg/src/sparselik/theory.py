"""Detection-boundary constants for planning and checking experiments.

``rho_z`` and ``rho_z_segment`` give the normal-model boundary exponents; the
Poisson analogues are driven by the rate-ratio information ``poisson_info``
and the window functions ``g_omega`` / ``d_omega``, combined in
``rho_poisson``.  Sparsity beta means N^(1-beta) altered sequences; zeta is
the segment-length exponent T^zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "rho_z",
    "rho_z_segment",
    "poisson_info",
    "g_omega",
    "d_omega",
    "rho_poisson",
    "BoundaryParams",
    "boundary_constants",
]


def rho_z(beta: float) -> float:
    """Normal detection boundary for sparsity exponent beta in (1/2, 1)."""
    if not 0.5 < beta < 1.0:
        raise ValueError("beta must lie in (1/2, 1)")
    if beta <= 0.75:
        return beta - 0.5
    root = 1.0 - math.sqrt(1.0 - beta)
    return root * root


def rho_z_segment(beta: float, zeta: float) -> float:
    """Normal boundary when the altered segment has length exponent zeta.

    Defined for (1 - zeta)/2 < beta < 1 - zeta with 0 < zeta < 1; reduces to
    the same shape as ``rho_z`` scaled by 1 - zeta.
    """
    if not 0.0 < zeta < 1.0:
        raise ValueError("zeta must lie in (0, 1)")
    rest = 1.0 - zeta
    if not rest / 2.0 < beta < rest:
        raise ValueError("beta must lie in ((1 - zeta)/2, 1 - zeta)")
    if beta <= 0.75 * rest:
        return beta - rest / 2.0
    root = math.sqrt(rest) - math.sqrt(rest - beta)
    return root * root


def poisson_info(ratio: float) -> float:
    """Information per observation of a rate change mu -> ratio * mu at rate 1.

    I_r = r log(2r/(r+1)) + log(2/(r+1)); zero at ratio 1 and increasing.
    """
    if ratio < 1.0:
        raise ValueError("ratio must be >= 1")
    return ratio * math.log(2.0 * ratio / (ratio + 1.0)) + math.log(2.0 / (ratio + 1.0))


def g_omega(ratio: float, omega):
    """Power mean g(omega) = ((1 + r^omega)/2)^(1/omega); scalar or array omega."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise ValueError("omega must be > 0")
    out = ((1.0 + ratio**w) / 2.0) ** (1.0 / w)
    return float(out) if np.ndim(omega) == 0 else out


def d_omega(ratio: float, omega):
    """Entropy factor D(omega) with g'(omega) = D(omega) g(omega) / omega^2.

    D = (1/(1+r^w)) log(2/(1+r^w)) + (r^w/(1+r^w)) log(2 r^w/(1+r^w)).
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise ValueError("omega must be > 0")
    rw = ratio**w
    share = rw / (1.0 + rw)
    out = (1.0 - share) * np.log(2.0 / (1.0 + rw)) + share * np.log(2.0 * rw / (1.0 + rw))
    return float(out) if np.ndim(omega) == 0 else out


def _golden_max(fun, lo: float, hi: float, tol: float = 1e-10) -> tuple[float, float]:
    """Maximize a unimodal function on [lo, hi] by golden-section to width tol."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = fun(x1), fun(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = fun(x1)
    xm = 0.5 * (a + b)
    return xm, fun(xm)


def rho_poisson(beta: float, zeta: float, ratio: float) -> tuple[float, float]:
    """Poisson boundary: max over omega in ((1-zeta)/beta, 2] of
    (beta - (1-zeta)/omega) / (2 g(omega) - 1 - r).

    Returns (value, maximizer).  The objective is unimodal with at most one
    interior stationary point, so golden-section search converges; a coarse
    grid guards the bracket.
    """
    if not 0.0 < zeta < 1.0:
        raise ValueError("zeta must lie in (0, 1)")
    if not (1.0 - zeta) / 2.0 < beta < 1.0 - zeta:
        raise ValueError("beta must lie in ((1 - zeta)/2, 1 - zeta)")
    if ratio <= 1.0:
        raise ValueError("ratio must be > 1")
    # beta < 1 - zeta puts the bracket right of omega = 1, where the
    # denominator 2 g(omega) - 1 - r is positive
    lo = (1.0 - zeta) / beta

    def xi(omega: float) -> float:
        return (beta - (1.0 - zeta) / omega) / (2.0 * g_omega(ratio, omega) - 1.0 - ratio)

    omega_star, value = _golden_max(xi, lo, 2.0)
    # fall back to a dense grid if the golden bracket missed the mode
    coarse = np.linspace(lo + 1e-12, 2.0, 512)
    coarse_vals = [xi(float(w)) for w in coarse]
    if max(coarse_vals) > value + 1e-9:
        dense = np.linspace(lo + 1e-12, 2.0, 2_000_001)
        vals = (beta - (1.0 - zeta) / dense) / (2.0 * g_omega(ratio, dense) - 1.0 - ratio)
        pick = int(np.argmax(vals))
        omega_star, value = float(dense[pick]), float(vals[pick])
    return value, omega_star


@dataclass(frozen=True)
class BoundaryParams:
    """Exponents describing an experiment regime.

    ``beta`` is the sparsity exponent, ``zeta`` the segment-length exponent,
    ``ratio`` the Poisson rate ratio (None for the normal model).  The slack
    exponents ``delta``, ``eta``, ``epsilon`` and ``nu`` size finite-sample
    margins when planning runs and are carried along for reporting.
    """

    beta: float
    zeta: float | None = None
    ratio: float | None = None
    delta: float = 0.0
    eta: float = 0.0
    epsilon: float = 0.0
    nu: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if self.zeta is not None and not 0.0 < self.zeta < 1.0:
            raise ValueError("zeta must lie in (0, 1)")
        if self.ratio is not None and self.ratio <= 1.0:
            raise ValueError("ratio must be > 1")


def boundary_constants(params: BoundaryParams) -> dict[str, float]:
    """Every boundary constant whose domain the parameters satisfy."""
    out: dict[str, float] = {}
    if 0.5 < params.beta < 1.0:
        out["rho_z"] = rho_z(params.beta)
    if params.zeta is not None:
        rest = 1.0 - params.zeta
        if rest / 2.0 < params.beta < rest:
            out["rho_z_segment"] = rho_z_segment(params.beta, params.zeta)
    if params.ratio is not None:
        out["poisson_info"] = poisson_info(params.ratio)
        if params.zeta is not None:
            rest = 1.0 - params.zeta
            if rest / 2.0 < params.beta < rest:
                value, omega_star = rho_poisson(params.beta, params.zeta, params.ratio)
                out["rho_poisson"] = value
                out["omega_star"] = omega_star
    return out
