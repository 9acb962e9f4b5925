"""Coefficient-space norms: L2, Sobolev H^s, and the exponentially weighted norm.

Norms are sums over Fourier coefficients without the box-volume factor; the
physical L2 integral equals ``l2_norm(f)**2 * grid.volume`` (Parseval).  The
Sobolev weight uses the physical wavevector k', the exponential (Gevrey-type)
weight uses the integer-vector magnitude |k|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import SpectralField


def l2_norm(f: SpectralField) -> float:
    return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2)))


def sobolev_norm(f: SpectralField, s: float) -> float:
    w = (1.0 + f.grid.k2t) ** s
    return float(np.sqrt(np.sum(w * np.abs(f.coeffs) ** 2)))


def gevrey_norm(f: SpectralField, sigma: float) -> float:
    """``sqrt(sum_k exp(2*sigma*|k|) |F_k|^2)``; +inf if the sum overflows."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    with np.errstate(over="ignore"):
        amp2 = np.abs(f.coeffs) ** 2
    exponent = 2.0 * sigma * f.grid.kmag
    # overflow guard: only modes that actually carry energy matter
    active = amp2 > 0
    if np.any(active):
        log_terms = exponent[active] + np.log(amp2[active])
        if float(np.max(log_terms)) > 700.0:
            return float("inf")
    with np.errstate(over="raise"):
        try:
            total = np.sum(np.exp(exponent) * amp2)
        except FloatingPointError:
            return float("inf")
    return float(np.sqrt(total))


@dataclass(frozen=True)
class NormReport:
    """L2, Sobolev, and exponential-weight norms of one field."""

    l2: float
    sobolev_s: float
    gevrey_sigma: float

    @classmethod
    def of(cls, f: SpectralField, s: float, sigma: float) -> "NormReport":
        return cls(l2=l2_norm(f), sobolev_s=sobolev_norm(f, s), gevrey_sigma=gevrey_norm(f, sigma))


def l2_norm_pair(fields) -> float:
    """Combined L2 norm of several fields, sqrt(sum of squared norms)."""
    return float(np.sqrt(sum(l2_norm(f) ** 2 for f in fields)))


def sobolev_norm_pair(fields, s: float) -> float:
    return float(np.sqrt(sum(sobolev_norm(f, s) ** 2 for f in fields)))


def physical_l2_integral(f: SpectralField) -> float:
    """Quadrature of ``int |f|^2 dx`` on the collocation grid."""
    phys = f.to_physical()
    return float(np.mean(phys**2) * f.grid.volume)
