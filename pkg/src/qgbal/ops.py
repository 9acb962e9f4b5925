"""Differential and integral operators, projections, and spectral products.

All operators are diagonal in k except the physical-space product, which is
dealiased immediately.  Degenerate-mode conventions: inverse Laplacians set
the modes they cannot determine to zero (zero mean over the box for the 3D
inverse, zero mean on each horizontal plane for the 2D inverse), and the
vertical integral fixes its constant of integration so the primitive
vanishes on the z = 0 plane before the zero-box-mean projection.
"""

from __future__ import annotations

import numpy as np

from .field import EVEN, ODD, SpectralField, _reverse_axis, combine_mul_parity, flip_parity


class OperatorError(ValueError):
    """An operator was applied to input outside its contract."""


# ------------------------------------------------------------------ gradients


def ddx(f: SpectralField) -> SpectralField:
    return f.with_coeffs(1j * f.grid.kp1 * f.coeffs)


def ddy(f: SpectralField) -> SpectralField:
    return f.with_coeffs(1j * f.grid.kp2 * f.coeffs)


def ddz(f: SpectralField) -> SpectralField:
    return f.with_coeffs(1j * f.grid.kp3 * f.coeffs, flip_parity(f.z_parity))


def grad2(f: SpectralField) -> tuple[SpectralField, SpectralField]:
    """Horizontal gradient (d/dx, d/dy)."""
    return ddx(f), ddy(f)


def grad3(f: SpectralField) -> tuple[SpectralField, SpectralField, SpectralField]:
    return ddx(f), ddy(f), ddz(f)


def perp_grad(f: SpectralField) -> tuple[SpectralField, SpectralField]:
    """Skew gradient (-d/dy, d/dx)."""
    return -ddy(f), ddx(f)


def div2(fx: SpectralField, fy: SpectralField) -> SpectralField:
    return ddx(fx) + ddy(fy)


def perp_div(fx: SpectralField, fy: SpectralField) -> SpectralField:
    """Skew divergence -d(fx)/dy + d(fy)/dx (the vertical curl)."""
    return ddx(fy) - ddy(fx)


def laplacian2(f: SpectralField) -> SpectralField:
    return f.with_coeffs(-f.grid.k2h * f.coeffs)


def laplacian3(f: SpectralField) -> SpectralField:
    return f.with_coeffs(-f.grid.k2t * f.coeffs)


def inv_laplacian2(f: SpectralField) -> SpectralField:
    """Invert the horizontal Laplacian; k_h = 0 modes are set to zero."""
    g = f.grid
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(g.k2h > 0, f.coeffs / (-g.k2h), 0.0 + 0.0j)
    return f.with_coeffs(out)


def inv_laplacian3(f: SpectralField) -> SpectralField:
    """Invert the full Laplacian; the k = 0 mode is set to zero."""
    g = f.grid
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(g.k2t > 0, f.coeffs / (-g.k2t), 0.0 + 0.0j)
    return f.with_coeffs(out)


def inv_ddz(f: SpectralField) -> SpectralField:
    """Antiderivative in z with zero z-mean per horizontal mode.

    Requires the k3 = 0 content of the input to vanish (it does for any
    z-derivative of a periodic field).
    """
    g = f.grid
    k30 = np.abs(np.asarray(f.coeffs[:, :, 0]))
    scale = max(float(np.max(np.abs(f.coeffs))), 1.0)
    if float(np.max(k30)) > 1e-11 * scale:
        raise OperatorError("inv_ddz: input has nonzero k3=0 content")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(g.k3 != 0, f.coeffs / (1j * g.kp3), 0.0 + 0.0j)
    return f.with_coeffs(out, flip_parity(f.z_parity))


# ------------------------------------------------------------------ integrals


def vertical_integral(f: SpectralField) -> SpectralField:
    """``g(x, y, z) = int_0^z f dz'`` with ``g(.,.,0) = 0`` per mode.

    The primitive of the k3 = 0 content of a field is not periodic, so the
    input must carry none; odd-tagged fields satisfy this automatically.
    After fixing the constants the result is projected to zero box mean
    (only the horizontal-mean fiber is affected).
    """
    g = f.grid
    k30 = np.abs(np.asarray(f.coeffs[:, :, 0]))
    scale = max(float(np.max(np.abs(f.coeffs))), 1.0)
    if float(np.max(k30)) > 1e-11 * scale:
        raise OperatorError(
            "vertical_integral: input has k3=0 content; the primitive would not be periodic"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(g.k3 != 0, f.coeffs / (1j * g.kp3), 0.0 + 0.0j)
    # constant of integration: g(x, y, 0) = 0 for every horizontal mode
    out[:, :, 0] = -np.sum(out[:, :, 1:], axis=2)
    out[0, 0, 0] = 0.0
    return f.with_coeffs(out, flip_parity(f.z_parity))


# ---------------------------------------------------------------- projections


def xy_average(f: SpectralField) -> SpectralField:
    """Keep only the horizontal-mean modes (k1 = k2 = 0)."""
    out = f.grid.zeros()
    out[0, 0, :] = f.coeffs[0, 0, :]
    return f.with_coeffs(out)


def pz_project(f: SpectralField) -> SpectralField:
    """Remove the horizontal mean: identity minus ``xy_average``."""
    out = f.coeffs.copy()
    out[0, 0, :] = 0.0
    return f.with_coeffs(out)


def low_pass(f: SpectralField, kappa: float) -> SpectralField:
    """Retain modes with |k| < kappa (strict; Euclidean norm of integer k)."""
    if kappa <= 0:
        raise OperatorError(f"low_pass: kappa must be positive, got {kappa}")
    return f.with_coeffs(np.where(f.grid.kmag < kappa, f.coeffs, 0.0 + 0.0j))


def high_pass(f: SpectralField, kappa: float) -> SpectralField:
    if kappa <= 0:
        raise OperatorError(f"high_pass: kappa must be positive, got {kappa}")
    return f.with_coeffs(np.where(f.grid.kmag < kappa, 0.0 + 0.0j, f.coeffs))


def parity_project(f: SpectralField, parity: str) -> SpectralField:
    """Symmetrize (even) or antisymmetrize (odd) the coefficients in k3."""
    if parity not in (EVEN, ODD):
        raise OperatorError(f"parity_project: parity must be even or odd, got {parity!r}")
    rev = _reverse_axis(f.coeffs, 2)
    sign = 1.0 if parity == EVEN else -1.0
    return f.with_coeffs(0.5 * (f.coeffs + sign * rev), parity)


def zero_mean(f: SpectralField) -> SpectralField:
    out = f.coeffs.copy()
    out[0, 0, 0] = 0.0
    return f.with_coeffs(out)


def drop_k3_zero(f: SpectralField) -> SpectralField:
    """Zero the k3 = 0 plane (removes the z-constant part per horizontal mode)."""
    out = f.coeffs.copy()
    out[:, :, 0] = 0.0
    return f.with_coeffs(out)


def dealias(f: SpectralField) -> SpectralField:
    """Zero modes outside the per-axis dealias band (and the Nyquist planes)."""
    return f.with_coeffs(np.where(f.grid.dealias_mask, f.coeffs, 0.0 + 0.0j))


# ------------------------------------------------------------------- products


def multiply(f: SpectralField, g: SpectralField) -> SpectralField:
    """Pointwise product evaluated in physical space, then dealiased."""
    f._check_same_grid(g)
    prod = f.to_physical() * g.to_physical()
    out = SpectralField.from_physical(f.grid, prod, combine_mul_parity(f.z_parity, g.z_parity))
    return dealias(out)


def advect(
    u: SpectralField,
    v: SpectralField,
    w: SpectralField,
    f: SpectralField,
) -> SpectralField:
    """Dealiased advection term ``u df/dx + v df/dy + w df/dz``."""
    fx, fy, fz = grad3(f)
    phys = (
        u.to_physical() * fx.to_physical()
        + v.to_physical() * fy.to_physical()
        + w.to_physical() * fz.to_physical()
    )
    parity = combine_mul_parity(u.z_parity, fx.z_parity)
    return dealias(SpectralField.from_physical(f.grid, phys, parity))
