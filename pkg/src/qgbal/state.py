"""Prognostic states and the bijection to potential-vorticity variables.

``PrimitiveState`` holds the horizontal velocity pair (even in z) and the
perturbation density (odd in z).  ``decompose`` maps it to the transformed
set (q, vbar, chi, phi): linearised potential vorticity, horizontal-mean
shear profile, velocity potential, and the ageostrophic pressure potential.
``reconstruct`` inverts the map and also returns the diagnostic vertical
velocity and pressure.

Conventions for the underdetermined sectors:

* ``chi`` has zero mean on every horizontal plane (the 2D inverse Laplacian
  convention), and a valid state has no vertically averaged horizontal
  divergence, so chi carries no k3 = 0 content.
* ``phi`` is stored without its k3 = 0 plane (the density is odd in z, so
  no dynamical quantity sees that plane).  The pressure returned by
  ``reconstruct`` re-anchors the z-constant of phi so that the potential
  vanishes on z = 0, which reproduces the vertical-integral normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ops
from .field import EVEN, ODD, SpectralField
from .grid import Grid


class StateError(ValueError):
    """A state violates the symmetry or mean conventions."""


_TOL = 1e-10


def _check_parity(f: SpectralField, parity: str, name: str) -> None:
    if f.z_parity != parity:
        raise StateError(f"{name} must be tagged {parity}, got {f.z_parity}")
    scale = max(float(np.max(np.abs(f.coeffs))), 1.0)
    err = f.parity_error()
    if err > _TOL * scale:
        raise StateError(f"{name} violates {parity} z-symmetry (error {err:.3e})")


def _check_zero_mean(f: SpectralField, name: str) -> None:
    scale = max(float(np.max(np.abs(f.coeffs))), 1.0)
    if abs(f.coeffs[0, 0, 0]) > _TOL * scale:
        raise StateError(f"{name} must have zero box mean")


@dataclass
class PrimitiveState:
    """Horizontal velocity (u, v) and perturbation density rho."""

    u: SpectralField
    v: SpectralField
    rho: SpectralField

    def validate(self) -> "PrimitiveState":
        _check_parity(self.u, EVEN, "u")
        _check_parity(self.v, EVEN, "v")
        _check_parity(self.rho, ODD, "rho")
        for f, name in ((self.u, "u"), (self.v, "v"), (self.rho, "rho")):
            _check_zero_mean(f, name)
        # the vertically averaged horizontal flow must be divergence-free,
        # otherwise the diagnostic w is not periodic
        div = ops.div2(self.u, self.v)
        barotropic = np.abs(div.coeffs[:, :, 0])
        scale = max(float(np.max(np.abs(div.coeffs))), 1.0)
        if float(np.max(barotropic)) > _TOL * scale:
            raise StateError("barotropic part of (u, v) is not divergence-free")
        return self

    @property
    def grid(self) -> Grid:
        return self.u.grid

    def fields(self) -> tuple[SpectralField, SpectralField, SpectralField]:
        return self.u, self.v, self.rho

    @classmethod
    def zeros(cls, grid: Grid) -> "PrimitiveState":
        return cls(
            SpectralField.zeros(grid, EVEN),
            SpectralField.zeros(grid, EVEN),
            SpectralField.zeros(grid, ODD),
        )

    def __add__(self, other: "PrimitiveState") -> "PrimitiveState":
        return PrimitiveState(self.u + other.u, self.v + other.v, self.rho + other.rho)

    def __sub__(self, other: "PrimitiveState") -> "PrimitiveState":
        return PrimitiveState(self.u - other.u, self.v - other.v, self.rho - other.rho)

    def __mul__(self, scalar: float) -> "PrimitiveState":
        return PrimitiveState(self.u * scalar, self.v * scalar, self.rho * scalar)

    __rmul__ = __mul__


@dataclass
class QGDecomposition:
    """Transformed variables (q, vbar, chi, phi).

    ``vbar_u``/``vbar_v`` are horizontal-mean profiles (support on k1 = k2 = 0),
    ``q`` the linearised potential vorticity, ``chi`` the velocity potential,
    ``phi`` the ageostrophic potential (k3 = 0 plane dropped, see module doc).
    """

    q: SpectralField
    vbar_u: SpectralField
    vbar_v: SpectralField
    chi: SpectralField
    phi: SpectralField

    @property
    def grid(self) -> Grid:
        return self.q.grid

    @classmethod
    def zeros(cls, grid: Grid) -> "QGDecomposition":
        return cls(
            SpectralField.zeros(grid, EVEN),
            SpectralField.zeros(grid, EVEN),
            SpectralField.zeros(grid, EVEN),
            SpectralField.zeros(grid, EVEN),
            SpectralField.zeros(grid, EVEN),
        )


def streamfunction(q: SpectralField, phi: SpectralField) -> SpectralField:
    """psi with Delta3 psi = q + d2(phi)/dz2 and zero box mean."""
    return ops.inv_laplacian3(q + ops.ddz(ops.ddz(phi)))


def decompose(state: PrimitiveState) -> QGDecomposition:
    """Map (u, v, rho) to (q, vbar, chi, phi); input conventions are checked."""
    state.validate()
    u, v, rho = state.fields()

    q = ops.perp_div(u, v) - ops.ddz(rho)
    vbar_u = ops.xy_average(u)
    vbar_v = ops.xy_average(v)
    chi = ops.inv_laplacian2(ops.div2(u, v))
    integrand = ops.inv_laplacian2(ops.laplacian3(rho) + ops.ddz(q))
    phi = ops.drop_k3_zero(ops.vertical_integral(integrand))
    return QGDecomposition(q=q, vbar_u=vbar_u, vbar_v=vbar_v, chi=chi, phi=phi)


def reconstruct(
    dec: QGDecomposition,
) -> tuple[PrimitiveState, SpectralField, SpectralField]:
    """Invert the decomposition; returns (state, w, p).

    The vertical velocity follows from incompressibility and vanishes on
    z = 0; the pressure is psi - phi with phi's z-constant re-anchored so
    the potential vanishes on z = 0 pointwise.
    """
    psi = streamfunction(dec.q, dec.phi)
    psix, psiy = ops.perp_grad(psi)
    chix, chiy = ops.grad2(dec.chi)
    u = dec.vbar_u + psix + chix
    v = dec.vbar_v + psiy + chiy
    rho = ops.inv_laplacian3(ops.laplacian2(ops.ddz(dec.phi)) - ops.ddz(dec.q))

    w = -ops.vertical_integral(ops.laplacian2(dec.chi))

    phi_anchored = dec.phi.coeffs.copy()
    phi_anchored[:, :, 0] = -np.sum(dec.phi.coeffs[:, :, 1:], axis=2)
    phi_anchored[0, 0, 0] = 0.0
    p = psi - dec.phi.with_coeffs(phi_anchored)

    state = PrimitiveState(
        u=u.with_coeffs(u.coeffs, EVEN),
        v=v.with_coeffs(v.coeffs, EVEN),
        rho=rho.with_coeffs(rho.coeffs, ODD),
    )
    return state, w.with_coeffs(w.coeffs, ODD), p.with_coeffs(p.coeffs, EVEN)


def geostrophic_state(q: SpectralField) -> PrimitiveState:
    """The balanced inversion v = perp_grad(inv_laplacian3 q), rho = -d/dz inv_laplacian3 q."""
    psi = ops.inv_laplacian3(q)
    gx, gy = ops.perp_grad(psi)
    rho = -ops.ddz(psi)
    return PrimitiveState(
        u=gx.with_coeffs(gx.coeffs, EVEN),
        v=gy.with_coeffs(gy.coeffs, EVEN),
        rho=rho.with_coeffs(rho.coeffs, ODD),
    )


@dataclass
class ForcingSet:
    """Body forcing for the momentum pair (even) and density (odd).

    Derived spectral forcings for the transformed equations are computed
    once at construction; ``d2z_f_phi`` stores d2(f_phi)/dz2, the only
    combination the dynamics uses.
    """

    f_u: SpectralField
    f_v: SpectralField
    f_rho: SpectralField
    f_q: SpectralField
    f_chi: SpectralField
    fbar_u: SpectralField
    fbar_v: SpectralField
    d2z_f_phi: SpectralField

    @property
    def grid(self) -> Grid:
        return self.f_u.grid

    @classmethod
    def zero(cls, grid: Grid) -> "ForcingSet":
        return derive_forcings(
            SpectralField.zeros(grid, EVEN),
            SpectralField.zeros(grid, EVEN),
            SpectralField.zeros(grid, ODD),
        )

    def is_zero(self) -> bool:
        return (
            float(np.max(np.abs(self.f_u.coeffs))) == 0.0
            and float(np.max(np.abs(self.f_v.coeffs))) == 0.0
            and float(np.max(np.abs(self.f_rho.coeffs))) == 0.0
        )


def derive_forcings(
    f_u: SpectralField, f_v: SpectralField, f_rho: SpectralField
) -> ForcingSet:
    """Build a ForcingSet, deriving the transformed-equation forcings."""
    _check_parity(f_u, EVEN, "f_u")
    _check_parity(f_v, EVEN, "f_v")
    _check_parity(f_rho, ODD, "f_rho")
    for f, name in ((f_u, "f_u"), (f_v, "f_v"), (f_rho, "f_rho")):
        _check_zero_mean(f, name)

    f_q = ops.perp_div(f_u, f_v) - ops.ddz(f_rho)
    f_chi = ops.inv_laplacian2(ops.div2(f_u, f_v))
    fbar_u = ops.xy_average(f_u)
    fbar_v = ops.xy_average(f_v)
    d2z_f_phi = ops.inv_laplacian2(ops.ddz(ops.ddz(ops.perp_div(f_u, f_v)))) + ops.pz_project(
        ops.ddz(f_rho)
    )
    return ForcingSet(
        f_u=f_u,
        f_v=f_v,
        f_rho=f_rho,
        f_q=f_q,
        f_chi=f_chi,
        fbar_u=fbar_u,
        fbar_v=fbar_v,
        d2z_f_phi=d2z_f_phi,
    )
