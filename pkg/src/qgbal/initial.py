"""Reproducible slow-state families and random test states.

Three built-in families for the slow variable: "zonal" (y-independent),
"dipole" (two coupled low modes, breaks zonal symmetry), and
"random-gevrey" (seeded coefficients with prescribed exponential decay and
unit-modulus phases).  All are even in z, zero-mean, Hermitian, and
restricted to the slow space when a cutoff is given.
"""

from __future__ import annotations

import numpy as np

from . import ops
from .field import EVEN, ODD, SpectralField, hermitianize
from .grid import Grid
from .state import PrimitiveState, derive_forcings

QTILDE_FAMILIES = ("zonal", "dipole", "random-gevrey")


def qtilde_zonal(grid: Grid, amplitude: float = 0.5) -> SpectralField:
    """y-independent slow state: amplitude * cos(x') cos(z')."""
    x, _, z = grid.meshgrid()
    vals = amplitude * np.cos(2 * np.pi * x / grid.L1) * np.cos(2 * np.pi * z / grid.L3)
    return SpectralField.from_physical(grid, vals, EVEN)


def qtilde_dipole(grid: Grid, amplitude: float = 0.5) -> SpectralField:
    """Two coupled modes: amplitude * (cos x' + cos y') cos z'."""
    x, y, z = grid.meshgrid()
    vals = (
        amplitude
        * (np.cos(2 * np.pi * x / grid.L1) + np.cos(2 * np.pi * y / grid.L2))
        * np.cos(2 * np.pi * z / grid.L3)
    )
    return SpectralField.from_physical(grid, vals, EVEN)


def qtilde_random_gevrey(
    grid: Grid,
    kappa: float,
    decay: float = 0.8,
    seed: int = 0,
    amplitude: float = 0.5,
) -> SpectralField:
    """Seeded coefficients exp(-decay |k|) with unit-modulus phases.

    Hermitian and even-parity symmetrized, zero mean, supported strictly
    below the cutoff.
    """
    f = random_field(grid, decay=decay, seed=seed, amplitude=amplitude, z_parity=EVEN)
    return ops.low_pass(f, kappa)


def make_qtilde(
    family: str, grid: Grid, kappa: float, amplitude: float = 0.5, seed: int = 0
) -> SpectralField:
    if family == "zonal":
        q = qtilde_zonal(grid, amplitude)
    elif family == "dipole":
        q = qtilde_dipole(grid, amplitude)
    elif family == "random-gevrey":
        q = qtilde_random_gevrey(grid, kappa, seed=seed, amplitude=amplitude)
    else:
        raise ValueError(f"unknown qtilde family {family!r}; choose from {QTILDE_FAMILIES}")
    q = ops.low_pass(q, kappa)
    if float(np.max(np.abs(q.coeffs))) == 0.0:
        raise ValueError(f"family {family!r} is empty below kappa={kappa}")
    return q


# ---------------------------------------------------------- random fields


def random_field(
    grid: Grid,
    decay: float = 0.8,
    seed: int = 0,
    amplitude: float = 1.0,
    z_parity: str = EVEN,
) -> SpectralField:
    """Random field with |F_k| = amplitude * exp(-decay |k|) exactly.

    Phases are built antisymmetric under k -> -k and independent of k3, so
    the Hermitian and parity symmetries hold by construction and never
    shrink the magnitudes (odd fields carry an extra i*sign(k3) factor and
    lose only the k3 = 0 plane).
    """
    rng = np.random.default_rng(seed)
    u = 2.0 * np.pi * rng.random((grid.N1, grid.N2))
    u_neg = u[(-np.arange(grid.N1)) % grid.N1][:, (-np.arange(grid.N2)) % grid.N2]
    theta = (u - u_neg)[:, :, None]
    coeffs = amplitude * np.exp(-decay * grid.kmag) * np.exp(1j * theta)
    if z_parity == ODD:
        coeffs = coeffs * (1j * np.sign(np.broadcast_to(grid.k3, grid.shape)))
    coeffs = np.where(grid.dealias_mask, coeffs, 0.0)
    f = hermitianize(SpectralField(grid, coeffs, z_parity))
    if z_parity in (EVEN, ODD):
        f = ops.parity_project(f, z_parity)
    return ops.zero_mean(f)


def random_primitive_state(
    grid: Grid,
    decay: float = 0.8,
    seed: int = 0,
    amplitude: float = 1.0,
) -> PrimitiveState:
    """Random valid prognostic state (symmetries, means, and the constraint
    that the vertically averaged horizontal flow is divergence-free)."""
    u = random_field(grid, decay, seed * 3 + 0, amplitude, EVEN)
    v = random_field(grid, decay, seed * 3 + 1, amplitude, EVEN)
    rho = random_field(grid, decay, seed * 3 + 2, amplitude, ODD)

    # remove the barotropic divergence: subtract grad of il2(div) on k3 = 0
    div = ops.div2(u, v)
    baro = div.coeffs.copy()
    baro[:, :, 1:] = 0.0
    pot = ops.inv_laplacian2(div.with_coeffs(baro))
    px, py = ops.grad2(pot)
    u = u - px.with_coeffs(px.coeffs, EVEN)
    v = v - py.with_coeffs(py.coeffs, EVEN)
    return PrimitiveState(u=u, v=v, rho=rho).validate()


def shear_forcing(grid: Grid, amplitude: float = 1.0):
    """Zonal mean-shear forcing f_v = (amplitude cos z', 0), f_rho = 0."""
    _, _, z = grid.meshgrid()
    f_u = SpectralField.from_physical(grid, amplitude * np.cos(2 * np.pi * z / grid.L3), EVEN)
    f_v = SpectralField.zeros(grid, EVEN)
    f_rho = SpectralField.zeros(grid, ODD)
    return derive_forcings(f_u, f_v, f_rho)


def random_forcing(grid: Grid, decay: float = 1.0, seed: int = 99, amplitude: float = 0.2):
    f_u = random_field(grid, decay, seed * 3 + 0, amplitude, EVEN)
    f_v = random_field(grid, decay, seed * 3 + 1, amplitude, EVEN)
    f_rho = random_field(grid, decay, seed * 3 + 2, amplitude, ODD)
    return derive_forcings(f_u, f_v, f_rho)
