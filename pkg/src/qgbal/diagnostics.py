"""Residuals of the slaving hierarchy, balance-error norms, and spectrum fits.

The residual of level n measures the defect of the level-n slaved fields
in the three fast equations.  It has two algebraically equal forms: the
scaled difference of consecutive levels (cheap, from the iteration), and
the direct term-by-term defect (independent assembly; the mean-shear
component is the literal defect of the rotated stiff equation, which is
the perp-rotation of the level difference).  Their agreement is the
central correctness check on the iteration's signs and pairings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import ops
from .balance import BalanceHierarchy, BalanceSet, slaved_fields
from .field import SpectralField
from .norms import l2_norm, sobolev_norm
from .schedule import Schedule
from .state import ForcingSet, PrimitiveState


class DiagnosticsError(ValueError):
    pass


# ------------------------------------------------------------------ residuals


@dataclass
class ResidualTriple:
    """Fast-equation defects at one level: mean-shear pair, chi, phi parts."""

    level: int
    r_vz_u: SpectralField
    r_vz_v: SpectralField
    r_chi: SpectralField
    r_phi: SpectralField

    def sobolev_parts(self, s: float) -> tuple[float, float, float]:
        r_vbar = math.sqrt(sobolev_norm(self.r_vz_u, s) ** 2 + sobolev_norm(self.r_vz_v, s) ** 2)
        return (r_vbar, sobolev_norm(self.r_chi, s), sobolev_norm(self.r_phi, s))

    def aggregate_s(self, s: float) -> float:
        a, b, c = self.sobolev_parts(s)
        return a + b + c

    def aggregate_l2(self) -> float:
        r_vbar = math.sqrt(l2_norm(self.r_vz_u) ** 2 + l2_norm(self.r_vz_v) ** 2)
        return r_vbar + l2_norm(self.r_chi) + l2_norm(self.r_phi)


def residual_from_levels(b_n: BalanceSet, b_n1: BalanceSet, sched: Schedule) -> ResidualTriple:
    """Residual of level n as the scaled difference of levels n and n+1.

    The mean-shear component carries the perp rotation of the stiff term,
    so it equals the literal defect of the shear equation (for zonal shear
    forcing at level 0 this reproduces -ddz of the truncated mean forcing).
    """
    if b_n1.level != b_n.level + 1:
        raise DiagnosticsError(
            f"level mismatch: got levels {b_n.level} and {b_n1.level}, need consecutive"
        )
    inv_eps = 1.0 / sched.eps
    du = (b_n.vzu - b_n1.vzu) * inv_eps
    dv = (b_n.vzv - b_n1.vzv) * inv_eps
    return ResidualTriple(
        level=b_n.level,
        r_vz_u=-dv,  # (a, b)^perp = (-b, a)
        r_vz_v=du,
        r_chi=(b_n1.d3phi - b_n.d3phi) * inv_eps,
        r_phi=(b_n.d3x - b_n1.d3x) * inv_eps,
    )


def residual_direct(
    hierarchy: BalanceHierarchy, n: int, sched: Schedule, forcing: ForcingSet
) -> ResidualTriple:
    """Residual of level n assembled term by term from its definition.

    All non-tangent terms are recomputed through the field-level operators
    (an independent path from the iteration); the tangent terms reuse the
    exact forward derivatives in the direction of the slow tendency.
    """
    b = hierarchy.levels_unchecked(n)[n]
    qt = hierarchy.qtilde
    kap = sched.kappa
    mu, eps = sched.mu, sched.eps

    u, v, w, rho = slaved_fields(qt, b)
    adv_u = ops.advect(u, v, w, u)
    adv_v = ops.advect(u, v, w, v)
    adv_rho = ops.advect(u, v, w, rho)
    tang = hierarchy.tangent_in_g_direction(n)

    lp = lambda f: ops.low_pass(f, kap)  # noqa: E731

    # mean shear: defect of d/dt vbar_z + (1/eps) vbar_z^perp + flux = ...
    flux_u = ops.xy_average(ops.multiply(w, u))
    flux_v = ops.xy_average(ops.multiply(w, v))
    r_u = (
        lp(tang.vzu + ops.ddz(ops.ddz(flux_u)))
        + (-1.0 / eps) * b.vzv
        - mu * ops.ddz(ops.ddz(b.vzu))
        - lp(ops.ddz(forcing.fbar_u))
    )
    r_v = (
        lp(tang.vzv + ops.ddz(ops.ddz(flux_v)))
        + (1.0 / eps) * b.vzu
        - mu * ops.ddz(ops.ddz(b.vzv))
        - lp(ops.ddz(forcing.fbar_v))
    )

    s_chi = ops.laplacian3(ops.inv_laplacian2(ops.div2(adv_u, adv_v)))
    r_chi = (
        lp(tang.d3x + s_chi)
        - (1.0 / eps) * b.d3phi
        - mu * ops.laplacian3(b.d3x)
        - lp(ops.laplacian3(forcing.f_chi))
    )

    tang_phizz = ops.ddz(ops.ddz(ops.inv_laplacian3(tang.d3phi)))
    s_phi = ops.ddz(ops.ddz(ops.inv_laplacian2(ops.perp_div(adv_u, adv_v))))
    r_phi = (
        lp(tang_phizz + s_phi + ops.pz_project(ops.ddz(adv_rho)))
        + (1.0 / eps) * b.d3x
        - mu * ops.ddz(ops.ddz(b.d3phi))
        - lp(forcing.d2z_f_phi)
    )
    return ResidualTriple(
        level=n,
        r_vz_u=r_u.with_coeffs(r_u.coeffs, b.vzu.z_parity),
        r_vz_v=r_v.with_coeffs(r_v.coeffs, b.vzv.z_parity),
        r_chi=r_chi,
        r_phi=r_phi,
    )


# ------------------------------------------------------------ balance error


@dataclass(frozen=True)
class ErrorReport:
    """L2 distances between a state and its slaved approximation."""

    t: float
    err_v: float
    err_rho: float

    @property
    def combined(self) -> float:
        """err_v^2 + err_rho^2, the squared-sum error functional."""
        return self.err_v**2 + self.err_rho**2

    @property
    def rms(self) -> float:
        return math.sqrt(self.combined)


def balance_error(state: PrimitiveState, ref: PrimitiveState, t: float = 0.0) -> ErrorReport:
    err_v = math.sqrt(l2_norm(state.u - ref.u) ** 2 + l2_norm(state.v - ref.v) ** 2)
    err_rho = l2_norm(state.rho - ref.rho)
    return ErrorReport(t=t, err_v=err_v, err_rho=err_rho)


def parity_error_state(state: PrimitiveState) -> float:
    return max(state.u.parity_error(), state.v.parity_error(), state.rho.parity_error())


# ------------------------------------------------------------- spectrum fit


@dataclass(frozen=True)
class GevreyFit:
    sigma_fit: float
    amplitude: float
    fit_residual: float
    n_shells: int
    reliable: bool


def gevrey_fit(f: SpectralField, floor: float = 1e-14) -> GevreyFit:
    """Exponential decay rate of the coefficient spectrum.

    Unit-width shells in |k|; each shell above the floor contributes the
    point (|k| at the shell maximum, log max |F_k|), and the decay rate is
    minus the least-squares slope.  Fewer than 3 usable shells flags the
    fit as unreliable.
    """
    amp = np.abs(f.coeffs)
    kmag = np.broadcast_to(f.grid.kmag, f.grid.shape)
    shell_index = np.rint(kmag).astype(np.int64)
    n_max = int(shell_index.max())

    xs, ys = [], []
    for j in range(1, n_max + 1):
        members = shell_index == j
        if not np.any(members):
            continue
        local = np.where(members, amp, 0.0)
        peak = float(local.max())
        if peak <= floor:
            continue
        at = np.unravel_index(int(np.argmax(local)), local.shape)
        xs.append(float(kmag[at]))
        ys.append(math.log(peak))
    n_shells = len(xs)
    if n_shells < 3:
        return GevreyFit(0.0, 0.0, float("inf"), n_shells, reliable=False)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.sqrt(np.mean((np.polyval([slope, intercept], xs) - np.array(ys)) ** 2)))
    return GevreyFit(
        sigma_fit=float(-slope),
        amplitude=float(math.exp(intercept)),
        fit_residual=resid,
        n_shells=n_shells,
        reliable=True,
    )


def mode_split(f: SpectralField, kappa: float, sigma: float | None = None):
    """(low, high, |high|_0); optionally checks the exponential tail bound.

    With sigma given and the weighted norm finite, asserts
    |high|_0 <= exp(-sigma*kappa) * ||f||_sigma, which holds mode by mode.
    """
    from .norms import gevrey_norm

    low = ops.low_pass(f, kappa)
    high = f - low
    l2_high = l2_norm(high)
    if sigma is not None:
        gev = gevrey_norm(f, sigma)
        if math.isfinite(gev) and l2_high > math.exp(-sigma * kappa) * gev * (1.0 + 1e-12):
            raise DiagnosticsError("exponential tail bound violated (inconsistent norms)")
    return low, high, l2_high


# ---------------------------------------------------------------- CSV schema

CSV_COLUMNS = [
    "run_id",
    "eps",
    "n",
    "t",
    "err_v",
    "err_rho",
    "combined",
    "res_vbar",
    "res_chi",
    "res_phi",
    "res_aggregate_s",
    "sigma_fit",
    "energy",
    "parity_error",
]


def csv_row(**values) -> list[str]:
    """Assemble one row in schema order; absent entries become 'nan'."""
    unknown = set(values) - set(CSV_COLUMNS)
    if unknown:
        raise DiagnosticsError(f"unknown CSV columns: {sorted(unknown)}")
    out = []
    for col in CSV_COLUMNS:
        if col not in values or values[col] is None:
            out.append("nan")
        elif col in ("run_id",):
            out.append(str(values[col]))
        elif col in ("n",):
            out.append(str(int(values[col])))
        else:
            out.append(format(float(values[col]), ".17g"))
    return out
