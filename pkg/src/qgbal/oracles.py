"""Cross-check battery used by the `check` subcommand.

Each check compares two mathematically equal quantities computed through
different code paths and reports the measured discrepancy against a fixed
threshold.  The full acceptance suite (tests/) covers the same ground at
the contract tolerances; this battery is a fast command-line smoke check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ops
from .balance import BalanceHierarchy
from .diagnostics import residual_direct, residual_from_levels
from .field import SpectralField
from .grid import Grid
from .initial import qtilde_random_gevrey, random_forcing, random_primitive_state
from .norms import l2_norm
from .pesolver import (
    rhs_primitive,
    rhs_qxf,
    to_transformed,
    transformed_tendency_of_primitive,
)
from .schedule import make_schedule
from .state import ForcingSet, decompose, reconstruct


@dataclass(frozen=True)
class OracleResult:
    name: str
    ok: bool
    value: float
    threshold: float

    @property
    def detail(self) -> str:
        return f"measured {self.value:.3e} vs threshold {self.threshold:.3e}"


def _state_scale(state) -> float:
    return max(l2_norm(state.u), l2_norm(state.v), l2_norm(state.rho), 1e-30)


def check_roundtrip(grid: Grid, seed: int) -> OracleResult:
    w = random_primitive_state(grid, seed=seed)
    back, _, _ = reconstruct(decompose(w))
    err = max(
        float(np.max(np.abs((back.u - w.u).coeffs))),
        float(np.max(np.abs((back.v - w.v).coeffs))),
        float(np.max(np.abs((back.rho - w.rho).coeffs))),
    )
    rel = err / _state_scale(w)
    return OracleResult("decompose/reconstruct round trip", rel <= 1e-12, rel, 1e-12)


def check_equivalence(grid: Grid, seed: int, eps: float = 1e-2) -> OracleResult:
    sched = make_schedule(eps, 0.5, 0.05)
    forcing = random_forcing(grid, seed=seed + 13)
    w = random_primitive_state(grid, seed=seed, amplitude=0.5)
    lhs = transformed_tendency_of_primitive(rhs_primitive(w, sched, forcing))
    rhs = rhs_qxf(to_transformed(w), sched, forcing)
    num = max(float(np.max(np.abs((a - b).coeffs))) for a, b in zip(lhs.fields(), rhs.fields()))
    den = max(max(float(np.max(np.abs(f.coeffs))) for f in rhs.fields()), 1e-30)
    rel = num / den
    return OracleResult("velocity-form vs transformed-form tendency", rel <= 1e-10, rel, 1e-10)


def check_skew_neutrality(grid: Grid, seed: int, eps: float = 1e-4) -> OracleResult:
    sched = make_schedule(eps, 0.5, 0.05)
    forcing = ForcingSet.zero(grid)
    w = random_primitive_state(grid, seed=seed, amplitude=0.5)
    dec = decompose(w)
    _, wvert, p = reconstruct(dec)
    u, v, rho = w.fields()
    px, py = ops.grad2(p)

    def inner(a: SpectralField, b: SpectralField) -> float:
        return float(np.real(np.sum(a.coeffs * np.conj(b.coeffs))))

    skew = (1.0 / sched.eps) * (
        inner(u, -v) + inner(v, u) + inner(u, px) + inner(v, py) - inner(rho, wvert)
    )
    scale = (l2_norm(u) ** 2 + l2_norm(v) ** 2 + l2_norm(rho) ** 2) / sched.eps
    rel = abs(skew) / scale
    return OracleResult("stiff-term energy neutrality", rel <= 1e-12, rel, 1e-12)


def check_tangent_fd(grid: Grid, seed: int, eps: float = 6.25e-2, n: int = 2) -> OracleResult:
    from .balance import slaved_fields, well_prepared_init

    sched = make_schedule(eps, 0.5, 0.05)
    forcing = random_forcing(grid, seed=seed + 17, amplitude=0.1)
    qt = qtilde_random_gevrey(grid, sched.kappa, seed=seed, amplitude=0.4)
    direction = qtilde_random_gevrey(grid, sched.kappa, seed=seed + 1, amplitude=1.0)
    h = 1e-5

    hier = BalanceHierarchy(qt, sched, forcing)
    tangents = hier.tangent(n, direction)
    wp = well_prepared_init(qt + h * direction, sched, forcing, n)
    wm = well_prepared_init(qt - h * direction, sched, forcing, n)

    # compare through the slaved state map (exercises all three functions);
    # its directional derivative is the slaved map applied to (direction,
    # tangent balance set) since the map is affine in each argument
    fd_u = (wp.u - wm.u) * (0.5 / h)
    fd_v = (wp.v - wm.v) * (0.5 / h)
    fd_r = (wp.rho - wm.rho) * (0.5 / h)
    du, dv, _, drho = slaved_fields(direction, tangents[n])
    err = max(
        float(np.max(np.abs((fd_u - du).coeffs))),
        float(np.max(np.abs((fd_v - dv).coeffs))),
        float(np.max(np.abs((fd_r - drho).coeffs))),
    )
    scale = max(
        float(np.max(np.abs(du.coeffs))),
        float(np.max(np.abs(dv.coeffs))),
        float(np.max(np.abs(drho.coeffs))),
        1e-30,
    )
    rel = err / scale
    return OracleResult(f"balance tangent vs central differences (n={n})", rel <= 1e-6, rel, 1e-6)


def check_residual_identity(grid: Grid, seed: int, eps: float = 1e-2) -> OracleResult:
    sched = make_schedule(eps, 0.5, 0.05)
    forcing = random_forcing(grid, seed=seed + 29, amplitude=0.1)
    qt = qtilde_random_gevrey(grid, sched.kappa, seed=seed, amplitude=0.4)
    hier = BalanceHierarchy(qt, sched, forcing)
    worst = 0.0
    levels = hier.levels_unchecked(sched.n_star + 1)
    for n in range(sched.n_star + 1):
        a = residual_from_levels(levels[n], levels[n + 1], sched)
        b = residual_direct(hier, n, sched, forcing)
        num = max(
            float(np.max(np.abs((a.r_vz_u - b.r_vz_u).coeffs))),
            float(np.max(np.abs((a.r_vz_v - b.r_vz_v).coeffs))),
            float(np.max(np.abs((a.r_chi - b.r_chi).coeffs))),
            float(np.max(np.abs((a.r_phi - b.r_phi).coeffs))),
        )
        den = max(
            float(np.max(np.abs(b.r_chi.coeffs))),
            float(np.max(np.abs(b.r_phi.coeffs))),
            float(np.max(np.abs(b.r_vz_u.coeffs))),
            float(np.max(np.abs(b.r_vz_v.coeffs))),
            1e-30,
        )
        worst = max(worst, num / den)
    return OracleResult("residual dual-formula agreement", worst <= 1e-9, worst, 1e-9)


def run_oracles(grid: Grid | None = None, seed: int = 0) -> list[OracleResult]:
    g = grid if grid is not None else Grid(16, 16, 16)
    return [
        check_roundtrip(g, seed),
        check_equivalence(g, seed),
        check_skew_neutrality(g, seed),
        check_tangent_fd(g, seed),
        check_residual_identity(g, seed),
    ]
