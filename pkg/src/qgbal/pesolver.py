"""Time integration of the rotating stratified primitive equations.

Two algebraically equivalent right-hand sides are provided: the velocity
form ``rhs_primitive`` acting on (u, v, rho), and the transformed form
``rhs_qxf`` acting on the prognostic set (q, vbar_z, lap3 chi, phi_zz) in
which the stiff 1/eps skew part is block-diagonal per mode.  Stepping is
always done on the transformed set with the stiff-plus-diffusive linear
part applied exactly per mode (matrix exponential) and explicit
Runge-Kutta stages on the nonlinear and forcing terms (Lawson integrating
factor, RK4 by default).

The k3 = 0, k_h != 0 sector has no phi degree of freedom and the velocity
potential is constrained to vanish there (the vertically averaged
horizontal flow is divergence-free); the chi tendency in that sector is
pinned to zero, which matches the velocity-form dynamics once the
z-constant part of the pressure takes its constraint-preserving value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ops
from .field import EVEN, ODD, SpectralField, hermitianize
from .grid import Grid
from .schedule import Schedule, StepperConfig
from .state import (
    ForcingSet,
    PrimitiveState,
    QGDecomposition,
    decompose,
    reconstruct,
)


class SolverBlowupError(RuntimeError):
    """Raised when the state stops being finite; carries the last good state."""

    def __init__(self, t: float, last_good):
        super().__init__(f"non-finite state detected at t={t:.6g}")
        self.t = t
        self.last_good = last_good


@dataclass
class TransformedState:
    """Prognostic variables (q, vbar_z pair, lap3 chi, phi_zz)."""

    q: SpectralField
    vzu: SpectralField
    vzv: SpectralField
    d3chi: SpectralField
    phizz: SpectralField

    @property
    def grid(self) -> Grid:
        return self.q.grid

    def fields(self):
        return self.q, self.vzu, self.vzv, self.d3chi, self.phizz

    @classmethod
    def zeros(cls, grid: Grid) -> "TransformedState":
        return cls(
            SpectralField.zeros(grid, EVEN),
            SpectralField.zeros(grid, ODD),
            SpectralField.zeros(grid, ODD),
            SpectralField.zeros(grid, EVEN),
            SpectralField.zeros(grid, EVEN),
        )

    def __add__(self, other):
        return TransformedState(*(a + b for a, b in zip(self.fields(), other.fields())))

    def __sub__(self, other):
        return TransformedState(*(a - b for a, b in zip(self.fields(), other.fields())))

    def __mul__(self, scalar: float):
        return TransformedState(*(a * scalar for a in self.fields()))

    __rmul__ = __mul__

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(f.coeffs)) for f in self.fields())

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(f.coeffs))) for f in self.fields())

    def parity_error(self) -> float:
        return max(f.parity_error() for f in self.fields())


def project_state(ts: TransformedState) -> TransformedState:
    """Re-impose symmetry, mean, and sector conventions on the prognostics."""
    q = ops.zero_mean(ops.parity_project(hermitianize(ts.q), EVEN))

    def profile(f):
        out = ops.parity_project(hermitianize(f), ODD).coeffs
        keep = np.zeros_like(out)
        keep[0, 0, :] = out[0, 0, :]
        keep[0, 0, 0] = 0.0
        return f.with_coeffs(keep, ODD)

    def fast(f):
        out = ops.parity_project(hermitianize(f), EVEN).coeffs
        out[0, 0, :] = 0.0
        out[:, :, 0] = 0.0
        return f.with_coeffs(out, EVEN)

    return TransformedState(
        q=q, vzu=profile(ts.vzu), vzv=profile(ts.vzv), d3chi=fast(ts.d3chi), phizz=fast(ts.phizz)
    )


# ----------------------------------------------------------- representation


def to_transformed(state: PrimitiveState) -> TransformedState:
    dec = decompose(state)
    return transformed_from_decomposition(dec)


def transformed_from_decomposition(dec: QGDecomposition) -> TransformedState:
    return TransformedState(
        q=dec.q,
        vzu=ops.ddz(dec.vbar_u),
        vzv=ops.ddz(dec.vbar_v),
        d3chi=ops.laplacian3(dec.chi),
        phizz=ops.ddz(ops.ddz(dec.phi)),
    )


def to_decomposition(ts: TransformedState) -> QGDecomposition:
    g = ts.grid
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(g.k3 != 0, ts.phizz.coeffs / -(g.kp3**2), 0.0 + 0.0j)
    return QGDecomposition(
        q=ts.q,
        vbar_u=ops.inv_ddz(ts.vzu),
        vbar_v=ops.inv_ddz(ts.vzv),
        chi=ops.inv_laplacian3(ts.d3chi),
        phi=ts.phizz.with_coeffs(phi, EVEN),
    )


def to_primitive(ts: TransformedState):
    """Reconstruct (state, w, p) from the transformed prognostics."""
    return reconstruct(to_decomposition(ts))


# ------------------------------------------------------------- right sides


def _full_velocity(ts: TransformedState):
    dec = to_decomposition(ts)
    state, w, _ = reconstruct(dec)
    return state.u, state.v, w, state.rho


def nonlinear_qxf(ts: TransformedState, sched: Schedule, forcing: ForcingSet) -> TransformedState:
    """Nonlinear advection and forcing part of the transformed tendencies."""
    u, v, w, rho = _full_velocity(ts)
    adv_u = ops.advect(u, v, w, u)
    adv_v = ops.advect(u, v, w, v)
    adv_rho = ops.advect(u, v, w, rho)

    nq = -ops.perp_div(adv_u, adv_v) + ops.ddz(adv_rho) + forcing.f_q

    flux_u = ops.xy_average(ops.multiply(w, u))
    flux_v = ops.xy_average(ops.multiply(w, v))
    nvzu = -ops.ddz(ops.ddz(flux_u)) + ops.ddz(forcing.fbar_u)
    nvzv = -ops.ddz(ops.ddz(flux_v)) + ops.ddz(forcing.fbar_v)

    nchi = -ops.laplacian3(ops.inv_laplacian2(ops.div2(adv_u, adv_v))) + ops.laplacian3(
        forcing.f_chi
    )
    chi_coeffs = nchi.coeffs.copy()
    chi_coeffs[:, :, 0] = 0.0  # constrained barotropic sector
    nchi = nchi.with_coeffs(chi_coeffs)

    nphizz = (
        -ops.ddz(ops.ddz(ops.inv_laplacian2(ops.perp_div(adv_u, adv_v))))
        - ops.pz_project(ops.ddz(adv_rho))
        + forcing.d2z_f_phi
    )
    return TransformedState(
        q=nq.with_coeffs(nq.coeffs, EVEN),
        vzu=nvzu.with_coeffs(nvzu.coeffs, ODD),
        vzv=nvzv.with_coeffs(nvzv.coeffs, ODD),
        d3chi=nchi.with_coeffs(nchi.coeffs, EVEN),
        phizz=nphizz.with_coeffs(nphizz.coeffs, EVEN),
    )


def linear_qxf(ts: TransformedState, sched: Schedule) -> TransformedState:
    """Stiff skew part plus diffusion, applied spectrally."""
    g = ts.grid
    mu, eps = sched.mu, sched.eps

    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(g.k3 != 0, ts.phizz.coeffs / -(g.kp3**2), 0.0 + 0.0j)
    d3phi = -g.k2t * phi

    dq = mu * ops.laplacian3(ts.q)
    dvzu = mu * ops.ddz(ops.ddz(ts.vzu)) + (1.0 / eps) * ts.vzv
    dvzv = mu * ops.ddz(ops.ddz(ts.vzv)) - (1.0 / eps) * ts.vzu
    dchi = mu * ops.laplacian3(ts.d3chi) + ts.d3chi.with_coeffs((1.0 / eps) * d3phi, EVEN)
    dphizz = mu * ops.laplacian3(ts.phizz) - (1.0 / eps) * ts.d3chi
    return TransformedState(q=dq, vzu=dvzu, vzv=dvzv, d3chi=dchi, phizz=dphizz)


def rhs_qxf(state, sched: Schedule, forcing: ForcingSet) -> TransformedState:
    """Full transformed tendency; accepts a TransformedState or QGDecomposition."""
    ts = state
    if isinstance(state, QGDecomposition):
        ts = transformed_from_decomposition(state)
    return nonlinear_qxf(ts, sched, forcing) + linear_qxf(ts, sched)


def rhs_primitive(state: PrimitiveState, sched: Schedule, forcing: ForcingSet) -> PrimitiveState:
    """Velocity-form tendency of (u, v, rho).

    The z-constant part of the pressure takes the value that keeps the
    vertically averaged horizontal flow divergence-free (it differs from
    the hydrostatic completion by an O(eps) nonlinear correction).
    """
    state.validate()
    u, v, rho = state.fields()
    eps, mu = sched.eps, sched.mu

    q = ops.perp_div(u, v) - ops.ddz(rho)
    chi = ops.inv_laplacian2(ops.div2(u, v))
    integrand = ops.inv_laplacian2(ops.laplacian3(rho) + ops.ddz(q))
    phi = ops.drop_k3_zero(ops.vertical_integral(integrand))
    psi = ops.inv_laplacian3(q + ops.ddz(ops.ddz(phi)))
    w = -ops.vertical_integral(ops.laplacian2(chi))

    adv_u = ops.advect(u, v, w, u)
    adv_v = ops.advect(u, v, w, v)
    adv_rho = ops.advect(u, v, w, rho)

    # pressure: hydrostatic part psi - phi, barotropic part from the
    # divergence constraint
    p = psi - phi
    baro = ops.inv_laplacian2(ops.div2(adv_u, adv_v) - ops.div2(forcing.f_u, forcing.f_v))
    p_coeffs = p.coeffs.copy()
    p_coeffs[:, :, 0] = psi.coeffs[:, :, 0] - eps * baro.coeffs[:, :, 0]
    p = p.with_coeffs(p_coeffs, EVEN)

    px, py = ops.grad2(p)
    du = (-1.0 / eps) * (-v + px) - adv_u + mu * ops.laplacian3(u) + forcing.f_u
    dv = (-1.0 / eps) * (u + py) - adv_v + mu * ops.laplacian3(v) + forcing.f_v
    drho = (1.0 / eps) * w - adv_rho + mu * ops.laplacian3(rho) + forcing.f_rho
    return PrimitiveState(
        u=du.with_coeffs(du.coeffs, EVEN),
        v=dv.with_coeffs(dv.coeffs, EVEN),
        rho=drho.with_coeffs(drho.coeffs, ODD),
    )


def transformed_tendency_of_primitive(tendency: PrimitiveState) -> TransformedState:
    """Push a (u, v, rho) tendency through the (linear) decomposition.

    Used by the formulation-equivalence oracle: for a valid state W,
    ``transformed_tendency_of_primitive(rhs_primitive(W))`` must match
    ``rhs_qxf(to_transformed(W))`` mode for mode.
    """
    du, dv, drho = tendency.fields()
    q = ops.perp_div(du, dv) - ops.ddz(drho)
    vzu = ops.ddz(ops.xy_average(du))
    vzv = ops.ddz(ops.xy_average(dv))
    d3chi = ops.laplacian3(ops.inv_laplacian2(ops.div2(du, dv)))
    coeffs = d3chi.coeffs.copy()
    coeffs[:, :, 0] = 0.0
    d3chi = d3chi.with_coeffs(coeffs)
    # phi_zz tendency from its local formula (no vertical integral needed)
    phizz = ops.inv_laplacian2(ops.ddz(ops.laplacian3(drho)) + ops.ddz(ops.ddz(q)))
    return TransformedState(q=q, vzu=vzu, vzv=vzv, d3chi=d3chi, phizz=phizz)


# -------------------------------------------------------------- propagator


class Propagator:
    """Exact per-mode exponential of the stiff skew + diffusion block."""

    def __init__(self, grid: Grid, sched: Schedule, dt: float):
        self.grid = grid
        self.dt = dt
        self.decay = np.exp(-sched.mu * grid.k2t * dt)
        theta = dt / sched.eps
        self.cos_th = np.cos(theta)
        self.sin_th = np.sin(theta)

        k2t = np.broadcast_to(grid.k2t, grid.shape)
        kp3 = np.broadcast_to(grid.kp3, grid.shape)
        osc = (np.abs(kp3) > 0) & (grid.k2h > 0)
        osc = np.broadcast_to(osc, grid.shape)
        kmod = np.sqrt(k2t, where=k2t > 0, out=np.zeros_like(k2t))
        with np.errstate(divide="ignore", invalid="ignore"):
            omega = np.where(osc, kmod / (sched.eps * np.abs(kp3)), 0.0)
            ratio = np.where(osc, kmod / np.abs(kp3), 1.0)
        self.cos_w = np.where(osc, np.cos(omega * dt), 1.0)
        self.sin_a = np.where(osc, ratio * np.sin(omega * dt), 0.0)
        self.sin_b = np.where(osc, np.sin(omega * dt) / ratio, 0.0)

    def __call__(self, ts: TransformedState) -> TransformedState:
        q = ts.q.with_coeffs(self.decay * ts.q.coeffs)
        vzu = ts.vzu.with_coeffs(self.decay * (self.cos_th * ts.vzu.coeffs + self.sin_th * ts.vzv.coeffs))
        vzv = ts.vzv.with_coeffs(self.decay * (-self.sin_th * ts.vzu.coeffs + self.cos_th * ts.vzv.coeffs))
        x = ts.d3chi.coeffs
        f = ts.phizz.coeffs
        d3chi = ts.d3chi.with_coeffs(self.decay * (self.cos_w * x + self.sin_a * f))
        phizz = ts.phizz.with_coeffs(self.decay * (-self.sin_b * x + self.cos_w * f))
        return TransformedState(q=q, vzu=vzu, vzv=vzv, d3chi=d3chi, phizz=phizz)


def linear_propagator(grid: Grid, sched: Schedule, dt: float) -> Propagator:
    """Per-mode exact linear map over one step (see Propagator)."""
    return Propagator(grid, sched, dt)


def lawson_rk4(ts, h, prop_full, prop_half, nonlinear):
    k1 = nonlinear(ts)
    k2 = nonlinear(prop_half(ts + (0.5 * h) * k1))
    half = prop_half(ts)
    k3 = nonlinear(half + (0.5 * h) * k2)
    k4 = nonlinear(prop_full(ts) + h * prop_half(k3))
    return prop_full(ts) + (h / 6.0) * (prop_full(k1) + 2.0 * prop_half(k2 + k3)) + (h / 6.0) * k4


def lawson_rk2(ts, h, prop_full, prop_half, nonlinear):
    k1 = nonlinear(ts)
    k2 = nonlinear(prop_full(ts + h * k1))
    return prop_full(ts) + (0.5 * h) * (prop_full(k1) + k2)


_SCHEMES = {"ifrk4": lawson_rk4, "ifrk2": lawson_rk2}


@dataclass
class Trajectory:
    """Recorded transformed states at sample times."""

    times: list
    states: list

    def primitive(self, i: int):
        return to_primitive(self.states[i])

    def rows(self, sched: Schedule):
        """(t, |v|_0, |rho|_0, energy, parity_error) per sample."""
        from .norms import l2_norm

        out = []
        for t, ts in zip(self.times, self.states):
            state, _, _ = to_primitive(ts)
            vn = float(np.sqrt(l2_norm(state.u) ** 2 + l2_norm(state.v) ** 2))
            rn = l2_norm(state.rho)
            energy = 0.5 * (vn**2 + rn**2)
            out.append((t, vn, rn, energy, ts.parity_error()))
        return out

    def write_csv(self, path, sched: Schedule) -> None:
        with open(path, "w") as fh:
            fh.write("t,v_l2,rho_l2,energy,parity_error\n")
            for row in self.rows(sched):
                fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def step(
    ts: TransformedState,
    sched: Schedule,
    cfg: StepperConfig,
    forcing: ForcingSet,
    linear_only: bool = False,
) -> TransformedState:
    """One time step of length cfg.dt."""
    prop_full = Propagator(ts.grid, sched, cfg.dt)
    if linear_only:
        return prop_full(ts)
    cfg.check_cfl(ts.grid, sched)
    prop_half = Propagator(ts.grid, sched, cfg.dt / 2.0)
    scheme = _SCHEMES[cfg.scheme]
    return scheme(ts, cfg.dt, prop_full, prop_half, lambda s: nonlinear_qxf(s, sched, forcing))


def integrate(
    ts0: TransformedState,
    sched: Schedule,
    cfg: StepperConfig,
    forcing: ForcingSet,
    t_end: float | None = None,
    record_times=None,
    linear_only: bool = False,
    project_every: int = 1,
) -> Trajectory:
    """Advance to t_end (default cfg.t_end), recording at the requested times.

    ``record_times`` defaults to multiples of ``cfg.out_every`` (endpoints
    always included).  Steps use cfg.dt, with one shortened step before
    each record time so samples land exactly.  Raises SolverBlowupError on
    non-finite states, carrying the last recorded state.
    """
    grid = ts0.grid
    horizon = cfg.t_end if t_end is None else float(t_end)
    if record_times is None:
        if cfg.out_every > 0:
            n_out = int(np.floor(horizon / cfg.out_every + 1e-9))
            record_times = [i * cfg.out_every for i in range(1, n_out + 1)]
        else:
            record_times = []
    record_times = sorted(set(float(t) for t in record_times) | {horizon})
    if any(t < 0 or t > horizon + 1e-12 for t in record_times):
        raise ValueError("record times must lie in [0, t_end]")

    scheme = _SCHEMES[cfg.scheme]
    if not linear_only:
        cfg.check_cfl(grid, sched)
    nonlinear = (lambda s: s * 0.0) if linear_only else (
        lambda s: nonlinear_qxf(s, sched, forcing)
    )
    prop_cache: dict[float, tuple[Propagator, Propagator]] = {}

    def props(h: float):
        if h not in prop_cache:
            prop_cache[h] = (Propagator(grid, sched, h), Propagator(grid, sched, h / 2.0))
        return prop_cache[h]

    ts = project_state(ts0)
    t = 0.0
    traj = Trajectory(times=[0.0], states=[ts])
    n_step = 0
    for target in record_times:
        if target <= 0.0:
            continue
        while t < target - 1e-12:
            h = min(cfg.dt, target - t)
            full, half = props(h)
            ts = scheme(ts, h, full, half, nonlinear)
            t += h
            n_step += 1
            if project_every and n_step % project_every == 0:
                ts = project_state(ts)
            if not ts.is_finite():
                raise SolverBlowupError(t, traj)
        traj.times.append(t)
        traj.states.append(ts)
    return traj
