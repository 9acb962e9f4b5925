"""Slaving hierarchy: fast variables expressed as functions of the slow one.

Level 0 is identically zero; level n+1 solves the three fast-equation
updates exactly in spectral space, with every right-hand side evaluated at
level n.  The derivative terms (directional derivatives of the level-n
functions in the direction of the slow tendency) are evaluated by exact
forward-mode differentiation of the recursion itself: values are carried
as sparse multivariate jets (truncated Taylor polynomials, degree <= 1 per
formal variable), and each level transition introduces one fresh formal
variable to differentiate the previous level in a state-dependent
direction.  This makes the tangents exact to machine precision at every
level, at a cost that grows like 2^n (acceptable since n <= n_star is
small by construction).

Storage notes: every persistent quantity in the hierarchy lives in the
slow space |k| < kappa, so jets hold compact vectors over the low-mode
set; full grid arrays appear only transiently inside product evaluation.
The k3 = 0 plane of lap3(Phi) produced by the updates is the slaved
version of the z-constant pressure correction enforcing the barotropic
divergence constraint; it is kept (the reconstruction never sees it, the
residuals do).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ops
from .field import EVEN, ODD, SpectralField
from .grid import Grid
from .norms import sobolev_norm
from .schedule import Schedule, lowpass_band_is_alias_free
from .state import ForcingSet, PrimitiveState

EMPTY = frozenset()


class BalanceError(ValueError):
    pass


# --------------------------------------------------------------- workspace


class Workspace:
    """Compact low-mode index set and diagonal operator factors."""

    def __init__(self, grid: Grid, sched: Schedule, forcing: ForcingSet):
        if not lowpass_band_is_alias_free(grid, sched):
            raise BalanceError(
                "grid too small for kappa: the low-mode band is not alias-free "
                f"(need floor(N/2 * fraction) >= {sched.kappa:.3g} per axis)"
            )
        self.grid = grid
        self.sched = sched
        self.forcing = forcing

        mask = np.broadcast_to(grid.kmag < sched.kappa, grid.shape)
        self.sel = np.nonzero(mask)
        self.n_modes = len(self.sel[0])
        self.full_mask = mask

        kp1 = np.broadcast_to(grid.kp1, grid.shape)[self.sel]
        kp2 = np.broadcast_to(grid.kp2, grid.shape)[self.sel]
        kp3 = np.broadcast_to(grid.kp3, grid.shape)[self.sel]
        k2h = kp1**2 + kp2**2
        k2t = k2h + kp3**2

        self.ik1 = 1j * kp1
        self.ik2 = 1j * kp2
        self.ik3 = 1j * kp3
        self.lap3 = -k2t
        self.ddzz = -(kp3**2)
        with np.errstate(divide="ignore", invalid="ignore"):
            self.il2 = np.where(k2h > 0, -1.0 / k2h, 0.0)
            self.il3 = np.where(k2t > 0, -1.0 / k2t, 0.0)
            self.ratio_zz = np.where(k2t > 0, kp3**2 / k2t, 0.0)
        # mask that removes the horizontal mean (the profile sector)
        self.pz = np.where((kp1 == 0) & (kp2 == 0), 0.0, 1.0)

        # positions of the (0, 0, k3) modes inside the compact vector,
        # indexed by the k3 array index; -1 when outside the low-mode set
        self.prof_pos = np.full(grid.N3, -1, dtype=np.int64)
        on_axis = (self.sel[0] == 0) & (self.sel[1] == 0)
        for pos in np.nonzero(on_axis)[0]:
            self.prof_pos[self.sel[2][pos]] = pos

        kap = sched.kappa
        self.fq = self.compact(ops.low_pass(forcing.f_q, kap).coeffs)
        self.dzfbar_u = self.compact(ops.low_pass(ops.ddz(forcing.fbar_u), kap).coeffs)
        self.dzfbar_v = self.compact(ops.low_pass(ops.ddz(forcing.fbar_v), kap).coeffs)
        self.d3fchi = self.compact(ops.low_pass(ops.laplacian3(forcing.f_chi), kap).coeffs)
        self.d2zfphi = self.compact(ops.low_pass(forcing.d2z_f_phi, kap).coeffs)

        # full-grid factors used while building the slaved fields
        shape = grid.shape
        self.f_ik1 = 1j * np.broadcast_to(grid.kp1, shape)
        self.f_ik2 = 1j * np.broadcast_to(grid.kp2, shape)
        self.f_ik3 = 1j * np.broadcast_to(grid.kp3, shape)
        f_k2h = np.broadcast_to(grid.k2h, shape)
        f_k2t = np.broadcast_to(grid.k2t, shape)
        self.f_k2h = f_k2h
        with np.errstate(divide="ignore", invalid="ignore"):
            self.f_il3 = np.where(f_k2t > 0, -1.0 / f_k2t, 0.0)
            self.f_inv_ik3 = np.where(
                np.broadcast_to(grid.k3, shape) != 0,
                1.0 / np.where(self.f_ik3 == 0, 1.0, self.f_ik3),
                0.0 + 0.0j,
            )

    def compact(self, full: np.ndarray) -> np.ndarray:
        return np.ascontiguousarray(full[self.sel])

    def expand(self, vec: np.ndarray) -> np.ndarray:
        out = self.grid.zeros()
        out[self.sel] = vec
        return out

    def profile_to_compact(self, prof_z: np.ndarray) -> np.ndarray:
        """Embed a 1D z-spectrum as a (0, 0, k3) compact vector."""
        out = np.zeros(self.n_modes, dtype=np.complex128)
        ok = self.prof_pos >= 0
        out[self.prof_pos[ok]] = prof_z[ok]
        return out


# --------------------------------------------------------------------- jets
#
# A jet is a dict mapping frozensets of formal-variable ids to compact
# coefficient vectors; the empty set carries the value, {v} the first
# derivative in direction v, {v, w} the mixed second derivative, and so on.

Jet = dict


def jmap(jet: Jet, factor) -> Jet:
    """Apply a diagonal factor (scalar or compact vector) to every term."""
    return {k: factor * v for k, v in jet.items()}


def jadd(*jets: Jet) -> Jet:
    out: Jet = {}
    for jet in jets:
        for k, v in jet.items():
            if k in out:
                out[k] = out[k] + v
            else:
                out[k] = v
    return out


def jneg(jet: Jet) -> Jet:
    return {k: -v for k, v in jet.items()}


def jprune(jet: Jet) -> Jet:
    return {k: v for k, v in jet.items() if np.any(v)}


def jextract(jet: Jet, var: int) -> Jet:
    return {k - {var}: v for k, v in jet.items() if var in k}


def jconst(vec: np.ndarray) -> Jet:
    return {EMPTY: vec}


@dataclass
class FastJet:
    """Jets of the fast-variable set (vbar_z pair, lap3 X, lap3 Phi)."""

    vzu: Jet
    vzv: Jet
    d3x: Jet
    d3phi: Jet

    @classmethod
    def zero(cls) -> "FastJet":
        return cls({}, {}, {}, {})

    def extract(self, var: int) -> "FastJet":
        return FastJet(
            jextract(self.vzu, var),
            jextract(self.vzv, var),
            jextract(self.d3x, var),
            jextract(self.d3phi, var),
        )

    def is_zero(self) -> bool:
        return not (self.vzu or self.vzv or self.d3x or self.d3phi)

    def keys(self):
        out = set()
        for jet in (self.vzu, self.vzv, self.d3x, self.d3phi):
            out |= set(jet)
        return out


# ----------------------------------------------------------------- evaluator


@dataclass
class LevelRecord:
    value: FastJet
    g_slow: Jet | None = None  # slow tendency at this level (drives level+1)
    tangent_g: FastJet | None = None  # derivative of this level in that direction


class BalanceEvaluator:
    """Evaluates the hierarchy, with exact tangents, at one slow state."""

    def __init__(
        self,
        qtilde: SpectralField,
        sched: Schedule,
        forcing: ForcingSet,
        workspace: Workspace | None = None,
    ):
        grid = qtilde.grid
        self.ws = workspace if workspace is not None else Workspace(grid, sched, forcing)
        if self.ws.grid is not grid and self.ws.grid != grid:
            raise BalanceError("workspace grid does not match qtilde")
        lp = ops.low_pass(qtilde, sched.kappa)
        resid = float(np.max(np.abs(qtilde.coeffs - lp.coeffs)))
        if resid > 1e-12 * max(1.0, float(np.max(np.abs(qtilde.coeffs)))):
            raise BalanceError("qtilde is not low-pass invariant at |k| < kappa")
        self.qtilde = qtilde
        self.sched = sched
        self.forcing = forcing
        self._var = 0
        self._base = jconst(self.ws.compact(qtilde.coeffs))
        self._chain: dict[int, LevelRecord] = {0: LevelRecord(FastJet.zero())}

    # -------------------------------------------------- public entry points

    def levels(self, n_target: int) -> list[FastJet]:
        self._extend_chain(n_target)
        return [self._chain[n].value for n in range(n_target + 1)]

    def record(self, n: int) -> LevelRecord:
        """Record for level n, including the slow tendency and its tangent."""
        self._extend_chain(n + 1)
        return self._chain[n]

    def tangent(self, n_target: int, direction: SpectralField) -> list[FastJet]:
        """Directional derivatives of levels 0..n_target at q-tilde."""
        lp = ops.low_pass(direction, self.sched.kappa)
        var = self._fresh_var()
        base = dict(self._base)
        base[frozenset((var,))] = self.ws.compact(lp.coeffs)
        chain = [FastJet.zero()]
        for n in range(1, n_target + 1):
            chain.append(self._level_up(chain[n - 1], n - 1, base)[0])
        return [fj.extract(var) for fj in chain]

    # ------------------------------------------------------------ internals

    def _fresh_var(self) -> int:
        self._var += 1
        return self._var

    def _extend_chain(self, n_target: int) -> None:
        for n in range(1, n_target + 1):
            if n not in self._chain:
                rec = self._chain[n - 1]
                value, g_jet, tangent_g = self._level_up(rec.value, n - 1, self._base)
                rec.g_slow = g_jet
                rec.tangent_g = tangent_g
                self._chain[n] = LevelRecord(value)

    def _eval_at(self, n: int, base: Jet) -> FastJet:
        """Plain evaluation of level n at an arbitrary (extended) base."""
        if n == 0:
            return FastJet.zero()
        prev = self._eval_at(n - 1, base)
        return self._level_up(prev, n - 1, base)[0]

    def _level_up(self, prev: FastJet, prev_depth: int, base: Jet):
        """One update: level prev_depth -> prev_depth + 1 at the given base.

        Returns (next_value, g_jet, tangent_of_prev_in_g_direction).
        """
        ws = self.ws
        eps, mu = self.sched.eps, self.sched.mu

        adv_u, adv_v, adv_rho, flux_u, flux_v = self._advection(base, prev)

        # slow tendency G = P<[mu lap3 q + f_q - perpdiv(adv) + ddz(adv_rho)]
        pd_adv = jadd(jmap(adv_v, ws.ik1), jmap(jneg(adv_u), ws.ik2))
        g_jet = jprune(
            jadd(jmap(base, mu * ws.lap3), jconst(ws.fq), jneg(pd_adv), jmap(adv_rho, ws.ik3))
        )

        # derivative of the previous level in direction G via a fresh variable
        if prev.is_zero() or not g_jet:
            tangent = FastJet.zero()
        else:
            var = self._fresh_var()
            ext = dict(base)
            for k, v in g_jet.items():
                ext[k | {var}] = v
            tangent = self._eval_at(prev_depth, ext).extract(var)

        # mean-shear update; the new level enters through the rotated stiff
        # term, so V_z^{n+1} = eps * (rhs)^perp with (a, b)^perp = (-b, a)
        rhs_u = jadd(
            tangent.vzu,
            jmap(flux_u, ws.ddzz),
            jmap(prev.vzu, -mu * ws.ddzz),
            jneg(jconst(ws.dzfbar_u)),
        )
        rhs_v = jadd(
            tangent.vzv,
            jmap(flux_v, ws.ddzz),
            jmap(prev.vzv, -mu * ws.ddzz),
            jneg(jconst(ws.dzfbar_v)),
        )
        vzu_next = jmap(rhs_v, -eps)
        vzv_next = jmap(rhs_u, eps)

        # lap3 Phi update (from the velocity-potential equation)
        s_chi = jmap(jadd(jmap(adv_u, ws.ik1), jmap(adv_v, ws.ik2)), ws.il2 * ws.lap3)
        d3phi_next = jmap(
            jadd(tangent.d3x, s_chi, jmap(prev.d3x, -mu * ws.lap3), jneg(jconst(ws.d3fchi))),
            eps,
        )

        # lap3 X update (from the ageostrophic-potential equation)
        s_phi = jmap(pd_adv, ws.il2 * ws.ddzz)
        pz_rho = jmap(jmap(adv_rho, ws.ik3), ws.pz)
        d3x_next = jmap(
            jadd(
                jmap(tangent.d3phi, ws.ratio_zz),
                s_phi,
                pz_rho,
                jmap(prev.d3phi, -mu * ws.ddzz),
                jneg(jconst(ws.d2zfphi)),
            ),
            -eps,
        )
        value = FastJet(
            jprune(vzu_next), jprune(vzv_next), jprune(d3x_next), jprune(d3phi_next)
        )
        return value, g_jet, tangent

    # ------------------------------------------------------------- products

    def _advection(self, base: Jet, prev: FastJet):
        """Jets of u.grad(u, v, rho) and the profile fluxes <w u>, <w v>."""
        ws = self.ws
        keys = sorted(set(base) | prev.keys(), key=lambda k: (len(k), sorted(k)))

        names = ("u", "v", "w", "ux", "uy", "uz", "vx", "vy", "vz", "rx", "ry", "rz")
        phys: dict[str, dict] = {name: {} for name in names}

        def ifft(a):
            return np.fft.ifftn(a, norm="forward").real

        for key in keys:
            qk = ws.expand(base[key]) if key in base else None
            vzu = ws.expand(prev.vzu[key]) if key in prev.vzu else None
            vzv = ws.expand(prev.vzv[key]) if key in prev.vzv else None
            d3x = ws.expand(prev.d3x[key]) if key in prev.d3x else None
            d3phi = ws.expand(prev.d3phi[key]) if key in prev.d3phi else None

            phi = ws.f_il3 * d3phi if d3phi is not None else None
            phizz = (ws.f_ik3**2) * phi if phi is not None else None

            psi_src = qk
            if phizz is not None:
                psi_src = phizz if psi_src is None else psi_src + phizz
            psi = ws.f_il3 * psi_src if psi_src is not None else None

            x_fld = ws.f_il3 * d3x if d3x is not None else None

            u = ws.f_inv_ik3 * vzu if vzu is not None else None
            v = ws.f_inv_ik3 * vzv if vzv is not None else None
            if psi is not None:
                du = -ws.f_ik2 * psi
                dv = ws.f_ik1 * psi
                u = du if u is None else u + du
                v = dv if v is None else v + dv
            if x_fld is not None:
                du = ws.f_ik1 * x_fld
                dv = ws.f_ik2 * x_fld
                u = du if u is None else u + du
                v = dv if v is None else v + dv

            w = -_vertint_full(-ws.f_k2h * x_fld, ws.grid) if x_fld is not None else None

            rho_src = None
            if phi is not None:
                rho_src = -ws.f_k2h * (ws.f_ik3 * phi)
            if qk is not None:
                t = -(ws.f_ik3 * qk)
                rho_src = t if rho_src is None else rho_src + t
            rho = ws.f_il3 * rho_src if rho_src is not None else None

            for name, fld in (("u", u), ("v", v), ("w", w)):
                if fld is not None:
                    phys[name][key] = ifft(fld)
            if u is not None:
                phys["ux"][key] = ifft(ws.f_ik1 * u)
                phys["uy"][key] = ifft(ws.f_ik2 * u)
                phys["uz"][key] = ifft(ws.f_ik3 * u)
            if v is not None:
                phys["vx"][key] = ifft(ws.f_ik1 * v)
                phys["vy"][key] = ifft(ws.f_ik2 * v)
                phys["vz"][key] = ifft(ws.f_ik3 * v)
            if rho is not None:
                phys["rx"][key] = ifft(ws.f_ik1 * rho)
                phys["ry"][key] = ifft(ws.f_ik2 * rho)
                phys["rz"][key] = ifft(ws.f_ik3 * rho)

        adv_u = self._triple(phys, ("ux", "uy", "uz"))
        adv_v = self._triple(phys, ("vx", "vy", "vz"))
        adv_rho = self._triple(phys, ("rx", "ry", "rz"))
        flux_u = self._flux(phys["w"], phys["u"])
        flux_v = self._flux(phys["w"], phys["v"])
        return adv_u, adv_v, adv_rho, flux_u, flux_v

    def _triple(self, phys, grads) -> Jet:
        """Jet of u*gx + v*gy + w*gz, restricted to the low-mode set."""
        acc: dict[frozenset, np.ndarray] = {}
        for vel_name, grad_name in zip(("u", "v", "w"), grads):
            vel = phys[vel_name]
            gph = phys[grad_name]
            for ka, va in vel.items():
                for kb, vb in gph.items():
                    if ka & kb:
                        continue
                    key = ka | kb
                    if key in acc:
                        acc[key] += va * vb
                    else:
                        acc[key] = va * vb
        ws = self.ws
        out: Jet = {}
        for key, arr in acc.items():
            vec = ws.compact(np.fft.fftn(arr, norm="forward"))
            if np.any(vec):
                out[key] = vec
        return out

    def _flux(self, wphys, uphys) -> Jet:
        """Jet of the horizontal average <w u> as a (0, 0, k3) compact vector."""
        ws = self.ws
        acc: dict[frozenset, np.ndarray] = {}
        for ka, va in wphys.items():
            for kb, vb in uphys.items():
                if ka & kb:
                    continue
                key = ka | kb
                prof = np.mean(va * vb, axis=(0, 1))
                if key in acc:
                    acc[key] += prof
                else:
                    acc[key] = prof
        out: Jet = {}
        for key, prof in acc.items():
            vec = ws.profile_to_compact(np.fft.fft(prof, norm="forward"))
            if np.any(vec):
                out[key] = vec
        return out


def _vertint_full(a: np.ndarray, grid: Grid) -> np.ndarray:
    """Vertical integral from z = 0 on a full coefficient array (k3=0 free)."""
    ik3 = 1j * np.broadcast_to(grid.kp3, grid.shape)
    out = np.where(
        np.broadcast_to(grid.k3, grid.shape) != 0,
        a / np.where(ik3 == 0, 1.0, ik3),
        0.0 + 0.0j,
    )
    out[:, :, 0] = -np.sum(out[:, :, 1:], axis=2)
    out[0, 0, 0] = 0.0
    return out


# ----------------------------------------------------------- public objects


@dataclass
class BalanceSet:
    """Evaluated slaved functions at one level, plus their tangent hook."""

    level: int
    vzu: SpectralField
    vzv: SpectralField
    d3x: SpectralField
    d3phi: SpectralField
    _hierarchy: "BalanceHierarchy | None" = None

    @property
    def vbar_u(self) -> SpectralField:
        return ops.inv_ddz(self.vzu)

    @property
    def vbar_v(self) -> SpectralField:
        return ops.inv_ddz(self.vzv)

    @property
    def X(self) -> SpectralField:
        return ops.inv_laplacian3(self.d3x)

    @property
    def Phi(self) -> SpectralField:
        return ops.inv_laplacian3(self.d3phi)

    def tangent(self, direction: SpectralField) -> "BalanceSet":
        """Directional derivative of this level's functions."""
        if self._hierarchy is None:
            raise BalanceError("tangent hook requires the parent hierarchy")
        return self._hierarchy.tangent(self.level, direction)[self.level]


class BalanceHierarchy:
    """All levels of the slaving iteration at one slow state."""

    def __init__(
        self,
        qtilde: SpectralField,
        sched: Schedule,
        forcing: ForcingSet,
        workspace: Workspace | None = None,
    ):
        self.qtilde = qtilde
        self.sched = sched
        self.forcing = forcing
        self.ev = BalanceEvaluator(qtilde, sched, forcing, workspace)

    def _wrap(self, n: int, fj: FastJet) -> BalanceSet:
        ws = self.ev.ws
        grid = ws.grid

        def fld(jet, parity):
            vec = jet.get(EMPTY)
            coeffs = ws.expand(vec) if vec is not None else grid.zeros()
            return SpectralField(grid, coeffs, parity)

        return BalanceSet(
            level=n,
            vzu=fld(fj.vzu, ODD),
            vzv=fld(fj.vzv, ODD),
            d3x=fld(fj.d3x, EVEN),
            d3phi=fld(fj.d3phi, EVEN),
            _hierarchy=self,
        )

    def levels(self, n_target: int) -> list[BalanceSet]:
        if n_target > self.sched.n_star:
            raise BalanceError(
                f"level {n_target} exceeds n_star={self.sched.n_star}; the iteration "
                "is asymptotic and meaningful only up to the optimal truncation"
            )
        return self.levels_unchecked(n_target)

    def levels_unchecked(self, n_target: int) -> list[BalanceSet]:
        """Levels without the n_star cap (differencing residuals at n_star
        requires one level beyond it)."""
        return [self._wrap(n, fj) for n, fj in enumerate(self.ev.levels(n_target))]

    def level(self, n: int) -> BalanceSet:
        return self.levels(n)[n]

    def tangent(self, n_target: int, direction: SpectralField) -> list[BalanceSet]:
        out = []
        for n, fj in enumerate(self.ev.tangent(n_target, direction)):
            b = self._wrap(n, fj)
            b._hierarchy = None
            out.append(b)
        return out

    def tangent_in_g_direction(self, n: int) -> BalanceSet:
        """D(level n) applied to the level-n slow tendency (internal record)."""
        rec = self.ev.record(n)
        b = self._wrap(n, rec.tangent_g)
        b._hierarchy = None
        return b

    def g_slow(self, n: int) -> SpectralField:
        """Slow tendency evaluated with the level-n slaved fields."""
        return g_slow(self.qtilde, self.levels_unchecked(n)[n], self.sched, self.forcing)


def slaved_fields(qtilde: SpectralField, b: BalanceSet):
    """Full velocity and density (u, v, w, rho) carried by a balance set."""
    phi_zz = ops.ddz(ops.ddz(b.Phi))
    psi = ops.inv_laplacian3(qtilde + phi_zz)
    px, py = ops.perp_grad(psi)
    xx, xy = ops.grad2(b.X)
    u = b.vbar_u + px + xx
    v = b.vbar_v + py + xy
    w = -ops.vertical_integral(ops.laplacian2(b.X))
    rho = ops.inv_laplacian3(ops.laplacian2(ops.ddz(b.Phi)) - ops.ddz(qtilde))
    return (
        u.with_coeffs(u.coeffs, EVEN),
        v.with_coeffs(v.coeffs, EVEN),
        w.with_coeffs(w.coeffs, ODD),
        rho.with_coeffs(rho.coeffs, ODD),
    )


def g_slow(
    qtilde: SpectralField, b: BalanceSet, sched: Schedule, forcing: ForcingSet
) -> SpectralField:
    """P<[mu lap3 q + f_q - perpdiv(u.grad v) + ddz(u.grad rho)] at level b."""
    u, v, w, rho = slaved_fields(qtilde, b)
    adv_u = ops.advect(u, v, w, u)
    adv_v = ops.advect(u, v, w, v)
    adv_rho = ops.advect(u, v, w, rho)
    out = (
        sched.mu * ops.laplacian3(qtilde)
        + forcing.f_q
        - ops.perp_div(adv_u, adv_v)
        + ops.ddz(adv_rho)
    )
    return ops.low_pass(out, sched.kappa)


def iterate_balance(
    qtilde: SpectralField,
    sched: Schedule,
    forcing: ForcingSet,
    n_target: int,
) -> list[BalanceSet]:
    """Balance sets for levels 0..n_target (n_target <= n_star)."""
    return BalanceHierarchy(qtilde, sched, forcing).levels(n_target)


def tangent_balance(
    qtilde: SpectralField,
    direction: SpectralField,
    sched: Schedule,
    forcing: ForcingSet,
    n_target: int,
) -> list[BalanceSet]:
    """Directional derivatives of the balance sets for levels 0..n_target."""
    return BalanceHierarchy(qtilde, sched, forcing).tangent(n_target, direction)


def well_prepared_init(
    qtilde: SpectralField,
    sched: Schedule,
    forcing: ForcingSet,
    n: int,
    hierarchy: BalanceHierarchy | None = None,
) -> PrimitiveState:
    """Slaved initial data (v*, rho*) of level n for the given slow state."""
    h = hierarchy if hierarchy is not None else BalanceHierarchy(qtilde, sched, forcing)
    u, v, w, rho = slaved_fields(qtilde, h.levels_unchecked(n)[n])
    return PrimitiveState(u=u, v=v, rho=rho)


def sobolev_f_norm(forcing: ForcingSet, sched: Schedule) -> float:
    """|(f_v^<, f_rho^<)|_{s+3}, the forcing size entering the bounds."""
    kap = sched.kappa
    fields = [
        ops.low_pass(forcing.f_u, kap),
        ops.low_pass(forcing.f_v, kap),
        ops.low_pass(forcing.f_rho, kap),
    ]
    return float(np.sqrt(sum(sobolev_norm(f, sched.s + 3.0) ** 2 for f in fields)))
