"""Truncated slow dynamics at slaving level n."""

import numpy as np
import pytest

from qgbal import ops
from qgbal.field import EVEN, SpectralField
from qgbal.initial import qtilde_random_gevrey, qtilde_zonal, random_forcing
from qgbal.norms import l2_norm
from qgbal.qgen import integrate_qgen, nonlinear_energy_flux, qgen_rhs
from qgbal.schedule import StepperConfig, make_schedule
from qgbal.state import ForcingSet

EPS16 = 6.25e-2


class TestRhs:
    def test_zonal_reduces_to_diffusion(self, grid16):
        sched = make_schedule(EPS16, 0.5, 0.05)
        qt = ops.low_pass(qtilde_zonal(grid16, 0.5), sched.kappa)
        tend = qgen_rhs(qt, sched, ForcingSet.zero(grid16), n=1)
        expect = 0.05 * ops.laplacian3(qt)
        assert np.max(np.abs(tend.coeffs - expect.coeffs)) <= 1e-14

    def test_zero_state_gives_forcing(self, grid16):
        sched = make_schedule(EPS16, 0.5, 0.05)
        forcing = random_forcing(grid16, seed=71, amplitude=0.2)
        tend = qgen_rhs(SpectralField.zeros(grid16, EVEN), sched, forcing, n=0)
        expect = ops.low_pass(forcing.f_q, sched.kappa)
        assert np.max(np.abs(tend.coeffs - expect.coeffs)) <= 1e-15

    def test_default_level_is_n_star(self, grid16):
        sched = make_schedule(EPS16, 0.5, 0.05)
        forcing = random_forcing(grid16, seed=72, amplitude=0.1)
        qt = qtilde_random_gevrey(grid16, sched.kappa, seed=3, amplitude=0.4)
        a = qgen_rhs(qt, sched, forcing)
        b = qgen_rhs(qt, sched, forcing, n=sched.n_star)
        assert np.max(np.abs(a.coeffs - b.coeffs)) == 0.0


class TestIntegration:
    def test_level0_matches_independent_stepper(self, grid16):
        """Independently coded classical truncated dynamics, same scheme."""
        g = grid16
        sched = make_schedule(EPS16, 0.5, 0.05)
        forcing = ForcingSet.zero(g)
        qt0 = qtilde_random_gevrey(g, sched.kappa, seed=3, amplitude=0.4)
        dt, t_end = 0.02, 0.4
        traj = integrate_qgen(qt0, sched, StepperConfig(dt=dt, t_end=t_end), forcing, n=0)

        kap, mu = sched.kappa, sched.mu
        mask = np.broadcast_to(g.kmag < kap, g.shape)
        kp1 = np.broadcast_to(g.kp1, g.shape)
        kp2 = np.broadcast_to(g.kp2, g.shape)
        full = np.exp(-mu * g.k2t * dt)
        half = np.exp(-mu * g.k2t * dt / 2.0)

        def nl(qc):
            with np.errstate(divide="ignore", invalid="ignore"):
                psi = np.where(g.k2t > 0, qc / (-g.k2t), 0.0)
            u = np.fft.ifftn(-1j * kp2 * psi, norm="forward").real
            v = np.fft.ifftn(1j * kp1 * psi, norm="forward").real
            qx = np.fft.ifftn(1j * kp1 * qc, norm="forward").real
            qy = np.fft.ifftn(1j * kp2 * qc, norm="forward").real
            adv = np.fft.fftn(u * qx + v * qy, norm="forward")
            return -np.where(mask, adv, 0.0)

        qc = qt0.coeffs.copy()
        for _ in range(int(round(t_end / dt))):
            k1 = nl(qc)
            k2 = nl(half * (qc + dt / 2 * k1))
            k3 = nl(half * qc + dt / 2 * k2)
            k4 = nl(full * qc + dt * half * k3)
            qc = full * qc + (dt / 6) * (full * k1 + 2 * half * (k2 + k3) + k4)
        assert np.max(np.abs(traj.states[-1].coeffs - qc)) <= 1e-12

    def test_zonal_decay_analytic(self, grid16):
        sched = make_schedule(EPS16, 0.5, 0.05)
        qt0 = ops.low_pass(qtilde_zonal(grid16, 0.5), sched.kappa)
        traj = integrate_qgen(
            qt0, sched, StepperConfig(dt=0.01, t_end=0.5), ForcingSet.zero(grid16), n=0
        )
        got = traj.states[-1].at((1, 0, 1))
        expect = qt0.at((1, 0, 1)) * np.exp(-0.05 * 2.0 * 0.5)
        assert abs(got - expect) <= 1e-10 * abs(expect)

    def test_unforced_energy_nonincreasing(self, grid16):
        sched = make_schedule(EPS16, 0.5, 0.05)
        qt0 = qtilde_random_gevrey(grid16, sched.kappa, seed=5, amplitude=0.4)
        traj = integrate_qgen(
            qt0, sched, StepperConfig(dt=0.01, t_end=0.3, out_every=0.05),
            ForcingSet.zero(grid16), n=0,
        )
        norms = [l2_norm(q) for q in traj.states]
        assert all(b <= a * (1 + 1e-12) for a, b in zip(norms, norms[1:]))

    def test_low_pass_invariance_along_trajectory(self, grid16):
        sched = make_schedule(EPS16, 0.5, 0.05)
        forcing = random_forcing(grid16, seed=73, amplitude=0.2)
        qt0 = qtilde_random_gevrey(grid16, sched.kappa, seed=6, amplitude=0.4)
        traj = integrate_qgen(
            qt0, sched, StepperConfig(dt=0.01, t_end=0.2, out_every=0.05), forcing, n=1
        )
        for q in traj.states:
            hp = ops.high_pass(q, sched.kappa)
            assert np.max(np.abs(hp.coeffs)) == 0.0
            assert abs(q.coeffs[0, 0, 0]) == 0.0

    def test_levels_diverge_by_order_eps(self, grid16):
        # n = 0 vs n = 1 trajectories separate at O(eps) over t = 1; the
        # cutoff is pinned so the truncated operator is identical across eps
        forcing = ForcingSet.zero(grid16)
        gaps = {}
        for eps in (0.05, 0.0125):
            sched = make_schedule(eps, 0.5, 0.05, kappa=4.0)
            qt0 = qtilde_random_gevrey(grid16, sched.kappa, seed=7, amplitude=0.4)
            t0 = integrate_qgen(qt0, sched, StepperConfig(dt=0.01, t_end=1.0), forcing, n=0)
            t1 = integrate_qgen(qt0, sched, StepperConfig(dt=0.01, t_end=1.0), forcing, n=1)
            gaps[eps] = l2_norm(t0.states[-1] - t1.states[-1])
        assert gaps[0.05] > 0
        ratio = gaps[0.05] / gaps[0.0125]
        # linear in eps would give 4; accept a broad band around it
        assert 2.0 <= ratio <= 8.0

    def test_bound_monitor_records(self, grid16):
        sched = make_schedule(EPS16, 0.5, 0.05)
        qt0 = qtilde_random_gevrey(grid16, sched.kappa, seed=8, amplitude=0.4)
        traj = integrate_qgen(
            qt0, sched, StepperConfig(dt=0.02, t_end=0.1), ForcingSet.zero(grid16), n=0
        )
        assert len(traj.bound_ok) == len(traj.times)
        assert all(traj.bound_ok)

    def test_nonlinear_flux_neutral_at_level_zero(self, grid16):
        # the level-0 advection is energy-neutral under the symmetric cutoff
        sched = make_schedule(EPS16, 0.5, 0.05)
        qt = qtilde_random_gevrey(grid16, sched.kappa, seed=11, amplitude=0.5)
        flux0 = nonlinear_energy_flux(qt, sched, ForcingSet.zero(grid16), n=0)
        assert abs(flux0) <= 1e-14
        # at level 1 it is recorded, not asserted: just check it evaluates
        flux1 = nonlinear_energy_flux(qt, sched, ForcingSet.zero(grid16), n=1)
        assert np.isfinite(flux1)

    def test_slow_csv_writer(self, tmp_path, grid16):
        sched = make_schedule(EPS16, 0.5, 0.05)
        qt0 = qtilde_random_gevrey(grid16, sched.kappa, seed=12, amplitude=0.4)
        traj = integrate_qgen(
            qt0, sched, StepperConfig(dt=0.02, t_end=0.04, out_every=0.02),
            ForcingSet.zero(grid16), n=0,
        )
        path = tmp_path / "slow.csv"
        traj.write_csv(path, sched)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,q_l2,q_hs,energy"
        assert len(lines) == 1 + len(traj.times)

    def test_rows_schema(self, grid16):
        sched = make_schedule(EPS16, 0.5, 0.05)
        qt0 = qtilde_random_gevrey(grid16, sched.kappa, seed=9, amplitude=0.4)
        traj = integrate_qgen(
            qt0, sched, StepperConfig(dt=0.02, t_end=0.04, out_every=0.02),
            ForcingSet.zero(grid16), n=0,
        )
        rows = traj.rows(sched)
        assert len(rows) == 3 and len(rows[0]) == 4
        t, l2, hs, energy = rows[-1]
        assert t == pytest.approx(0.04)
        assert 0 < l2 <= hs
