"""Acceptance suite: one test per contract criterion, at the stated tolerances.

Each test prints a single PASS/FAIL line with the measured numbers.  The
two trend experiments (residual decay in n, balanced-error growth in eps)
are scaled-down but real runs; their parameters are frozen here.

Conventions used by the trend experiments (recorded in the design notes):

* The balanced-error sweep pins the slow-space cutoff at kappa = 4 across
  the eps sweep (the schedule's explicit-override hook); at desk-scale eps
  the eps-derived cutoff crosses integer mode shells, and the resulting
  truncation jumps would mask the eps-trend the criterion measures.
* The fitted error is the maximum over the sampled times (the bound
  being probed is uniform in time; pointwise samples alias the fast
  oscillation's phase).
* The containment run measures C_id from a high-mode tail of the
  admissible-envelope size added to the slaved initial data; with exact
  slaved data the initial error is zero and the factor-4 test is vacuous.
"""

import math

import numpy as np
import pytest

from qgbal import ops
from qgbal.balance import BalanceHierarchy, well_prepared_init
from qgbal.diagnostics import balance_error, mode_split, residual_direct, residual_from_levels
from qgbal.grid import Grid
from qgbal.initial import (
    make_qtilde,
    qtilde_random_gevrey,
    random_field,
    random_forcing,
    random_primitive_state,
)
from qgbal.norms import gevrey_norm, l2_norm
from qgbal.pesolver import (
    integrate,
    rhs_primitive,
    rhs_qxf,
    to_primitive,
    to_transformed,
    transformed_tendency_of_primitive,
)
from qgbal.qgen import integrate_qgen
from qgbal.schedule import StepperConfig, default_dt, make_schedule
from qgbal.state import ForcingSet, PrimitiveState, decompose, reconstruct

GRID16 = Grid(16, 16, 16)
GRID24 = Grid(24, 24, 24)
GRID32 = Grid(32, 32, 32)

SIGMA = 0.5


@pytest.fixture
def report(capfd):
    """Per-criterion PASS/FAIL line, written past the output capture."""

    def _report(name: str, ok: bool, detail: str) -> None:
        with capfd.disabled():
            print(f"\nACCEPTANCE {'PASS' if ok else 'FAIL'}: {name} ({detail})", flush=True)
        assert ok, f"{name}: {detail}"

    return _report


def test_round_trips(report):
    """decompose/reconstruct identities, 100 random states, <= 1e-12 relative."""
    worst_sr = 0.0
    worst_ds = 0.0
    for seed in range(100):
        w = random_primitive_state(GRID16, decay=0.6, seed=seed, amplitude=1.0)
        scale = max(np.max(np.abs(f.coeffs)) for f in w.fields())
        back, _, _ = reconstruct(decompose(w))
        err = max(np.max(np.abs((a - b).coeffs)) for a, b in zip(back.fields(), w.fields()))
        worst_sr = max(worst_sr, err / scale)

        dec = decompose(w)
        dec2 = decompose(reconstruct(dec)[0])
        for name in ("q", "vbar_u", "vbar_v", "chi", "phi"):
            a, b = getattr(dec2, name), getattr(dec, name)
            worst_ds = max(worst_ds, np.max(np.abs(a.coeffs - b.coeffs)) / scale)
    ok = worst_sr <= 1e-12 and worst_ds <= 1e-12
    report(
        "transform/decomposition round trips",
        ok,
        f"reconstruct.decompose {worst_sr:.2e}, decompose.reconstruct {worst_ds:.2e}, tol 1e-12",
    )


def test_formulation_equivalence(report):
    """Velocity-form vs transformed-form tendencies, 50 states, <= 1e-10."""
    sched = make_schedule(1e-2, SIGMA, 0.05)
    worst = 0.0
    for seed in range(50):
        forcing = random_forcing(GRID16, seed=1000 + seed, amplitude=0.2)
        w = random_primitive_state(GRID16, decay=0.6, seed=200 + seed, amplitude=0.5)
        lhs = transformed_tendency_of_primitive(rhs_primitive(w, sched, forcing))
        rhs = rhs_qxf(to_transformed(w), sched, forcing)
        den = max(np.max(np.abs(f.coeffs)) for f in rhs.fields())
        num = max(np.max(np.abs((a - b).coeffs)) for a, b in zip(lhs.fields(), rhs.fields()))
        worst = max(worst, num / den)
    report("formulation equivalence", worst <= 1e-10, f"worst rel {worst:.2e}, tol 1e-10")


def test_skew_energy_neutrality(report):
    """Stiff terms contribute <= 1e-12 |W|_0^2 to the energy tendency."""
    worst = 0.0
    for eps in (1.0, 1e-2, 1e-4):
        sched = make_schedule(eps, SIGMA, 0.05)
        for seed in range(50):
            w = random_primitive_state(GRID16, decay=0.6, seed=300 + seed, amplitude=0.5)
            u, v, rho = w.fields()
            dec = decompose(w)
            _, wvert, p = reconstruct(dec)
            px, py = ops.grad2(p)

            def inner(a, b):
                return float(np.real(np.sum(a.coeffs * np.conj(b.coeffs))))

            skew = (1.0 / sched.eps) * (
                inner(u, -v) + inner(v, u) + inner(u, px) + inner(v, py) - inner(rho, wvert)
            )
            w2 = l2_norm(u) ** 2 + l2_norm(v) ** 2 + l2_norm(rho) ** 2
            worst = max(worst, abs(skew) / w2)
    report("skew energy neutrality", worst <= 1e-12, f"worst {worst:.2e} |W|^2, tol 1e-12")


def test_tangent_correctness(report):
    """Balance tangents vs central differences, n <= 3, five directions."""
    eps = 3.3e-3  # n_star = 3 with kappa = 4.17, alias-free on 16^3
    sched = make_schedule(eps, SIGMA, 0.05)
    assert sched.n_star == 3
    forcing = random_forcing(GRID16, seed=1500, amplitude=0.1)
    qt = qtilde_random_gevrey(GRID16, sched.kappa, seed=9, amplitude=0.4)
    h = BalanceHierarchy(qt, sched, forcing)
    worst = 0.0
    fd = 1e-5
    for dseed in range(5):
        d = qtilde_random_gevrey(GRID16, sched.kappa, seed=40 + dseed, amplitude=1.0)
        tangents = h.tangent(3, d)
        hp = BalanceHierarchy(qt + fd * d, sched, forcing).levels_unchecked(3)
        hm = BalanceHierarchy(qt - fd * d, sched, forcing).levels_unchecked(3)
        for n in range(1, 4):
            scale = max(
                max(
                    np.max(np.abs(getattr(tangents[n], c).coeffs))
                    for c in ("vzu", "vzv", "d3x", "d3phi")
                ),
                1e-30,
            )
            for c in ("vzu", "vzv", "d3x", "d3phi"):
                diff = (getattr(hp[n], c).coeffs - getattr(hm[n], c).coeffs) * (0.5 / fd)
                err = np.max(np.abs(diff - getattr(tangents[n], c).coeffs))
                worst = max(worst, err / scale)
    report("tangent correctness", worst <= 1e-6, f"worst rel {worst:.2e}, tol 1e-6")


def test_residual_dual_formula(report):
    """Level-difference vs direct-definition residuals at eps in {1e-2, 1e-4}.

    Tolerance 1e-9 on coefficients, normalized by the level-0 residual
    scale (the deep-level residuals sit far below the float64 resolution
    of the O(1/eps) terms the direct form sums).
    """
    cases = [
        (GRID16, 1e-2, "random-gevrey"),
        (GRID32, 1e-4, "dipole"),
    ]
    worst = 0.0
    for grid, eps, family in cases:
        sched = make_schedule(eps, SIGMA, 0.05)
        forcing = random_forcing(grid, seed=1700, amplitude=0.1)
        qt = make_qtilde(family, grid, sched.kappa, 0.4, seed=3)
        hier = BalanceHierarchy(qt, sched, forcing)
        levels = hier.levels_unchecked(sched.n_star + 1)
        scale0 = None
        for n in range(sched.n_star + 1):
            a = residual_from_levels(levels[n], levels[n + 1], sched)
            b = residual_direct(hier, n, sched, forcing)
            if scale0 is None:
                scale0 = max(
                    np.max(np.abs(getattr(a, c).coeffs))
                    for c in ("r_vz_u", "r_vz_v", "r_chi", "r_phi")
                )
            num = max(
                np.max(np.abs((getattr(a, c) - getattr(b, c)).coeffs))
                for c in ("r_vz_u", "r_vz_v", "r_chi", "r_phi")
            )
            worst = max(worst, num / max(scale0, 1.0))
    report("residual dual-formula agreement", worst <= 1e-9, f"worst {worst:.2e}, tol 1e-9")


def _residual_aggregates(grid, eps, amp=0.4, mu=0.05):
    sched = make_schedule(eps, SIGMA, mu)
    forcing = ForcingSet.zero(grid)
    qt = make_qtilde("dipole", grid, sched.kappa, amp, seed=0)
    hier = BalanceHierarchy(qt, sched, forcing)
    levels = hier.levels_unchecked(sched.n_star + 1)
    return [
        residual_from_levels(levels[n], levels[n + 1], sched).aggregate_s(sched.s)
        for n in range(sched.n_star + 1)
    ]


def test_residual_decay_in_n(report):
    """Residual ratios < 1 up to n_star at eps = 1e-4; geometric-mean ratio
    at 1e-4 at most half of the 1e-2 one.  Dipole slow state, 32^3."""
    aggs4 = _residual_aggregates(GRID32, 1e-4)
    assert len(aggs4) == 8  # n_star = 7
    ratios4 = [aggs4[i + 1] / aggs4[i] for i in range(7)]
    mono = all(r < 1.0 for r in ratios4)
    gm4 = math.exp(np.mean([math.log(r) for r in ratios4]))

    aggs2 = _residual_aggregates(GRID32, 1e-2)
    ratios2 = [aggs2[i + 1] / aggs2[i] for i in range(len(aggs2) - 1)]
    gm2 = math.exp(np.mean([math.log(r) for r in ratios2]))

    ok = mono and (2.0 * gm4 <= gm2)
    report(
        "residual decay in n",
        ok,
        f"ratios(1e-4)={['%.2e' % r for r in ratios4]}, geomean {gm4:.2e} "
        f"vs {gm2:.2e} at 1e-2 (need factor 2)",
    )


def _cointegrate(grid, sched, forcing, qt0, n, t_end, out_every, tail=None):
    w0 = well_prepared_init(qt0, sched, forcing, n)
    if tail is not None:
        w0 = w0 + tail
    times = [i * out_every for i in range(1, int(round(t_end / out_every)) + 1)]
    cfg = StepperConfig(dt=default_dt(grid, sched), t_end=t_end)
    traj = integrate(to_transformed(w0), sched, cfg, forcing, record_times=times)
    slow = integrate_qgen(
        qt0, sched, StepperConfig(dt=0.01, t_end=t_end), forcing, n=n, record_times=times
    )
    reports = []
    for i, t in enumerate(traj.times):
        state, _, _ = to_primitive(traj.states[i])
        wstar = well_prepared_init(slow.states[i], sched, forcing, n)
        reports.append(balance_error(state, wstar, t))
    return reports


def test_balanced_error_ordering(report):
    """Error vs eps slope: p >= 0.8 at n = 0, p >= 1.6 at n = 1; and the
    n = 1 error is below the n = 0 error at every sampled t > 0 for the
    smallest eps.  24^3, kappa pinned at 4 across the sweep."""
    grid = GRID24
    forcing = ForcingSet.zero(grid)
    eps_list = (0.1, 0.05, 0.025)
    env = {}
    series = {}
    for eps in eps_list:
        sched = make_schedule(eps, SIGMA, 0.1, kappa=4.0)
        qt0 = make_qtilde("dipole", grid, sched.kappa, 0.4, seed=0)
        for n in (0, 1):
            reps = _cointegrate(grid, sched, forcing, qt0, n, t_end=1.0, out_every=0.05)
            series[(eps, n)] = reps
            env[(eps, n)] = max(r.rms for r in reps if r.t > 0)
    x = [math.log(e) for e in eps_list]
    p0 = float(np.polyfit(x, [math.log(env[(e, 0)]) for e in eps_list], 1)[0])
    p1 = float(np.polyfit(x, [math.log(env[(e, 1)]) for e in eps_list], 1)[0])
    small = eps_list[-1]
    pointwise = all(
        r1.rms < r0.rms
        for r0, r1 in zip(series[(small, 0)], series[(small, 1)])
        if r0.t > 0
    )
    ok = p0 >= 0.8 and p1 >= 1.6 and pointwise
    report(
        "balanced-error ordering",
        ok,
        f"slope n=0 {p0:.3f} (need >= 0.8), n=1 {p1:.3f} (need >= 1.6), "
        f"pointwise ordering at eps={small}: {pointwise}",
    )


def test_error_containment(report):
    """n = n_star initialization at eps = 0.025 plus an envelope-size tail:
    the squared error at t = 1 stays within the factor 4 of its initial
    value (C_id measured from the tail)."""
    grid = GRID24
    eps = 0.025
    sched = make_schedule(eps, SIGMA, 0.1)  # native schedule: kappa 2.515, n_star 1
    assert sched.n_star == 1
    forcing = ForcingSet.zero(grid)
    qt0 = make_qtilde("dipole", grid, sched.kappa, 0.4, seed=0)

    raw = random_primitive_state(grid, decay=SIGMA, seed=77, amplitude=1.0)
    tail = PrimitiveState(
        u=ops.high_pass(raw.u, sched.kappa),
        v=ops.high_pass(raw.v, sched.kappa),
        rho=ops.high_pass(raw.rho, sched.kappa),
    )
    size = math.sqrt(sum(l2_norm(f) ** 2 for f in tail.fields()))
    target = math.exp(-SIGMA / eps**0.25)
    tail = tail * (target / size)

    reps = _cointegrate(grid, sched, forcing, qt0, sched.n_star, 1.0, 0.05, tail=tail)
    initial = reps[0].combined
    final = reps[-1].combined
    c_id = initial * math.exp(2.0 * SIGMA / eps**0.25)
    ok = initial > 0 and final <= 4.0 * initial
    report(
        "error containment",
        ok,
        f"combined error {initial:.3e} -> {final:.3e} "
        f"(factor {final / initial:.2f}, need <= 4; measured C_id {c_id:.3e})",
    )


def test_invariant_suite(report):
    """Parity drift, zero-mean conservation, split orthogonality, tail
    bound, unforced energy monotonicity."""
    sched = make_schedule(0.05, SIGMA, 0.1)
    forcing = ForcingSet.zero(GRID16)
    w0 = random_primitive_state(GRID16, seed=61, amplitude=0.3)

    # 100 steps with projections disabled: genuine scheme drift
    traj = integrate(
        to_transformed(w0), sched, StepperConfig(dt=1e-3, t_end=0.1), forcing, project_every=0
    )
    parity_drift = traj.states[-1].parity_error()
    zero_mean = max(abs(f.coeffs[0, 0, 0]) for f in traj.states[-1].fields())

    f = random_field(GRID16, decay=0.4, seed=88)
    low, high, l2_high = mode_split(f, 3.0)
    ortho = abs(l2_norm(low) ** 2 + l2_high**2 - l2_norm(f) ** 2) / l2_norm(f) ** 2

    g = random_field(GRID16, decay=0.9, seed=89)
    tail_ok = True
    for kap in (2.0, 3.0, 4.0):
        _, _, hi = mode_split(g, kap)
        tail_ok &= hi <= math.exp(-SIGMA * kap) * gevrey_norm(g, SIGMA) * (1 + 1e-12)

    traj2 = integrate(
        to_transformed(w0), sched,
        StepperConfig(dt=1e-3, t_end=0.1, out_every=0.01), forcing,
    )
    energies = [row[3] for row in traj2.rows(sched)]
    monotone = all(b <= a * (1 + 1e-12) for a, b in zip(energies, energies[1:]))

    ok = parity_drift <= 1e-10 and zero_mean == 0.0 and ortho <= 1e-13 and tail_ok and monotone
    report(
        "invariant suite",
        ok,
        f"parity {parity_drift:.2e} (tol 1e-10), zero-mean {zero_mean:.1e} (exact), "
        f"orthogonality {ortho:.2e} (tol 1e-13), tail bound {tail_ok}, "
        f"energy monotone {monotone}",
    )
