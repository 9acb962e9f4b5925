"""Experiment harness: config parsing, sweeps, run persistence, CSV emission.

Two flagship experiments plus a cross-check suite:

* ``residual-decay``: fixed slow state, sweep eps, compute the hierarchy
  residuals for n = 0..n_star and emit one row per (eps, n).
* ``balance-error``: slaved initial data of level n, co-integrate the full
  equations and the level-n slow equation, emit the error time series.
* ``oracle-suite``: run the self-check battery.

Configs are INI-style with sections [grid], [schedule], [forcing],
[experiment].  Identical config and seed produce byte-identical CSV; the
run directory name carries a timestamp, the file contents do not.
"""

from __future__ import annotations

import configparser
import datetime as _dt
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import ops
from .balance import BalanceHierarchy, Workspace, well_prepared_init
from .checkpoint import save_checkpoint
from .diagnostics import (
    CSV_COLUMNS,
    balance_error,
    csv_row,
    gevrey_fit,
    residual_from_levels,
)
from .grid import Grid
from .initial import QTILDE_FAMILIES, make_qtilde, random_primitive_state, shear_forcing
from .norms import l2_norm
from .pesolver import integrate, to_decomposition, to_primitive, to_transformed
from .qgen import integrate_qgen
from .schedule import Schedule, StepperConfig, default_dt, make_schedule
from .state import ForcingSet, PrimitiveState


class ConfigError(ValueError):
    pass


_SECTIONS = {
    "grid": {"N", "N1", "N2", "N3", "L", "L1", "L2", "L3", "dealias_fraction"},
    "schedule": {"eps", "sigma", "mu", "s", "n", "kappa"},
    "forcing": {"kind", "amplitude", "seed"},
    "experiment": {
        "kind",
        "run_id",
        "eps_sweep",
        "n_levels",
        "qtilde",
        "amplitude",
        "seed",
        "t_end",
        "out_every",
        "dt_factor",
        "tail_amplitude",
        "scheme",
    },
}

_KINDS = ("residual-decay", "balance-error", "oracle-suite")


@dataclass
class Config:
    grid: Grid
    eps: float
    sigma: float
    mu: float
    s: float
    n_override: int | None
    kappa_override: float | None
    forcing_kind: str
    forcing_amplitude: float
    forcing_seed: int
    kind: str
    run_id: str
    eps_sweep: list[float]
    n_levels: list[int]
    qtilde_family: str
    amplitude: float
    seed: int
    t_end: float
    out_every: float
    dt_factor: float
    tail_amplitude: float
    scheme: str
    raw_text: str = field(repr=False, default="")

    def schedule(self, eps: float | None = None) -> Schedule:
        return make_schedule(
            self.eps if eps is None else eps, self.sigma, self.mu, self.s,
            kappa=self.kappa_override,
        )

    def forcing(self) -> ForcingSet:
        if self.forcing_kind == "none":
            return ForcingSet.zero(self.grid)
        if self.forcing_kind == "shear":
            return shear_forcing(self.grid, self.forcing_amplitude)
        if self.forcing_kind == "random-gevrey":
            from .initial import random_forcing

            return random_forcing(self.grid, seed=self.forcing_seed,
                                  amplitude=self.forcing_amplitude)
        raise ConfigError(f"unknown forcing kind {self.forcing_kind!r}")


def _floats(text: str) -> list[float]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    return [float(s) for s in items]


def _ints(text: str) -> list[int]:
    return [int(s) for s in text.split(",") if s.strip()]


def parse_config(text: str) -> Config:
    """Parse and validate an experiment config; unknown keys are rejected."""
    parser = configparser.ConfigParser(strict=True, interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc

    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in {k.lower() for k in _SECTIONS[section]}:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    def get(section, key, default=None):
        if parser.has_option(section, key):
            return parser.get(section, key)
        return default

    n_all = get("grid", "n")
    n1 = int(get("grid", "n1", n_all or 16))
    n2 = int(get("grid", "n2", n_all or 16))
    n3 = int(get("grid", "n3", n_all or 16))
    l_all = get("grid", "l")
    two_pi = 2.0 * math.pi
    l1 = float(get("grid", "l1", l_all or two_pi))
    l2 = float(get("grid", "l2", l_all or two_pi))
    l3 = float(get("grid", "l3", l_all or two_pi))
    frac = float(get("grid", "dealias_fraction", 2.0 / 3.0))
    for n in (n1, n2, n3):
        if n % 2 != 0:
            raise ConfigError(f"grid sizes must be even, got {n}")
    grid = Grid(N1=n1, N2=n2, N3=n3, L1=l1, L2=l2, L3=l3, dealias_fraction=frac)

    eps = float(get("schedule", "eps", 0.01))
    sigma = float(get("schedule", "sigma", 0.5))
    if not 0.0 < eps <= 1.0:
        raise ConfigError(f"eps must be in (0, 1], got {eps}")
    if not 0.0 < sigma < 1.0:
        raise ConfigError(f"sigma must be in (0, 1), got {sigma}")
    mu = float(get("schedule", "mu", 0.05))
    s = float(get("schedule", "s", 2.0))
    kappa_text = get("schedule", "kappa")
    kappa_override = float(kappa_text) if kappa_text is not None else None
    n_override = get("schedule", "n")
    n_override = int(n_override) if n_override is not None else None
    if n_override is not None:
        n_star = make_schedule(eps, sigma, mu, s).n_star
        if n_override > n_star:
            raise ConfigError(
                f"slaving level n={n_override} exceeds n_star={n_star} for eps={eps}"
            )

    kind = get("experiment", "kind", "oracle-suite")
    if kind not in _KINDS:
        raise ConfigError(f"experiment kind must be one of {_KINDS}, got {kind!r}")
    eps_sweep_text = get("experiment", "eps_sweep")
    if eps_sweep_text is not None:
        eps_sweep = _floats(eps_sweep_text)
        if not eps_sweep:
            raise ConfigError("eps_sweep is empty")
        for e in eps_sweep:
            if not 0.0 < e <= 1.0:
                raise ConfigError(f"eps_sweep entry {e} outside (0, 1]")
    else:
        eps_sweep = [eps]
    n_levels_text = get("experiment", "n_levels")
    n_levels = _ints(n_levels_text) if n_levels_text is not None else [0]
    if n_levels_text is not None and not n_levels:
        raise ConfigError("n_levels is empty")

    qtilde_family = get("experiment", "qtilde", "dipole")
    if qtilde_family not in QTILDE_FAMILIES:
        raise ConfigError(f"qtilde must be one of {QTILDE_FAMILIES}, got {qtilde_family!r}")
    forcing_kind = get("forcing", "kind", "none")
    if forcing_kind not in ("none", "shear", "random-gevrey"):
        raise ConfigError(f"unknown forcing kind {forcing_kind!r}")

    scheme = get("experiment", "scheme", "ifrk4")
    return Config(
        grid=grid,
        eps=eps,
        sigma=sigma,
        mu=mu,
        s=s,
        n_override=n_override,
        kappa_override=kappa_override,
        forcing_kind=forcing_kind,
        forcing_amplitude=float(get("forcing", "amplitude", 0.0)),
        forcing_seed=int(get("forcing", "seed", 99)),
        kind=kind,
        run_id=get("experiment", "run_id", kind),
        eps_sweep=eps_sweep,
        n_levels=n_levels,
        qtilde_family=qtilde_family,
        amplitude=float(get("experiment", "amplitude", 0.4)),
        seed=int(get("experiment", "seed", 0)),
        t_end=float(get("experiment", "t_end", 1.0)),
        out_every=float(get("experiment", "out_every", 0.05)),
        dt_factor=float(get("experiment", "dt_factor", 1.0)),
        tail_amplitude=float(get("experiment", "tail_amplitude", 0.0)),
        scheme=scheme,
        raw_text=text,
    )


def parse_config_file(path) -> Config:
    return parse_config(Path(path).read_text())


# ------------------------------------------------------------------ running


@dataclass
class RunResult:
    directory: Path
    ok: bool
    assertions: list[tuple[str, bool, str]]
    csv_path: Path


def _run_dir(out_root, run_id: str) -> Path:
    root = Path(out_root or os.environ.get("QGBAL_OUT", "runs"))
    stamp = _dt.datetime.now().strftime("%Y%m%d-%H%M%S")
    path = root / f"{stamp}-{run_id}"
    suffix = 0
    while path.exists():
        suffix += 1
        path = root / f"{stamp}-{run_id}-{suffix}"
    path.mkdir(parents=True)
    return path


class _CsvWriter:
    """Incremental writer; rows survive mid-run failure."""

    def __init__(self, path: Path):
        self.path = path
        self._fh = open(path, "w", buffering=1)
        self._fh.write(",".join(CSV_COLUMNS) + "\n")

    def write(self, **values):
        self._fh.write(",".join(csv_row(**values)) + "\n")

    def close(self):
        self._fh.close()


def run_experiment(config: Config, out_root=None) -> RunResult:
    """Execute one experiment; returns the run directory and assertion results."""
    rundir = _run_dir(out_root, config.run_id)
    (rundir / "config.ini").write_text(config.raw_text)
    csv_path = rundir / "results.csv"
    writer = _CsvWriter(csv_path)
    assertions: list[tuple[str, bool, str]] = []
    try:
        if config.kind == "residual-decay":
            _run_residual_decay(config, writer, rundir, assertions)
        elif config.kind == "balance-error":
            _run_balance_error(config, writer, rundir, assertions)
        else:
            _run_oracle_suite(config, assertions)
    finally:
        writer.close()
    ok = all(flag for _, flag, _ in assertions)
    with open(rundir / "summary.txt", "w") as fh:
        for name, flag, detail in assertions:
            fh.write(f"{'PASS' if flag else 'FAIL'}: {name} ({detail})\n")
        fh.write(f"overall: {'PASS' if ok else 'FAIL'}\n")
    return RunResult(directory=rundir, ok=ok, assertions=assertions, csv_path=csv_path)


def _run_residual_decay(config: Config, writer: _CsvWriter, rundir: Path, assertions) -> None:
    grid = config.grid
    for eps in config.eps_sweep:
        sched = config.schedule(eps)
        forcing = config.forcing()
        qt = make_qtilde(config.qtilde_family, grid, sched.kappa, config.amplitude, config.seed)
        n_top = sched.n_star if config.n_override is None else config.n_override
        h = BalanceHierarchy(qt, sched, forcing)
        levels = h.levels_unchecked(n_top + 1)
        fit = gevrey_fit(qt)
        aggregates = []
        ckpt_arrays = {}
        for n in range(n_top + 1):
            triple = residual_from_levels(levels[n], levels[n + 1], sched)
            r_vbar, r_chi, r_phi = triple.sobolev_parts(sched.s)
            agg = triple.aggregate_s(sched.s)
            aggregates.append(agg)
            writer.write(
                run_id=config.run_id,
                eps=eps,
                n=n,
                t=0.0,
                res_vbar=r_vbar,
                res_chi=r_chi,
                res_phi=r_phi,
                res_aggregate_s=agg,
                sigma_fit=fit.sigma_fit if fit.reliable else None,
            )
            b = levels[n]
            for name, fld in (
                (f"L{n}/Vbar_u", b.vbar_u),
                (f"L{n}/Vbar_v", b.vbar_v),
                (f"L{n}/X", b.X),
                (f"L{n}/Phi", b.Phi),
            ):
                ckpt_arrays[name] = fld.coeffs
        save_checkpoint(rundir / f"levels-eps{eps:g}.blab", grid, ckpt_arrays)
        ratios = [aggregates[i + 1] / aggregates[i] for i in range(len(aggregates) - 1)]
        mono = all(r < 1.0 for r in ratios)
        assertions.append(
            (
                f"residual ratios < 1 at eps={eps:g}",
                mono,
                "ratios=" + ",".join(f"{r:.3f}" for r in ratios),
            )
        )


def _high_mode_tail(config: Config, sched: Schedule) -> PrimitiveState:
    """High-mode perturbation at the admissible-error envelope size.

    The envelope exp(-sigma * kappa) is the natural magnitude of the
    spectral tail of a field whose weighted norm is order one.
    """
    raw = random_primitive_state(config.grid, decay=sched.sigma, seed=config.seed + 7)
    hi = PrimitiveState(
        u=ops.high_pass(raw.u, sched.kappa),
        v=ops.high_pass(raw.v, sched.kappa),
        rho=ops.high_pass(raw.rho, sched.kappa),
    )
    size = math.sqrt(l2_norm(hi.u) ** 2 + l2_norm(hi.v) ** 2 + l2_norm(hi.rho) ** 2)
    if size == 0.0:
        return hi
    target = config.tail_amplitude * math.exp(-sched.sigma * sched.kappa)
    return hi * (target / size)


def _run_balance_error(config: Config, writer: _CsvWriter, rundir: Path, assertions) -> None:
    grid = config.grid
    for eps in config.eps_sweep:
        sched = config.schedule(eps)
        forcing = config.forcing()
        ws = Workspace(grid, sched, forcing)
        qt0 = make_qtilde(config.qtilde_family, grid, sched.kappa, config.amplitude, config.seed)
        for n in config.n_levels:
            if n > sched.n_star:
                raise ConfigError(f"n={n} exceeds n_star={sched.n_star} at eps={eps}")
            wstar0 = well_prepared_init(qt0, sched, forcing, n)
            w0 = wstar0
            if config.tail_amplitude > 0.0:
                w0 = w0 + _high_mode_tail(config, sched)
            dt = default_dt(grid, sched) * config.dt_factor
            cfg = StepperConfig(dt=dt, t_end=config.t_end, scheme=config.scheme,
                                out_every=config.out_every)
            times = [
                i * config.out_every
                for i in range(1, int(math.floor(config.t_end / config.out_every + 1e-9)) + 1)
            ]
            traj = integrate(to_transformed(w0), sched, cfg, forcing, record_times=times)
            slow_cfg = StepperConfig(
                dt=min(0.01, config.out_every), t_end=config.t_end, scheme=config.scheme
            )
            slow = integrate_qgen(
                qt0, sched, slow_cfg, forcing, n=n, record_times=times, workspace=ws
            )
            assert len(traj.times) == len(slow.times)
            for i, t in enumerate(traj.times):
                state, _, _ = to_primitive(traj.states[i])
                wstar = well_prepared_init(slow.states[i], sched, forcing, n)
                rep = balance_error(state, wstar, t)
                vn = math.sqrt(l2_norm(state.u) ** 2 + l2_norm(state.v) ** 2)
                rn = l2_norm(state.rho)
                writer.write(
                    run_id=config.run_id,
                    eps=eps,
                    n=n,
                    t=t,
                    err_v=rep.err_v,
                    err_rho=rep.err_rho,
                    combined=rep.combined,
                    energy=0.5 * (vn**2 + rn**2),
                    parity_error=traj.states[i].parity_error(),
                )
            final = traj.states[-1]
            dec = to_decomposition(final)
            save_checkpoint(
                rundir / f"final-eps{eps:g}-n{n}.blab",
                grid,
                {
                    "q": dec.q.coeffs,
                    "vbar_u": dec.vbar_u.coeffs,
                    "vbar_v": dec.vbar_v.coeffs,
                    "chi": dec.chi.coeffs,
                    "phi": dec.phi.coeffs,
                },
            )
            assertions.append(
                (f"run finite at eps={eps:g} n={n}", final.is_finite(), "no blow-up")
            )


def _run_oracle_suite(config: Config, assertions) -> None:
    from .oracles import run_oracles

    for res in run_oracles(grid=config.grid, seed=config.seed):
        assertions.append((res.name, res.ok, res.detail))

