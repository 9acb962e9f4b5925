"""The eps-derived parameter schedule and time-stepper configuration.

From the singular-perturbation parameter eps and the spectral-decay index
sigma the schedule fixes the slow-space cutoff ``kappa = eps**-0.25``, the
neighbourhood-shrink step ``delta = eps**0.25``, ``eta = sigma / log 2``,
and the optimal truncation level ``n_star = floor(eta / delta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Grid


@dataclass(frozen=True)
class Schedule:
    eps: float
    mu: float
    sigma: float
    s: float
    kappa: float
    delta: float
    eta: float
    n_star: int
    K: float = 0.5
    admissibility: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.eps <= 1.0:
            raise ValueError(f"eps must be in (0, 1], got {self.eps}")
        if self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not 0.0 < self.sigma < 1.0:
            raise ValueError(f"sigma must be in (0, 1), got {self.sigma}")


def make_schedule(
    eps: float, sigma: float, mu: float, s: float = 2.0, kappa: float | None = None
) -> Schedule:
    """Derive the full schedule from (eps, sigma, mu, s).

    ``kappa`` defaults to the eps-derived cutoff ``eps**-0.25``; an explicit
    override decouples the slow-space size from eps (recorded in the
    admissibility notes) and is useful when sweeping eps at fixed truncation.
    The smallness conditions on eps involve unnamed constants; the two
    computable ones are evaluated, the rest recorded as "unknown".
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    if not 0.0 < sigma < 1.0:
        raise ValueError(f"sigma must be in (0, 1), got {sigma}")
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")

    derived_kappa = eps**-0.25
    if kappa is None:
        kappa = derived_kappa
    elif kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    delta = eps**0.25
    eta = sigma / math.log(2.0)
    n_star = int(math.floor(eta / delta))
    admissibility = {
        "eps <= sigma/10": "pass" if eps <= sigma / 10.0 else "fail",
        "eps <= 1/(16 mu^2)": "pass" if eps <= 1.0 / (16.0 * mu**2) else "fail",
        "constant-dependent conditions": "unknown",
    }
    if kappa != derived_kappa:
        admissibility["kappa"] = f"override {kappa:g} (eps-derived {derived_kappa:.6g})"
    return Schedule(
        eps=eps,
        mu=mu,
        sigma=sigma,
        s=s,
        kappa=kappa,
        delta=delta,
        eta=eta,
        n_star=n_star,
        admissibility=admissibility,
    )


def lowpass_band_is_alias_free(grid: Grid, sched: Schedule) -> bool:
    """True when the retained product band covers the slow space.

    Quadratic products of modes below kappa alias onto modes the dealias
    mask removes only if ``floor(N_i/2 * fraction) >= kappa * L_i/(2 pi)``
    per axis.
    """
    cuts = grid.dealias_cut
    scales = (
        grid.L1 / (2.0 * np.pi),
        grid.L2 / (2.0 * np.pi),
        grid.L3 / (2.0 * np.pi),
    )
    return all(cut >= sched.kappa * sc for cut, sc in zip(cuts, scales))


def gravity_wave_cfl(grid: Grid, sched: Schedule) -> float:
    """``0.5 * eps * min_k |k3'|/|k'|`` over retained modes with k3 != 0."""
    mask = grid.dealias_mask & (np.broadcast_to(grid.k3, grid.shape) != 0)
    if not np.any(mask):
        return 0.5 * sched.eps
    ratio = np.abs(grid.kp3) / np.sqrt(grid.k2t, where=grid.k2t > 0, out=np.ones_like(grid.k2t))
    ratio = np.broadcast_to(ratio, grid.shape)
    return 0.5 * sched.eps * float(np.min(ratio[mask]))


def default_dt(grid: Grid, sched: Schedule) -> float:
    """``0.25 * eps * min(1, min_k |k3'|/|k'|)`` over retained modes."""
    return 0.5 * min(gravity_wave_cfl(grid, sched), 0.5 * sched.eps)


@dataclass(frozen=True)
class StepperConfig:
    """Time step, scheme, and horizon for the integrating-factor steppers."""

    dt: float
    t_end: float
    scheme: str = "ifrk4"
    out_every: float = 0.0  # 0: record only the endpoints

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")
        if self.scheme not in ("ifrk4", "ifrk2"):
            raise ValueError(f"scheme must be ifrk4 or ifrk2, got {self.scheme!r}")

    def check_cfl(self, grid: Grid, sched: Schedule) -> None:
        limit = min(gravity_wave_cfl(grid, sched), 0.5 * sched.eps)
        if self.dt > limit * (1.0 + 1e-12):
            raise ValueError(
                f"dt={self.dt:.3e} violates the fast-wave resolution limit {limit:.3e}"
            )
