"""Periodic-box grid with precomputed spectral machinery.

Arrays are indexed ``[ix, iy, iz]`` and transformed with full complex FFTs
over all three axes.  Integer wavenumbers follow the numpy ``fftfreq``
ordering; the physical wavevector is ``k'_i = 2*pi*k_i/L_i``.  The z axis
carries the even/odd symmetry of the fields, with symmetry planes at
``z = 0`` and ``z = L3/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Pre-computed spectral quantities for the periodic box.

    Parameters
    ----------
    N1, N2, N3 : int
        Mode counts per axis; must be even and >= 4.
    L1, L2, L3 : float
        Box lengths (default: the 2*pi cube).
    dealias_fraction : float
        Fraction of the per-axis Nyquist range retained after products
        (default 2/3, the standard rule for quadratic nonlinearities).
    """

    N1: int
    N2: int
    N3: int
    L1: float = 2.0 * np.pi
    L2: float = 2.0 * np.pi
    L3: float = 2.0 * np.pi
    dealias_fraction: float = 2.0 / 3.0

    # filled in __post_init__
    k1: np.ndarray = field(init=False, repr=False, compare=False)
    k2: np.ndarray = field(init=False, repr=False, compare=False)
    k3: np.ndarray = field(init=False, repr=False, compare=False)
    kp1: np.ndarray = field(init=False, repr=False, compare=False)
    kp2: np.ndarray = field(init=False, repr=False, compare=False)
    kp3: np.ndarray = field(init=False, repr=False, compare=False)
    k2h: np.ndarray = field(init=False, repr=False, compare=False)
    k2t: np.ndarray = field(init=False, repr=False, compare=False)
    kmag: np.ndarray = field(init=False, repr=False, compare=False)
    dealias_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name, n in (("N1", self.N1), ("N2", self.N2), ("N3", self.N3)):
            if n % 2 != 0 or n < 4:
                raise ValueError(f"{name} must be even and >= 4, got {n}")
        for name, length in (("L1", self.L1), ("L2", self.L2), ("L3", self.L3)):
            if length <= 0:
                raise ValueError(f"{name} must be positive, got {length}")
        if not 0.0 < self.dealias_fraction <= 1.0:
            raise ValueError(
                f"dealias_fraction must be in (0, 1], got {self.dealias_fraction}"
            )

        def set_(name, value):
            object.__setattr__(self, name, value)

        k1 = np.fft.fftfreq(self.N1, d=1.0 / self.N1).astype(np.int64)
        k2 = np.fft.fftfreq(self.N2, d=1.0 / self.N2).astype(np.int64)
        k3 = np.fft.fftfreq(self.N3, d=1.0 / self.N3).astype(np.int64)
        set_("k1", k1[:, None, None])
        set_("k2", k2[None, :, None])
        set_("k3", k3[None, None, :])

        set_("kp1", 2.0 * np.pi * self.k1 / self.L1)
        set_("kp2", 2.0 * np.pi * self.k2 / self.L2)
        set_("kp3", 2.0 * np.pi * self.k3 / self.L3)
        set_("k2h", self.kp1**2 + self.kp2**2)
        set_("k2t", self.kp1**2 + self.kp2**2 + self.kp3**2)
        set_("kmag", np.sqrt((self.k1**2 + self.k2**2 + self.k3**2).astype(np.float64)))

        # Per-axis cutoff; the Nyquist mode is always dropped (it has no
        # Hermitian partner and the retained band must be product-safe).
        cuts = [
            int(np.floor((n // 2) * self.dealias_fraction))
            for n in (self.N1, self.N2, self.N3)
        ]
        mask = (
            (np.abs(self.k1) <= cuts[0])
            & (np.abs(self.k2) <= cuts[1])
            & (np.abs(self.k3) <= cuts[2])
            & (np.abs(self.k1) < self.N1 // 2)
            & (np.abs(self.k2) < self.N2 // 2)
            & (np.abs(self.k3) < self.N3 // 2)
        )
        set_("dealias_mask", mask)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.N1, self.N2, self.N3)

    @property
    def volume(self) -> float:
        return self.L1 * self.L2 * self.L3

    @property
    def dealias_cut(self) -> tuple[int, int, int]:
        """Largest retained |k_i| per axis after dealiasing."""
        return tuple(
            min(int(np.floor((n // 2) * self.dealias_fraction)), n // 2 - 1)
            for n in (self.N1, self.N2, self.N3)
        )

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Physical coordinate axes (1D arrays); z = 0 is the symmetry plane."""
        x = np.arange(self.N1) * (self.L1 / self.N1)
        y = np.arange(self.N2) * (self.L2 / self.N2)
        z = np.arange(self.N3) * (self.L3 / self.N3)
        return x, y, z

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x, y, z = self.axes()
        return np.meshgrid(x, y, z, indexing="ij")

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape, dtype=np.complex128)

    def index_of(self, k: tuple[int, int, int]) -> tuple[int, int, int]:
        """Array index of integer wavevector ``k`` (components in [-N/2, N/2))."""
        for ki, n in zip(k, (self.N1, self.N2, self.N3)):
            if not -n // 2 <= ki < n // 2:
                raise ValueError(f"wavevector {k} outside grid range")
        return (k[0] % self.N1, k[1] % self.N2, k[2] % self.N3)

    def wavevectors(self) -> np.ndarray:
        """All integer wavevectors as an (N1, N2, N3, 3) array."""
        out = np.empty(self.shape + (3,), dtype=np.int64)
        out[..., 0] = np.broadcast_to(self.k1, self.shape)
        out[..., 1] = np.broadcast_to(self.k2, self.shape)
        out[..., 2] = np.broadcast_to(self.k3, self.shape)
        return out
