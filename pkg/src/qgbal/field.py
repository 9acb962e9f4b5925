"""Spectral scalar fields: complex Fourier coefficients plus a z-parity tag.

Coefficients use the convention ``f(x) = sum_k F_k exp(i k'.x)`` (numpy
``norm="forward"``), so a real single mode ``cos(k'.x)`` has amplitude 1/2
at ``+k`` and ``-k``.  Fields of real data satisfy the Hermitian symmetry
``F_{-k} = conj(F_k)``; constructors enforce it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid

EVEN = "even"
ODD = "odd"
NONE = "none"

_PARITIES = (EVEN, ODD, NONE)


def _combine_add(a: str, b: str) -> str:
    return a if a == b else NONE


def _combine_mul(a: str, b: str) -> str:
    if a == NONE or b == NONE:
        return NONE
    return EVEN if a == b else ODD


def _flip(p: str) -> str:
    if p == EVEN:
        return ODD
    if p == ODD:
        return EVEN
    return NONE


@dataclass
class SpectralField:
    """A real scalar field on the periodic box, stored spectrally.

    Treat instances as immutable; operators return new fields.  ``z_parity``
    is one of ``"even"``, ``"odd"``, ``"none"`` and records the symmetry of
    the field under ``z -> -z``.
    """

    grid: Grid
    coeffs: np.ndarray
    z_parity: str = NONE

    def __post_init__(self) -> None:
        if self.z_parity not in _PARITIES:
            raise ValueError(f"bad z_parity {self.z_parity!r}")
        if self.coeffs.shape != self.grid.shape:
            raise ValueError(
                f"coefficient shape {self.coeffs.shape} != grid {self.grid.shape}"
            )
        if self.coeffs.dtype != np.complex128:
            object.__setattr__(self, "coeffs", self.coeffs.astype(np.complex128))

    # ---------------------------------------------------------------- basics

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy(), self.z_parity)

    def with_coeffs(self, coeffs: np.ndarray, z_parity: str | None = None) -> "SpectralField":
        return SpectralField(self.grid, coeffs, self.z_parity if z_parity is None else z_parity)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_same_grid(other)
        return SpectralField(
            self.grid, self.coeffs + other.coeffs, _combine_add(self.z_parity, other.z_parity)
        )

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_same_grid(other)
        return SpectralField(
            self.grid, self.coeffs - other.coeffs, _combine_add(self.z_parity, other.z_parity)
        )

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * scalar, self.z_parity)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.coeffs, self.z_parity)

    def _check_same_grid(self, other: "SpectralField") -> None:
        if self.grid is not other.grid and self.grid != other.grid:
            raise ValueError("fields live on different grids")

    # ------------------------------------------------------------ transforms

    def to_physical(self) -> np.ndarray:
        """Inverse transform to real grid values."""
        phys = np.fft.ifftn(self.coeffs, norm="forward")
        return np.ascontiguousarray(phys.real)

    @classmethod
    def from_physical(cls, grid: Grid, values: np.ndarray, z_parity: str = NONE) -> "SpectralField":
        """Forward transform of real grid values (Hermitian by construction)."""
        if values.shape != grid.shape:
            raise ValueError(f"value shape {values.shape} != grid {grid.shape}")
        coeffs = np.fft.fftn(np.asarray(values, dtype=np.float64), norm="forward")
        return cls(grid, coeffs, z_parity)

    # ---------------------------------------------------------- constructors

    @classmethod
    def zeros(cls, grid: Grid, z_parity: str = NONE) -> "SpectralField":
        return cls(grid, grid.zeros(), z_parity)

    @classmethod
    def from_modes(
        cls,
        grid: Grid,
        modes: dict[tuple[int, int, int], complex],
        z_parity: str = NONE,
        hermitianize: bool = True,
    ) -> "SpectralField":
        """Build a field from explicit ``{k: amplitude}`` entries.

        With ``hermitianize=True`` each entry also sets the conjugate at
        ``-k`` so the field is real; supply both partners yourself otherwise.
        """
        coeffs = grid.zeros()
        for k, amp in modes.items():
            coeffs[grid.index_of(k)] = amp
            if hermitianize:
                kneg = (-k[0], -k[1], -k[2])
                coeffs[grid.index_of(kneg)] = np.conj(amp)
        return cls(grid, coeffs, z_parity)

    # ------------------------------------------------------------- utilities

    def at(self, k: tuple[int, int, int]) -> complex:
        return complex(self.coeffs[self.grid.index_of(k)])

    def hermitian_error(self) -> float:
        """Max deviation from the real-field symmetry F(-k) = conj(F(k))."""
        rev = _reverse_all(self.coeffs)
        return float(np.max(np.abs(self.coeffs - np.conj(rev))))

    def parity_error(self) -> float:
        """Max deviation of the coefficients from the tagged z-symmetry."""
        if self.z_parity == NONE:
            return 0.0
        rev = _reverse_axis(self.coeffs, 2)
        sign = 1.0 if self.z_parity == EVEN else -1.0
        return float(np.max(np.abs(self.coeffs - sign * rev)))


def _reverse_axis(a: np.ndarray, axis: int) -> np.ndarray:
    """Index map k -> -k along one axis (FFT ordering)."""
    idx = [slice(None)] * a.ndim
    n = a.shape[axis]
    order = (-np.arange(n)) % n
    idx[axis] = order
    return a[tuple(idx)]


def _reverse_all(a: np.ndarray) -> np.ndarray:
    out = a
    for axis in range(3):
        out = _reverse_axis(out, axis)
    return out


def hermitianize(f: SpectralField) -> SpectralField:
    """Project onto the real-field symmetry F(-k) = conj(F(k))."""
    rev = _reverse_all(f.coeffs)
    return f.with_coeffs(0.5 * (f.coeffs + np.conj(rev)))


def combine_mul_parity(a: str, b: str) -> str:
    return _combine_mul(a, b)


def flip_parity(p: str) -> str:
    return _flip(p)
