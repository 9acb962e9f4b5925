"""Self-describing binary checkpoint container.

Layout (all little-endian):

* magic ``BLAB1`` (5 bytes)
* grid header: L1, L2, L3 as float64, then N1, N2, N3 as uint32
* array count as uint32
* per array: name length (uint32), UTF-8 name, then N1*N2*N3 complex
  values as interleaved (re, im) float64 in lexicographic k order
  (k1 outermost, each axis ascending from -N/2 to N/2 - 1).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import Grid

MAGIC = b"BLAB1"


class CheckpointError(IOError):
    pass


def _lex_order(n: int) -> np.ndarray:
    """Array indices of k = -n/2 .. n/2-1 in ascending k order."""
    ks = np.arange(-(n // 2), n // 2)
    return ks % n


def _to_lex(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    i1 = _lex_order(grid.N1)
    i2 = _lex_order(grid.N2)
    i3 = _lex_order(grid.N3)
    return coeffs[np.ix_(i1, i2, i3)]


def _from_lex(grid: Grid, lex: np.ndarray) -> np.ndarray:
    out = np.empty(grid.shape, dtype=np.complex128)
    i1 = _lex_order(grid.N1)
    i2 = _lex_order(grid.N2)
    i3 = _lex_order(grid.N3)
    out[np.ix_(i1, i2, i3)] = lex
    return out


def save_checkpoint(path, grid: Grid, arrays: dict[str, np.ndarray]) -> None:
    """Write named coefficient arrays for one grid."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<3d", grid.L1, grid.L2, grid.L3))
        fh.write(struct.pack("<3I", grid.N1, grid.N2, grid.N3))
        fh.write(struct.pack("<I", len(arrays)))
        for name, coeffs in arrays.items():
            if coeffs.shape != grid.shape:
                raise CheckpointError(f"array {name!r} has shape {coeffs.shape}")
            raw = name.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
            lex = np.ascontiguousarray(_to_lex(grid, coeffs))
            inter = np.empty(lex.size * 2, dtype="<f8")
            inter[0::2] = lex.real.ravel()
            inter[1::2] = lex.imag.ravel()
            fh.write(inter.tobytes())


def load_checkpoint(path) -> tuple[Grid, dict[str, np.ndarray]]:
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(5)
        if magic != MAGIC:
            raise CheckpointError(f"{path}: bad magic {magic!r}")
        L1, L2, L3 = struct.unpack("<3d", fh.read(24))
        N1, N2, N3 = struct.unpack("<3I", fh.read(12))
        grid = Grid(N1=N1, N2=N2, N3=N3, L1=L1, L2=L2, L3=L3)
        (count,) = struct.unpack("<I", fh.read(4))
        arrays: dict[str, np.ndarray] = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<I", fh.read(4))
            name = fh.read(name_len).decode("utf-8")
            n_vals = N1 * N2 * N3 * 2
            buf = fh.read(n_vals * 8)
            if len(buf) != n_vals * 8:
                raise CheckpointError(f"{path}: truncated array {name!r}")
            inter = np.frombuffer(buf, dtype="<f8")
            lex = (inter[0::2] + 1j * inter[1::2]).reshape(N1, N2, N3)
            arrays[name] = _from_lex(grid, lex)
    return grid, arrays
