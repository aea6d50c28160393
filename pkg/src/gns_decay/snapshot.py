"""FNS1 binary snapshots of spectral states.

Layout (all little-endian):
    4 bytes   magic b"FNS1"
    int64     n
    float64   box length L
    float64   alpha
    float64   t
    complex128[3, n, n, n]  coefficients, component-major, C order
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import BaseModel

from gns_decay.galerkin import add6_constant
from gns_decay.spectral import Grid, SpectralField, cutoff_mask

logger = logging.getLogger(__name__)

MAGIC = b"FNS1"
HEADER = struct.Struct("<4sqddd")
COEFF_DTYPE = np.dtype("<c16")


@dataclass(frozen=True)
class Snapshot:
    u: SpectralField
    alpha: float
    t: float

    @property
    def grid(self) -> Grid:
        return self.u.grid


def encode_snapshot(u: SpectralField, alpha: float, t: float) -> bytes:
    grid = u.grid
    if grid.dim != 3:
        raise ValueError("FNS1 snapshots store 3D fields only")
    header = HEADER.pack(MAGIC, grid.n, grid.box_length, alpha, t)
    return header + np.ascontiguousarray(u.coeffs, dtype=COEFF_DTYPE).tobytes()


def decode_snapshot(data: bytes) -> Snapshot:
    if len(data) < HEADER.size:
        raise ValueError("Snapshot is shorter than its header")
    magic, n, box_length, alpha, t = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"Not an FNS1 snapshot (magic {magic!r})")
    grid = Grid(n=n, box_length=box_length, dim=3)
    expected = HEADER.size + COEFF_DTYPE.itemsize * int(np.prod(grid.field_shape))
    if len(data) != expected:
        raise ValueError(f"Snapshot has {len(data)} bytes, expected {expected} for n={n}")
    coeffs = np.frombuffer(data, dtype=COEFF_DTYPE, offset=HEADER.size)
    coeffs = coeffs.reshape(grid.field_shape).astype(np.complex128)
    return Snapshot(u=SpectralField(grid, coeffs), alpha=alpha, t=t)


def write_snapshot(path: Path, u: SpectralField, alpha: float, t: float) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_snapshot(u, alpha, t))
    logger.debug("Wrote snapshot t=%g to %s", t, path)
    return path


def read_snapshot(path: Path) -> Snapshot:
    return decode_snapshot(Path(path).read_bytes())


class InvariantCheck(BaseModel):
    name: str
    value: float
    limit: float
    passed: bool


def check_snapshot(
    snapshot: Snapshot, tolerance: float = 1e-12, cutoff_N: float | None = None
) -> list[InvariantCheck]:
    """Invariant suite for a stored state; relative quantities are scaled by max |u_hat|."""
    u = snapshot.u
    grid = u.grid
    finite = bool(np.all(np.isfinite(u.coeffs)))
    checks = [InvariantCheck(name="finite", value=0.0 if finite else 1.0, limit=0.0, passed=finite)]
    if not finite:
        return checks

    scale = float(np.abs(u.coeffs).max()) or 1.0
    radius = grid.dealias_radius if cutoff_N is None else cutoff_N
    outside = ~cutoff_mask(grid, radius)
    measured = {
        "divergence": u.max_divergence() / (scale * grid.max_wavenumber),
        "mean mode": float(np.abs(u.coeffs[(slice(None), *([0] * grid.dim))]).max()) / scale,
        "hermitian symmetry": u.hermitian_defect() / scale,
        "cutoff compliance": float(np.abs(u.coeffs[:, outside]).max(initial=0.0)) / scale,
    }
    for name, value in measured.items():
        checks.append(InvariantCheck(name=name, value=value, limit=tolerance, passed=value <= tolerance))

    constant = add6_constant(u)
    checks.append(
        InvariantCheck(
            name="nonlinear bound constant",
            value=constant,
            limit=float("inf"),
            passed=bool(np.isfinite(constant)),
        )
    )
    return checks
