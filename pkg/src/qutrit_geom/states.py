"""Two-qutrit pure states held as 3x3 coefficient matrices.

A state sum_ij C_ij |i>|j> is stored as its normalized coefficient matrix C;
the reduced state of the first qutrit is C C^dagger.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Union

import numpy as np

from . import mat3, rng
from .exceptions import StateFormatError

NORM_TOL = 1e-12

Rank = Literal[2, 3, "any"]


@dataclass(frozen=True)
class TwoQutritState:
    coeff: np.ndarray
    # Factor that was multiplied into the raw coefficients to reach unit norm.
    norm_factor: float = 1.0

    def __post_init__(self):
        c = mat3.as_matrix3(self.coeff)
        if c.shape != (3, 3):
            raise ValueError(f"coefficient matrix must be 3x3, got {c.shape}")
        norm = float(mat3.frobenius_norm(c))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"coefficient matrix has Frobenius norm {norm!r}, expected 1")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeff", c)

    @classmethod
    def from_coefficients(cls, c) -> "TwoQutritState":
        """Normalize an arbitrary nonzero coefficient matrix."""
        c = mat3.as_matrix3(c)
        norm = float(mat3.frobenius_norm(c))
        if norm == 0.0:
            raise ValueError("coefficient matrix is zero and cannot be normalized")
        return cls(c / norm, norm_factor=1.0 / norm)

    def reduced_density(self) -> np.ndarray:
        return reduced_density(self)

    def spectrum(self) -> mat3.Spectrum:
        return mat3.Spectrum.from_values(spectra(self.coeff))


def reduced_density(state: Union[TwoQutritState, np.ndarray]) -> np.ndarray:
    """rho_A = C C^dagger; accepts a state or a (stack of) coefficient matrices."""
    c = state.coeff if isinstance(state, TwoQutritState) else mat3.as_matrix3(state)
    return np.matmul(c, mat3.dagger(c))


def spectra(coeff) -> np.ndarray:
    """Descending spectra of C C^dagger, using |det C|^2 for the smallest eigenvalue."""
    c = mat3.as_matrix3(coeff)
    return mat3.eigvalsh3(reduced_density(c), det=np.abs(mat3.det3(c)) ** 2)


@dataclass(frozen=True)
class SampleSpec:
    count: int
    seed: int
    rank: Rank = "any"

    def __post_init__(self):
        if int(self.count) < 1:
            raise ValueError(f"count must be at least 1, got {self.count}")
        rng.check_seed(self.seed)
        if self.rank not in (2, 3, "any"):
            raise ValueError(f"rank must be 2, 3 or 'any', got {self.rank!r}")


def _ginibre(seed: int, start: int, stop: int) -> np.ndarray:
    z = rng.complex_normals(seed, rng.STREAM_GINIBRE, start, stop - start, 9)
    return z.reshape(-1, 3, 3)


def _rank2(seed: int, start: int, stop: int) -> np.ndarray:
    # C = A W: A is a 3x2 Ginibre matrix, W has Haar-random orthonormal rows,
    # so every column of C lies in the span of the two columns of A.
    z = rng.complex_normals(seed, rng.STREAM_RANK2, start, stop - start, 12)
    a = z[:, :6].reshape(-1, 3, 2)
    q, _ = np.linalg.qr(z[:, 6:].reshape(-1, 3, 2))
    return np.matmul(a, mat3.dagger(q))


def haar_coefficients(spec: SampleSpec, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Normalized coefficient matrices for draw indices ``start..stop-1``, shape (n, 3, 3).

    Each matrix depends on ``(spec.seed, index)`` only. ``rank="any"`` and
    ``rank=3`` share the Ginibre stream (Ginibre draws have full rank with
    probability one); ``rank=2`` uses its own stream.
    """
    stop = spec.count if stop is None else stop
    if not 0 <= start <= stop:
        raise ValueError(f"invalid index range [{start}, {stop})")
    draw = _rank2 if spec.rank == 2 else _ginibre

    def chunk(lo: int, hi: int) -> np.ndarray:
        c = draw(spec.seed, start + lo, start + hi)
        return c / mat3.frobenius_norm(c)[:, None, None]

    return rng.map_chunks(chunk, stop - start)


def haar_sample(spec: SampleSpec) -> list[TwoQutritState]:
    return [TwoQutritState(c) for c in haar_coefficients(spec)]


_NAMED = {
    "product": np.diag([1.0, 0.0, 0.0]),
    "rank2_uniform": np.diag([1.0, 1.0, 0.0]) / math.sqrt(2.0),
    "max_entangled": np.eye(3) / math.sqrt(3.0),
}


def named_state(name: str) -> TwoQutritState:
    try:
        c = _NAMED[name]
    except KeyError:
        raise ValueError(f"unknown state {name!r}; choose from {sorted(_NAMED)}") from None
    return TwoQutritState.from_coefficients(c)


def _parse_entry(value, where: str) -> complex:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise StateFormatError(f"{where}: expected a [re, im] pair, got {value!r}")
    parts = []
    for part in value:
        if isinstance(part, bool) or not isinstance(part, (int, float)):
            raise StateFormatError(f"{where}: components must be numbers, got {part!r}")
        if not math.isfinite(part):
            raise StateFormatError(f"{where}: components must be finite, got {part!r}")
        parts.append(float(part))
    return complex(*parts)


def state_from_json(obj) -> TwoQutritState:
    """Build a normalized state from ``{"C": 3x3 array of [re, im] pairs}`` (row-major)."""
    if not isinstance(obj, dict) or "C" not in obj:
        raise StateFormatError('C: missing; expected an object with key "C"')
    rows = obj["C"]
    if not isinstance(rows, list) or len(rows) != 3:
        raise StateFormatError("C: expected a list of 3 rows")
    c = np.zeros((3, 3), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != 3:
            raise StateFormatError(f"C[{i}]: expected a list of 3 entries")
        for j, entry in enumerate(row):
            c[i, j] = _parse_entry(entry, f"C[{i}][{j}]")
    try:
        return TwoQutritState.from_coefficients(c)
    except ValueError as exc:
        raise StateFormatError(f"C: {exc}") from None


def load_state(path: Union[str, Path]) -> TwoQutritState:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"{path}: not valid JSON ({exc})") from None
    return state_from_json(obj)
