"""Three-path interferometer with path markers, lossy paths and marker erasure.

The path-marker state is sum_i sqrt(t_i) c_i |path_i>|sigma_i>, where t_i is
the intensity transmittance of path i. Erasure post-selects the marker on a
unit vector e; with overlaps alpha_i = <e|sigma_i> and tau_i = |alpha_i|^2
the conditional path populations are proportional to |c_i|^2 t_i tau_i.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import mat3
from .exceptions import (
    NonOrthonormalMarkers,
    NotAProbabilityVector,
    ZeroSuccessProbability,
)
from .invariants import G_SCALE
from .mat3 import Spectrum

UNIT_TOL = 1e-12
ORTHONORMAL_TOL = 1e-10
MIN_SUCCESS = 1e-15
PROB_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MarkedState:
    """Path amplitudes ``c``, transmittances ``t`` and marker vectors (``markers[i]`` = sigma_i)."""

    c: np.ndarray
    t: np.ndarray
    markers: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=np.complex128).reshape(3)
        t = np.asarray(self.t, dtype=np.float64).reshape(3)
        m = mat3.as_matrix3(self.markers)
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(t))):
            raise ValueError("amplitudes and transmittances must be finite")
        if abs(np.sum(np.abs(c) ** 2) - 1.0) > UNIT_TOL:
            raise ValueError(f"path amplitudes are not normalized: sum |c|^2 = {np.sum(np.abs(c) ** 2)!r}")
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise ValueError(f"transmittances must lie in [0, 1], got {t}")
        norms = np.linalg.norm(m, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise ValueError(f"marker vectors must have unit norm, got norms {norms}")
        object.__setattr__(self, "c", _frozen(c))
        object.__setattr__(self, "t", _frozen(t))
        object.__setattr__(self, "markers", _frozen(m))

    @classmethod
    def create(cls, c, t=(1.0, 1.0, 1.0), markers=None, normalize: bool = False) -> "MarkedState":
        """Convenience constructor; markers default to the computational basis."""
        c = np.asarray(c, dtype=np.complex128)
        if normalize:
            norm = np.linalg.norm(c)
            if norm == 0.0:
                raise ValueError("path amplitudes are all zero")
            c = c / norm
        if markers is None:
            markers = np.eye(3)
        else:
            markers = np.asarray(markers, dtype=np.complex128)
            if normalize:
                markers = markers / np.linalg.norm(markers, axis=1, keepdims=True)
        return cls(c, t, markers)

    def markers_orthonormal(self) -> bool:
        gram = self.markers @ mat3.dagger(self.markers)
        return bool(np.max(np.abs(gram - np.eye(3))) <= ORTHONORMAL_TOL)

    def _transmitted(self):
        m = (np.sqrt(self.t) * self.c)[:, None] * self.markers
        rho = m @ mat3.dagger(m)
        return m, rho, float(np.real(np.trace(rho)))

    def path_state(self) -> Optional[np.ndarray]:
        """Normalized reduced path state of the transmitted state, or None if nothing is transmitted."""
        _, rho, n = self._transmitted()
        return rho / n if n > MIN_SUCCESS else None

    def path_spectrum(self) -> Optional[Spectrum]:
        m, rho, n = self._transmitted()
        if n <= MIN_SUCCESS:
            return None
        return mat3.eig_hermitian(rho / n, det=abs(mat3.det3(m)) ** 2 / n**3)


@dataclass(frozen=True)
class ErasureSetup:
    """Erasure onto the unit marker vector ``e``.

    ``efficiency`` in [0, 1] scales every tau_i by the same factor (an
    imperfect erasure detector). It leaves all conditional quantities
    unchanged and multiplies the success probability.
    """

    e: np.ndarray
    efficiency: float = 1.0

    def __post_init__(self):
        e = np.asarray(self.e, dtype=np.complex128).reshape(3)
        if abs(np.linalg.norm(e) - 1.0) > UNIT_TOL:
            raise ValueError(f"erasure vector must have unit norm, got {np.linalg.norm(e)!r}")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"efficiency must lie in [0, 1], got {self.efficiency!r}")
        object.__setattr__(self, "e", _frozen(e))

    @classmethod
    def from_vector(cls, e, efficiency: float = 1.0) -> "ErasureSetup":
        e = np.asarray(e, dtype=np.complex128)
        return cls(e / np.linalg.norm(e), efficiency)

    def overlaps(self, markers) -> np.ndarray:
        """alpha_i = <e|sigma_i>."""
        return np.asarray(markers) @ np.conj(self.e)

    def taus(self, markers) -> np.ndarray:
        return self.efficiency * np.abs(self.overlaps(markers)) ** 2


@dataclass(frozen=True)
class ErasureReport:
    p_e: float
    g_t: float
    p_cond: Optional[tuple[float, float, float]] = None
    pred_cond: Optional[float] = None
    vis_cond: Optional[float] = None
    comp_lhs: Optional[float] = None
    path_spectrum: Optional[Spectrum] = None

    @property
    def conditional(self) -> bool:
        """False when the success probability is too small to condition on."""
        return self.p_cond is not None

    def require_conditional(self) -> "ErasureReport":
        if not self.conditional:
            raise ZeroSuccessProbability(f"success probability {self.p_e!r} <= {MIN_SUCCESS:g}")
        return self


def predictability(p) -> float:
    """sqrt(3/2 * sum (p_i - 1/3)^2): 0 for uniform populations, 1 for a single path."""
    p = np.asarray(p, dtype=np.float64).reshape(3)
    if np.any(p < -PROB_TOL) or abs(p.sum() - 1.0) > PROB_TOL:
        raise NotAProbabilityVector(f"not a probability vector: {p}")
    return float(math.sqrt(1.5 * np.sum((p - 1.0 / 3.0) ** 2)))


def g_t(t, spec: Spectrum) -> float:
    t = np.asarray(t, dtype=np.float64).reshape(3)
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise ValueError(f"transmittances must lie in [0, 1], got {t}")
    return float(G_SCALE * math.sqrt(np.prod(t)) * math.sqrt(spec.l1 * spec.l2 * spec.l3))


def intensity(rho, phases) -> float:
    """Detected intensity for phase settings (phi_1, phi_2, phi_3) in radians."""
    rho = mat3.as_matrix3(rho)
    mat3.check_density(rho, unit_trace=False)
    phi = np.asarray(phases, dtype=np.float64).reshape(3)
    total = float(np.sum(np.real(np.diagonal(rho))))
    for i in range(3):
        for j in range(i + 1, 3):
            total += 2.0 * float(np.real(np.exp(1j * (phi[i] - phi[j])) * rho[i, j]))
    return total


def erase(ms: MarkedState, setup: ErasureSetup) -> ErasureReport:
    spec = ms.path_spectrum()
    gt = g_t(ms.t, spec) if spec is not None else 0.0
    w = np.abs(ms.c) ** 2 * ms.t * setup.taus(ms.markers)
    p_e = float(w.sum())
    if p_e <= MIN_SUCCESS:
        return ErasureReport(p_e=p_e, g_t=gt, path_spectrum=spec)
    p_cond = w / p_e
    amp = np.sqrt(w)
    vis = 2.0 * (amp[0] * amp[1] + amp[0] * amp[2] + amp[1] * amp[2]) / p_e
    pred = predictability(p_cond)
    return ErasureReport(
        p_e=p_e,
        g_t=gt,
        p_cond=tuple(float(x) for x in p_cond),
        pred_cond=pred,
        vis_cond=float(vis),
        comp_lhs=pred * pred + float(vis) ** 2 + gt * gt,
        path_spectrum=spec,
    )


class SweepFamily(str, enum.Enum):
    PIVOT = "pivot"
    UNIFORM = "uniform"


def _require_orthonormal(markers: np.ndarray) -> None:
    gram = markers @ mat3.dagger(markers)
    if np.max(np.abs(gram - np.eye(3))) > ORTHONORMAL_TOL:
        raise NonOrthonormalMarkers("this erasure family requires orthonormal markers")


def pivot_setup(markers, tau: float) -> ErasureSetup:
    """e = sqrt(tau) sigma_1 + sqrt((1 - tau)/2) (sigma_2 + sigma_3).

    tau = 1 projects onto the first marker; tau = 1/3 gives equal overlaps.
    """
    markers = mat3.as_matrix3(markers)
    _require_orthonormal(markers)
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau!r}")
    side = math.sqrt((1.0 - tau) / 2.0)
    beta = np.array([math.sqrt(tau), side, side])
    return ErasureSetup.from_vector(markers.T @ beta)


def uniform_setup(markers, tau: float) -> ErasureSetup:
    """Symmetric erasure vector at efficiency ``tau``, so every tau_i equals tau / 3."""
    markers = mat3.as_matrix3(markers)
    _require_orthonormal(markers)
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau!r}")
    return ErasureSetup.from_vector(markers.T @ np.ones(3), efficiency=tau)


_FAMILIES = {SweepFamily.PIVOT: pivot_setup, SweepFamily.UNIFORM: uniform_setup}


def erasure_sweep(ms: MarkedState, family="pivot", steps: int = 101) -> list[tuple[float, ErasureReport]]:
    """One report per point of the inclusive grid tau = 0, ..., 1 with ``steps`` points."""
    if steps < 2:
        raise ValueError(f"steps must be at least 2, got {steps}")
    make = _FAMILIES[SweepFamily(family)]
    return [(float(tau), erase(ms, make(ms.markers, float(tau)))) for tau in np.linspace(0.0, 1.0, steps)]
