"""Spectral invariants of two-qutrit pure states and the admissible (C_I, G) region.

With s1 = 1 fixed by normalization, a spectrum is described by the pair
(s2, s3) of elementary symmetric polynomials, or equivalently by the
I-concurrence C_I = 2 sqrt(s2) and the determinant invariant
G = 3 sqrt(3) sqrt(s3) = 3 sqrt(3) |det C|. A point (C_I, G) belongs to a
physical state exactly when the discriminant of x^3 - x^2 + s2 x - s3 is
non-negative; the discriminant vanishes on degenerate spectra, which trace out
the region's boundary.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import mat3
from .exceptions import IdentityViolation, NegativeInput
from .mat3 import Spectrum

REGION_TOL = 1e-10
CI_MAX = 2.0 / math.sqrt(3.0)
G_SCALE = 3.0 * math.sqrt(3.0)


class Region(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"
    OUT_OF_RANGE = "out_of_range"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class InvariantSet:
    s1: float
    s2: float
    s3: float
    c_i: float
    g: float
    discriminant: float
    physical: bool


class BoundaryPoint(NamedTuple):
    a: float
    c_i: float
    g: float


def symmetric_polynomials(lam):
    """(s1, s2, s3) of the eigenvalues along the last axis."""
    x = np.asarray(lam, dtype=np.float64)
    l1, l2, l3 = x[..., 0], x[..., 1], x[..., 2]
    return l1 + l2 + l3, l1 * l2 + l2 * l3 + l3 * l1, l1 * l2 * l3


def discriminant(s2, s3):
    """Discriminant of x^3 - x^2 + s2 x - s3."""
    return 18.0 * s2 * s3 - 4.0 * s3 + s2 * s2 - 4.0 * s2**3 - 27.0 * s3 * s3


def squared_gap_product(lam):
    """(l1 - l2)^2 (l2 - l3)^2 (l1 - l3)^2 along the last axis."""
    x = np.asarray(lam, dtype=np.float64)
    d = (x[..., 0] - x[..., 1]) * (x[..., 1] - x[..., 2]) * (x[..., 0] - x[..., 2])
    return d * d


def cubic_residuals(lam, s1, s2, s3):
    """|x^3 - s1 x^2 + s2 x - s3| at each eigenvalue x (last axis)."""
    x = np.asarray(lam, dtype=np.float64)
    s1, s2, s3 = (np.asarray(s, dtype=np.float64)[..., None] for s in (s1, s2, s3))
    return np.abs(((x - s1) * x + s2) * x - s3)


def concurrence(s2):
    return 2.0 * np.sqrt(np.maximum(s2, 0.0))


def g_invariant(s3):
    return G_SCALE * np.sqrt(np.maximum(s3, 0.0))


def concurrence_from_purity(rho):
    """C_I = sqrt(2 (1 - Tr rho^2)) computed directly from the density matrix."""
    purity = np.sum(np.abs(np.asarray(rho)) ** 2, axis=(-2, -1))
    return np.sqrt(np.maximum(2.0 * (1.0 - purity), 0.0))


def invariants_from_spectrum(spec: Spectrum, rho=None, tol: float = REGION_TOL) -> InvariantSet:
    """Invariants of one spectrum.

    If ``rho`` is given, C_I is also computed from the purity of ``rho`` and
    the two routes must agree within ``tol``.
    """
    lam = np.asarray(spec, dtype=np.float64)
    s1, s2, s3 = (float(v) for v in symmetric_polynomials(lam))
    c_i = float(concurrence(s2))
    if rho is not None:
        other = float(concurrence_from_purity(mat3.as_matrix3(rho)))
        if abs(other - c_i) > tol:
            raise IdentityViolation(
                f"C_I from spectrum ({c_i!r}) and from purity ({other!r}) differ by more than {tol:g}"
            )
    disc = float(discriminant(s2, s3))
    return InvariantSet(
        s1=s1, s2=s2, s3=s3, c_i=c_i, g=float(g_invariant(s3)),
        discriminant=disc, physical=disc >= -tol,
    )


def classify(c_i, g, tol: float = REGION_TOL) -> np.ndarray:
    """Vectorized region labels (strings) for arrays of (C_I, G)."""
    c_i = np.asarray(c_i, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if np.any(c_i < 0) or np.any(g < 0):
        raise NegativeInput("C_I and G must be non-negative")
    delta = discriminant(c_i * c_i / 4.0, g * g / 27.0)
    out_of_range = (c_i > CI_MAX + tol) | (g > 1.0 + tol)
    return np.select(
        [out_of_range, delta > tol, delta < -tol],
        [Region.OUT_OF_RANGE.value, Region.INTERIOR.value, Region.EXTERIOR.value],
        default=Region.BOUNDARY.value,
    )


def region_membership(c_i: float, g: float, tol: float = REGION_TOL) -> Region:
    if c_i < 0 or g < 0:
        raise NegativeInput(f"C_I and G must be non-negative, got ({c_i!r}, {g!r})")
    return Region(str(classify(c_i, g, tol)))


def printed_region_lhs(c_i, g):
    """C_I^6 - C_I^4 - 72 C_I^2 G^2 + 432 G^4 + 64 G^2, with these exact coefficients.

    Not equivalent to the discriminant condition (compare ``region_lhs``); the
    audit measures how often its claimed sign (<= 0) holds on real states.
    """
    c2 = np.asarray(c_i, dtype=np.float64) ** 2
    g2 = np.asarray(g, dtype=np.float64) ** 2
    return c2**3 - c2**2 - 72.0 * c2 * g2 + 432.0 * g2**2 + 64.0 * g2


def region_lhs(c_i, g):
    """27 C_I^6 - 27 C_I^4 - 72 C_I^2 G^2 + 16 G^4 + 64 G^2, which equals -432 times the discriminant.

    A point is physical iff this is <= 0 (with C_I, G in range).
    """
    c2 = np.asarray(c_i, dtype=np.float64) ** 2
    g2 = np.asarray(g, dtype=np.float64) ** 2
    return 27.0 * c2**3 - 27.0 * c2**2 - 72.0 * c2 * g2 + 16.0 * g2**2 + 64.0 * g2


def weak_discriminant_bound(s2: float, s3: float, tol: float = REGION_TOL) -> bool:
    """27 s3^2 <= 4 s2^3 (up to ``tol``). Necessary but loose; used only as an audit cross-check."""
    if s2 < 0 or s3 < 0:
        raise NegativeInput(f"s2 and s3 must be non-negative, got ({s2!r}, {s3!r})")
    return 27.0 * s3 * s3 - 4.0 * s2**3 <= tol


def maclaurin_bound(s2: float, s3: float, tol: float = REGION_TOL) -> bool:
    """27 s3^2 <= s2^3 (up to ``tol``), which every non-negative spectrum satisfies."""
    if s2 < 0 or s3 < 0:
        raise NegativeInput(f"s2 and s3 must be non-negative, got ({s2!r}, {s3!r})")
    return 27.0 * s3 * s3 - s2**3 <= tol


def boundary_point(a: float) -> BoundaryPoint:
    """Boundary point for the degenerate spectrum (a, a, 1 - 2a), 0 <= a <= 1/2."""
    if not 0.0 <= a <= 0.5:
        raise ValueError(f"a must lie in [0, 1/2], got {a!r}")
    s2 = 2.0 * a - 3.0 * a * a
    s3 = a * a * (1.0 - 2.0 * a)
    return BoundaryPoint(float(a), float(concurrence(s2)), float(g_invariant(s3)))


def boundary_curve(n_points: int) -> list[BoundaryPoint]:
    if n_points < 2:
        raise ValueError(f"n_points must be at least 2, got {n_points}")
    return [boundary_point(float(a)) for a in np.linspace(0.0, 0.5, n_points)]


def boundary_g_range(c_i: float) -> tuple[float, float]:
    """Smallest and largest admissible G at a given C_I.

    The upper edge comes from spectra (a, a, 1 - 2a) with a <= 1/3, the lower
    edge from a >= 1/3 when C_I > 1 and is G = 0 otherwise.
    """
    if c_i < 0 or c_i > CI_MAX + REGION_TOL:
        raise ValueError(f"C_I must lie in [0, 2/sqrt(3)], got {c_i!r}")
    s2 = min(c_i * c_i / 4.0, 1.0 / 3.0)
    root = math.sqrt(max(1.0 - 3.0 * s2, 0.0))
    upper = boundary_point((1.0 - root) / 3.0).g
    a_low = (1.0 + root) / 3.0
    lower = boundary_point(a_low).g if a_low <= 0.5 else 0.0
    return lower, upper
