"""Closed-form linear algebra for 3x3 complex matrices.

Functions accept one matrix of shape ``(3, 3)`` or a stack ``(..., 3, 3)`` and
broadcast over the leading axes. Eigenvalues of density matrices come from
the trigonometric solution of the characteristic cubic, so the result is a
fixed sequence of floating-point operations with no iteration.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .exceptions import (
    DegenerateEigenvalue,
    NotAnEigenvalue,
    NotHermitian,
    NotPSD,
    NotUnitTrace,
)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
ADJUGATE_ZERO_TOL = 1e-12
EIGVEC_TOL = 1e-8

_EYE = np.eye(3, dtype=np.complex128)


class Spectrum(NamedTuple):
    """Eigenvalues of a unit-trace density matrix, sorted descending."""

    l1: float
    l2: float
    l3: float

    @classmethod
    def from_values(cls, values, tol: float = PSD_TOL) -> "Spectrum":
        lam = np.asarray(values, dtype=np.float64).reshape(3)
        if not np.all(np.isfinite(lam)):
            raise ValueError(f"spectrum has non-finite entries: {lam}")
        if lam.min() < -tol:
            raise NotPSD(f"eigenvalue {lam.min():.3e} is below -{tol:g}")
        lam = np.sort(np.where(lam < 0.0, 0.0, lam))[::-1]
        if abs(lam.sum() - 1.0) > TRACE_TOL:
            raise NotUnitTrace(f"eigenvalues sum to {lam.sum():.17g}, not 1")
        return cls(float(lam[0]), float(lam[1]), float(lam[2]))

    @property
    def values(self) -> np.ndarray:
        return np.array(self, dtype=np.float64)


def as_matrix3(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.shape[-2:] != (3, 3):
        raise ValueError(f"expected trailing shape (3, 3), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def trace(m):
    return np.trace(m, axis1=-2, axis2=-1)


def frobenius_norm(m):
    return np.sqrt(np.sum(np.abs(m) ** 2, axis=(-2, -1)))


def det3(m):
    a = np.asarray(m)
    return (
        a[..., 0, 0] * (a[..., 1, 1] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 1])
        - a[..., 0, 1] * (a[..., 1, 0] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 0])
        + a[..., 0, 2] * (a[..., 1, 0] * a[..., 2, 1] - a[..., 1, 1] * a[..., 2, 0])
    )


def adj3(m) -> np.ndarray:
    """Adjugate (transposed cofactor matrix), so that ``m @ adj3(m) == det3(m) * I``."""
    a = np.asarray(m)
    r0, r1, r2 = a[..., 0, :], a[..., 1, :], a[..., 2, :]
    cof = np.stack([np.cross(r1, r2), np.cross(r2, r0), np.cross(r0, r1)], axis=-2)
    return np.swapaxes(cof, -1, -2)


def char_coefficients(m):
    """Return (trace, sum of principal 2x2 minors, determinant) of ``m``."""
    tr = trace(m)
    pair = (tr * tr - trace(np.matmul(m, m))) / 2
    return tr, pair, det3(m)


def check_density(rho: np.ndarray, *, unit_trace: bool = True) -> None:
    herm = np.abs(rho - dagger(rho))
    if herm.size and herm.max() > HERMITIAN_TOL:
        raise NotHermitian(f"max |rho - rho^dagger| = {herm.max():.3e} exceeds {HERMITIAN_TOL:g}")
    if unit_trace:
        dev = np.abs(trace(rho) - 1.0)
        if np.size(dev) and np.max(dev) > TRACE_TOL:
            raise NotUnitTrace(f"|Tr rho - 1| = {np.max(dev):.3e} exceeds {TRACE_TOL:g}")


def _trig_eigvals(h: np.ndarray) -> np.ndarray:
    # Eigenvalues of Hermitian h, descending, via q + 2p cos(phi + 2k pi/3).
    d = np.real(np.diagonal(h, axis1=-2, axis2=-1))
    q = d.sum(axis=-1) / 3.0
    off = np.abs(h[..., 0, 1]) ** 2 + np.abs(h[..., 0, 2]) ** 2 + np.abs(h[..., 1, 2]) ** 2
    p = np.sqrt((np.sum((d - q[..., None]) ** 2, axis=-1) + 2.0 * off) / 6.0)
    safe_p = np.where(p > 0.0, p, 1.0)
    b = (h - q[..., None, None] * _EYE) / safe_p[..., None, None]
    r = np.clip(np.real(det3(b)) / 2.0, -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    l1 = q + 2.0 * p * np.cos(phi)
    l3 = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    l2 = 3.0 * q - l1 - l3
    return np.stack([l1, l2, l3], axis=-1)


def _polish(h: np.ndarray, lam: np.ndarray) -> np.ndarray:
    # Near a double eigenvalue the cosine formula inherits the sqrt(eps)
    # conditioning of the cubic's roots, although the matrix eigenvalues are
    # perfectly conditioned. Recompute from the matrix: the isolated eigenvalue
    # by a Rayleigh quotient on its adjugate eigenvector, the other two from
    # the 2x2 compression onto the orthogonal complement.
    top = (lam[..., 0] - lam[..., 1]) >= (lam[..., 1] - lam[..., 2])
    iso = np.where(top, lam[..., 0], lam[..., 2])
    a = adj3(h - iso[..., None, None] * _EYE)
    norms = np.linalg.norm(a, axis=-2)
    k = np.argmax(norms, axis=-1)
    col = np.take_along_axis(a, k[..., None, None], axis=-1)[..., 0]
    cn = np.take_along_axis(norms, k[..., None], axis=-1)[..., 0]
    ok = cn > ADJUGATE_ZERO_TOL
    v = col / np.where(ok, cn, 1.0)[..., None]

    e = np.zeros_like(v)
    np.put_along_axis(e, np.argmin(np.abs(v), axis=-1)[..., None], 1.0, axis=-1)
    u1 = np.conj(np.cross(v, e))
    u1 /= np.where(ok, np.linalg.norm(u1, axis=-1), 1.0)[..., None]
    u2 = np.conj(np.cross(v, u1))
    u2 /= np.where(ok, np.linalg.norm(u2, axis=-1), 1.0)[..., None]

    def quad(x, y):
        return np.einsum("...i,...ij,...j->...", np.conj(x), h, y)

    iso_new = np.real(quad(v, v))
    p11, p22, p12 = np.real(quad(u1, u1)), np.real(quad(u2, u2)), quad(u1, u2)
    mid = (p11 + p22) / 2.0
    half = np.hypot((p11 - p22) / 2.0, np.abs(p12))
    polished = np.where(
        top[..., None],
        np.stack([iso_new, mid + half, mid - half], axis=-1),
        np.stack([mid + half, mid - half, iso_new], axis=-1),
    )
    return np.where(ok[..., None], -np.sort(-polished, axis=-1), lam)


def eigvalsh3(rho, det=None) -> np.ndarray:
    """Spectra of (stacks of) density matrices, shape ``(..., 3)``, descending.

    The cosine solution of the characteristic cubic is followed by one fixed
    polishing step against the matrix itself, so eigenvalues stay accurate to
    about machine epsilon even when two of them (nearly) coincide.

    ``det`` optionally supplies an accurately known ``det(rho)`` (for example
    ``|det C|**2`` when ``rho = C C^dagger``). The smallest eigenvalue is then
    recomputed as ``det / (l1 * l2)``, which keeps full relative precision for
    nearly rank-deficient matrices where the other routes are only accurate
    to about machine epsilon in absolute terms.
    """
    rho = as_matrix3(rho)
    check_density(rho)
    lam = _polish(rho, _trig_eigvals(rho))
    low = lam.min(axis=-1)
    if np.size(low) and low.min() < -PSD_TOL:
        raise NotPSD(f"eigenvalue {low.min():.3e} is below -{PSD_TOL:g}")
    lam = np.where(lam < 0.0, 0.0, lam)
    if det is not None:
        det = np.real(np.asarray(det, dtype=np.complex128))
        top = lam[..., 0] * lam[..., 1]
        refined = np.divide(det, top, out=np.zeros_like(top), where=top > 0.0)
        lam[..., 2] = np.where(top > 0.0, np.clip(refined, 0.0, lam[..., 1]), lam[..., 2])
    return lam


def eig_hermitian(rho, det=None) -> Spectrum:
    rho = as_matrix3(rho)
    if rho.shape != (3, 3):
        raise ValueError("eig_hermitian takes a single matrix; use eigvalsh3 for stacks")
    return Spectrum.from_values(eigvalsh3(rho, det=det))


def adjugate_eigenvector(rho, lam: float) -> np.ndarray:
    """Unit eigenvector for a simple eigenvalue from the largest column of adj(rho - lam I).

    Raises DegenerateEigenvalue when every column is below ``1e-12`` in norm,
    which happens whenever ``lam`` has multiplicity two or more.
    """
    rho = as_matrix3(rho)
    a = adj3(rho - lam * _EYE)
    norms = np.linalg.norm(a, axis=0)
    k = int(np.argmax(norms))
    if norms[k] < ADJUGATE_ZERO_TOL:
        raise DegenerateEigenvalue(f"adj(rho - {lam!r} I) vanishes; eigenvalue is repeated")
    v = a[:, k] / norms[k]
    residual = np.linalg.norm(rho @ v - lam * v)
    if residual > EIGVEC_TOL:
        raise NotAnEigenvalue(f"{lam!r} is not an isolated eigenvalue (residual {residual:.2e})")
    return v


def nullspace_eigenvector(rho, lam: float) -> np.ndarray:
    """Right singular vector of ``rho - lam I`` with the smallest singular value."""
    rho = as_matrix3(rho)
    _, _, vh = np.linalg.svd(rho - lam * _EYE)
    v = np.conj(vh[-1])
    residual = np.linalg.norm(rho @ v - lam * v)
    if residual > EIGVEC_TOL:
        raise NotAnEigenvalue(f"{lam!r} is not an eigenvalue (residual {residual:.2e})")
    return v


def eigenvector(rho, lam: float) -> np.ndarray:
    try:
        return adjugate_eigenvector(rho, lam)
    except (DegenerateEigenvalue, NotAnEigenvalue):
        return nullspace_eigenvector(rho, lam)
