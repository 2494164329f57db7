"""Monte Carlo audit of the (C_I, G) region and the erasure complementarity bound.

Sampled states are held column-wise in a ``Scatter``; ``run_audit`` reduces a
scatter plus an erasure parameter grid to an ``AuditReport``. Inequalities
that are claimed but not guaranteed are reported as satisfied fractions with
their extreme cases. Only identity residuals (quantities computed along two
independent routes) can fail an audit.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import erasure, invariants, mat3, rng, states
from .exceptions import EmptyInput
from .invariants import InvariantSet, Region
from .mat3 import Spectrum

VIOLATION_TOL = 1e-10
IDENTITY_TOL = 1e-10
RANK2_G_TOL = 1e-10

CLAIMS = ("eq15", "eq15_maclaurin", "eq16_printed")
RESIDUALS = ("det", "det_coeff", "c_i", "cubic", "discriminant")


@dataclass(frozen=True)
class SampleRecord:
    index: int
    spectrum: Spectrum
    inv: InvariantSet
    rank_label: int
    membership: Region
    identity_residual: float
    seed: Optional[int] = None


class Scatter(Sequence):
    """Column-oriented batch of analysed states; ``scatter[i]`` is a ``SampleRecord``."""

    def __init__(self, index, lam, residuals: dict, seed: Optional[int] = None, tol: float = VIOLATION_TOL):
        self.seed = seed
        self.tol = tol
        self.index = np.asarray(index, dtype=np.int64)
        self.lam = np.asarray(lam, dtype=np.float64).reshape(-1, 3)
        self.residuals = {k: np.asarray(residuals[k], dtype=np.float64) for k in RESIDUALS}
        self.s1, self.s2, self.s3 = invariants.symmetric_polynomials(self.lam)
        self.c_i = invariants.concurrence(self.s2)
        self.g = invariants.g_invariant(self.s3)
        self.discriminant = invariants.discriminant(self.s2, self.s3)
        self.membership = invariants.classify(self.c_i, self.g, tol)
        self.rank_label = np.where(self.g <= RANK2_G_TOL, 2, 3)

    @classmethod
    def from_coefficients(cls, coeff, seed: Optional[int] = None, index=None,
                          tol: float = VIOLATION_TOL) -> "Scatter":
        c = mat3.as_matrix3(coeff).reshape(-1, 3, 3)
        rho = states.reduced_density(c)
        det_c2 = np.abs(mat3.det3(c)) ** 2
        lam = mat3.eigvalsh3(rho, det=det_c2)
        tr, pair, det_rho = (np.real(x) for x in mat3.char_coefficients(rho))
        s1, s2, s3 = invariants.symmetric_polynomials(lam)
        residuals = {
            "det": np.abs(det_rho - s3),
            "det_coeff": np.abs(det_rho - det_c2),
            "c_i": np.abs(invariants.concurrence_from_purity(rho) - invariants.concurrence(s2)),
            "cubic": invariants.cubic_residuals(lam, tr, pair, det_rho).max(axis=-1, initial=0.0),
            "discriminant": np.abs(invariants.discriminant(s2, s3) - invariants.squared_gap_product(lam)),
        }
        if index is None:
            index = np.arange(len(c))
        return cls(index, lam, residuals, seed=seed, tol=tol)

    @classmethod
    def from_states(cls, states_, tol: float = VIOLATION_TOL) -> "Scatter":
        coeff = np.array([s.coeff for s in states_], dtype=np.complex128).reshape(-1, 3, 3)
        return cls.from_coefficients(coeff, tol=tol)

    def identity_residual(self) -> np.ndarray:
        return np.max(np.stack([self.residuals[k] for k in RESIDUALS]), axis=0, initial=0.0)

    def __len__(self) -> int:
        return len(self.index)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Scatter(
                self.index[i], self.lam[i], {k: v[i] for k, v in self.residuals.items()},
                seed=self.seed, tol=self.tol,
            )
        i = range(len(self))[i]
        inv = InvariantSet(
            s1=float(self.s1[i]), s2=float(self.s2[i]), s3=float(self.s3[i]),
            c_i=float(self.c_i[i]), g=float(self.g[i]),
            discriminant=float(self.discriminant[i]),
            physical=bool(self.discriminant[i] >= -self.tol),
        )
        return SampleRecord(
            index=int(self.index[i]),
            spectrum=Spectrum(*(float(x) for x in self.lam[i])),
            inv=inv,
            rank_label=int(self.rank_label[i]),
            membership=Region(str(self.membership[i])),
            identity_residual=float(self.identity_residual()[i]),
            seed=self.seed,
        )

    def rows(self):
        """Scatter CSV rows, matching ``SCATTER_HEADER``."""
        for k in range(len(self)):
            l1, l2, l3 = self.lam[k]
            yield (int(self.index[k]), l1, l2, l3, self.s2[k], self.s3[k], self.c_i[k], self.g[k],
                   self.discriminant[k], str(self.membership[k]), int(self.rank_label[k]))


SCATTER_HEADER = ("index", "l1", "l2", "l3", "s2", "s3", "c_i", "g", "discriminant", "membership", "rank_label")


def run_scatter(spec: states.SampleSpec, tol: float = VIOLATION_TOL) -> Scatter:
    """Sample ``spec.count`` states and analyse them; record order matches draw order."""
    return Scatter.from_coefficients(states.haar_coefficients(spec), seed=spec.seed, tol=tol)


@dataclass(frozen=True)
class ErasureGrid:
    """Pivot-family sweep over ``draws`` random (c, t) pairs at ``steps`` values of tau.

    With ``include_symmetric`` the uniform-amplitude, lossless state at the
    symmetric erasure point (tau = 1/3) is evaluated as well.
    """

    steps: int = 11
    draws: int = 50
    seed: int = 0
    include_symmetric: bool = True

    def __post_init__(self):
        if self.steps < 2:
            raise ValueError(f"steps must be at least 2, got {self.steps}")
        if self.draws < 0:
            raise ValueError(f"draws must be non-negative, got {self.draws}")
        rng.check_seed(self.seed)

    def marked_states(self) -> list[tuple[int, erasure.MarkedState]]:
        c = rng.complex_normals(self.seed, rng.STREAM_ERASURE, 0, self.draws, 3)
        t = rng.uniforms(self.seed, rng.STREAM_TRANSMIT, 0, self.draws, 3)
        out = [(k, erasure.MarkedState.create(c[k], t[k], normalize=True)) for k in range(self.draws)]
        return out

    def evaluations(self) -> list[tuple[int, float, erasure.ErasureReport]]:
        """(draw index, tau, report) triples; the symmetric reference has draw index -1."""
        out = []
        if self.include_symmetric:
            ms = erasure.MarkedState.create(np.ones(3), normalize=True)
            out.append((-1, 1.0 / 3.0, erasure.erase(ms, erasure.pivot_setup(ms.markers, 1.0 / 3.0))))
        for k, ms in self.marked_states():
            for tau, report in erasure.erasure_sweep(ms, "pivot", self.steps):
                out.append((k, tau, report))
        return out


@dataclass
class _Extreme:
    value: float
    key: int
    fingerprint: dict

    def better_low(self, other: "_Extreme") -> bool:
        return (self.value, self.key) < (other.value, other.key)

    def better_high(self, other: "_Extreme") -> bool:
        return (-self.value, self.key) < (-other.value, other.key)


@dataclass
class _Claim:
    evaluated: int = 0
    violations: int = 0
    low: Optional[_Extreme] = None
    high: Optional[_Extreme] = None

    def add(self, values: np.ndarray, keys: np.ndarray, fingerprint, tol: float) -> None:
        if len(values) == 0:
            return
        i_lo, i_hi = int(np.argmin(values)), int(np.argmax(values))
        other = _Claim(
            evaluated=len(values),
            violations=int(np.count_nonzero(values > tol)),
            low=_Extreme(float(values[i_lo]), int(keys[i_lo]), fingerprint(i_lo)),
            high=_Extreme(float(values[i_hi]), int(keys[i_hi]), fingerprint(i_hi)),
        )
        self.merge(other)

    def merge(self, other: "_Claim") -> "_Claim":
        self.evaluated += other.evaluated
        self.violations += other.violations
        if other.low is not None and (self.low is None or other.low.better_low(self.low)):
            self.low = other.low
        if other.high is not None and (self.high is None or other.high.better_high(self.high)):
            self.high = other.high
        return self

    def summary(self) -> dict:
        return {
            "evaluated": self.evaluated,
            "violations": self.violations,
            "min": None if self.low is None else {"value": self.low.value, **self.low.fingerprint},
            "max": None if self.high is None else {"value": self.high.value, **self.high.fingerprint},
        }


@dataclass
class AuditAccumulator:
    """Partial audit state; ``merge`` is associative so any partition gives the same report."""

    n_total: int = 0
    n_exterior: int = 0
    n_out_of_range: int = 0
    claims: dict = field(default_factory=lambda: {k: _Claim() for k in (*CLAIMS, "eq26", "discriminant")})
    residual_max: dict = field(default_factory=lambda: {k: 0.0 for k in RESIDUALS})

    def add_scatter(self, sc: Scatter, tol: float) -> "AuditAccumulator":
        self.n_total += len(sc)
        self.n_exterior += int(np.count_nonzero(sc.membership == Region.EXTERIOR.value))
        self.n_out_of_range += int(np.count_nonzero(sc.membership == Region.OUT_OF_RANGE.value))

        def fingerprint(i):
            return {"seed": sc.seed, "index": int(sc.index[i]), "lambda": [float(x) for x in sc.lam[i]]}

        values = {
            "eq15": 27.0 * sc.s3**2 - 4.0 * sc.s2**3,
            "eq15_maclaurin": 27.0 * sc.s3**2 - sc.s2**3,
            "eq16_printed": invariants.printed_region_lhs(sc.c_i, sc.g),
            # Sign flipped so that "violation" means discriminant < -tol.
            "discriminant": -sc.discriminant,
        }
        for name, v in values.items():
            self.claims[name].add(v, sc.index, fingerprint, tol)
        for k in RESIDUALS:
            if len(sc):
                self.residual_max[k] = max(self.residual_max[k], float(sc.residuals[k].max()))
        return self

    def add_erasure(self, evaluations, keys, seed: int, tol: float) -> "AuditAccumulator":
        usable = [(key, ev) for key, ev in zip(keys, evaluations) if ev[2].conditional]
        if not usable:
            return self
        values = np.array([ev[2].comp_lhs - 1.0 for _, ev in usable])

        def fingerprint(i):
            draw, tau, report = usable[i][1]
            spec = report.path_spectrum
            return {
                "seed": seed, "index": draw, "tau": tau,
                "lambda": None if spec is None else list(spec),
            }

        self.claims["eq26"].add(values, np.array([k for k, _ in usable]), fingerprint, tol)
        return self

    def merge(self, other: "AuditAccumulator") -> "AuditAccumulator":
        self.n_total += other.n_total
        self.n_exterior += other.n_exterior
        self.n_out_of_range += other.n_out_of_range
        for k, claim in other.claims.items():
            self.claims[k].merge(claim)
        for k, v in other.residual_max.items():
            self.residual_max[k] = max(self.residual_max[k], v)
        return self


def _fraction(claim: _Claim) -> Optional[float]:
    if claim.evaluated == 0:
        return None
    return (claim.evaluated - claim.violations) / claim.evaluated


def reference_points() -> dict:
    """Exact evaluations at fixed spectra and at the symmetric erasure point."""
    out = {}
    spectra = {
        "max_entangled": (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
        "rank2_uniform": (0.5, 0.5, 0.0),
        "product": (1.0, 0.0, 0.0),
    }
    for name, lam in spectra.items():
        inv = invariants.invariants_from_spectrum(Spectrum.from_values(lam))
        out[name] = {
            "lambda": list(lam),
            "c_i": inv.c_i,
            "g": inv.g,
            "membership": str(invariants.region_membership(inv.c_i, inv.g)),
            "eq15_lhs": 27.0 * inv.s3**2 - 4.0 * inv.s2**3,
            "eq15_maclaurin_lhs": 27.0 * inv.s3**2 - inv.s2**3,
            "eq16_printed_lhs": float(invariants.printed_region_lhs(inv.c_i, inv.g)),
        }
    ms = erasure.MarkedState.create(np.ones(3), normalize=True)
    rep = erasure.erase(ms, erasure.pivot_setup(ms.markers, 1.0 / 3.0))
    out["symmetric_erasure"] = {
        "p_e": rep.p_e,
        "pred_cond": rep.pred_cond,
        "vis_cond": rep.vis_cond,
        "g_t": rep.g_t,
        "comp_lhs": rep.comp_lhs,
        "eq26_satisfied": rep.comp_lhs <= 1.0 + VIOLATION_TOL,
    }
    return out


@dataclass(frozen=True)
class AuditReport:
    n_total: int
    n_exterior: int
    n_eq15_violations: int
    n_eq15_maclaurin_violations: int
    n_eq16_printed_violations: int
    n_eq26_violations: int
    n_eq26_evaluated: int
    max_abs_identity_residual: float
    eq15_satisfied_fraction: float
    eq15_maclaurin_satisfied_fraction: float
    eq16_printed_satisfied_fraction: float
    eq26_satisfied_fraction: Optional[float]
    extrema: dict
    identity_tol: float = IDENTITY_TOL

    @property
    def identities_ok(self) -> bool:
        return self.max_abs_identity_residual <= self.identity_tol

    def to_json_dict(self) -> dict:
        return {
            "n_total": self.n_total,
            "n_exterior": self.n_exterior,
            "eq15_satisfied_fraction": self.eq15_satisfied_fraction,
            "eq15_maclaurin_satisfied_fraction": self.eq15_maclaurin_satisfied_fraction,
            "eq16_printed_satisfied_fraction": self.eq16_printed_satisfied_fraction,
            "eq26_satisfied_fraction": self.eq26_satisfied_fraction,
            "max_abs_identity_residual": self.max_abs_identity_residual,
            "extrema": self.extrema,
        }

    def summary_line(self) -> str:
        eq26 = "n/a" if self.eq26_satisfied_fraction is None else f"{self.eq26_satisfied_fraction:.4f}"
        return (
            f"n={self.n_total} exterior={self.n_exterior} "
            f"eq15={self.eq15_satisfied_fraction:.4f} "
            f"maclaurin={self.eq15_maclaurin_satisfied_fraction:.4f} "
            f"eq16_printed={self.eq16_printed_satisfied_fraction:.4f} "
            f"eq26={eq26} "
            f"max_identity_residual={self.max_abs_identity_residual:.3e} "
            f"identities={'ok' if self.identities_ok else 'FAILED'}"
        )


def _split(n: int, parts: int) -> list[tuple[int, int]]:
    edges = np.linspace(0, n, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def finish(acc: AuditAccumulator, identity_tol: float = IDENTITY_TOL) -> AuditReport:
    claims = acc.claims
    extrema = {name: claims[name].summary() for name in (*CLAIMS, "eq26", "discriminant")}
    extrema["identity_residuals"] = dict(acc.residual_max)
    extrema["n_out_of_range"] = acc.n_out_of_range
    extrema["reference_points"] = reference_points()
    return AuditReport(
        n_total=acc.n_total,
        n_exterior=acc.n_exterior,
        n_eq15_violations=claims["eq15"].violations,
        n_eq15_maclaurin_violations=claims["eq15_maclaurin"].violations,
        n_eq16_printed_violations=claims["eq16_printed"].violations,
        n_eq26_violations=claims["eq26"].violations,
        n_eq26_evaluated=claims["eq26"].evaluated,
        max_abs_identity_residual=max(acc.residual_max.values()),
        eq15_satisfied_fraction=_fraction(claims["eq15"]),
        eq15_maclaurin_satisfied_fraction=_fraction(claims["eq15_maclaurin"]),
        eq16_printed_satisfied_fraction=_fraction(claims["eq16_printed"]),
        eq26_satisfied_fraction=_fraction(claims["eq26"]),
        extrema=extrema,
        identity_tol=identity_tol,
    )


def run_audit(records: Scatter, grid: Optional[ErasureGrid] = None, partitions: int = 1,
              tol: float = VIOLATION_TOL, identity_tol: float = IDENTITY_TOL) -> AuditReport:
    """Audit a scatter and an erasure grid; ``partitions`` only changes how work is split."""
    if len(records) == 0:
        raise EmptyInput("run_audit needs at least one record")
    if not isinstance(records, Scatter):
        raise TypeError("records must be a Scatter (see run_scatter / Scatter.from_states)")
    if partitions < 1:
        raise ValueError(f"partitions must be positive, got {partitions}")
    evaluations = grid.evaluations() if grid is not None else []
    keys = np.arange(len(evaluations))
    parts = []
    for (a, b), (c, d) in zip(_split(len(records), partitions), _split(len(evaluations), partitions)):
        acc = AuditAccumulator().add_scatter(records[a:b], tol)
        acc.add_erasure(evaluations[c:d], keys[c:d], grid.seed if grid else 0, tol)
        parts.append(acc)
    total = AuditAccumulator()
    for acc in parts:
        total.merge(acc)
    return finish(total, identity_tol)
