"""Simplex geometry of sign-bit joint distributions under a jammer energy budget.

The achievable joint distributions q(u, v) of the binarized quadratures form
a curve inside the triangle spanned by the perfectly-correlated distribution
q_c and the two one-sided product distributions q_0, q_1. This module
computes barycentric coordinates in that triangle, membership in its shrunken
version, and the containment margin delta* for a swept family of Gaussian
jammer states.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

from .bivariate import (
    BinaryJointDist,
    binarized_correlation,
    correlation_coefficient,
    homodyne_xx,
    mutual_information_bits,
    quadrant_distribution,
)
from .gaussian import JammerGaussian, mix_tmsv_with_jammer

COORD_SUM_ATOL = 1e-10
MEMBERSHIP_ATOL = 1e-10
AFFINE_HULL_ATOL = 1e-8

__all__ = [
    "SimplexCoords",
    "EnergyBudget",
    "SweepPoint",
    "vertices",
    "from_barycentric",
    "barycentric",
    "in_delta_delta",
    "default_squeezing",
    "jammer_grid",
    "sweep_records",
    "correlation_set_sweep",
    "compute_delta_star",
    "sweep_to_csv",
    "CSV_COLUMNS",
]


@dataclass(frozen=True)
class SimplexCoords:
    """Barycentric coordinates (lambda_c, lambda_0, lambda_1); must sum to 1."""

    lambda_c: float
    lambda_0: float
    lambda_1: float

    def __post_init__(self):
        total = self.lambda_c + self.lambda_0 + self.lambda_1
        if abs(total - 1.0) > COORD_SUM_ATOL:
            raise ValueError(f"barycentric coordinates must sum to 1, got {total}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.lambda_c, self.lambda_0, self.lambda_1)

    def in_simplex(self, atol: float = MEMBERSHIP_ATOL) -> bool:
        return min(self.as_tuple()) >= -atol


@dataclass(frozen=True)
class EnergyBudget:
    """Mean photons per symbol allowed to each of sender and jammer."""

    alpha_sq: float

    def __post_init__(self):
        if self.alpha_sq < 0:
            raise ValueError(f"energy budget must be nonnegative, got {self.alpha_sq}")

    @property
    def alpha(self) -> float:
        return math.sqrt(self.alpha_sq)


def vertices() -> tuple[BinaryJointDist, BinaryJointDist, BinaryJointDist]:
    """The triangle corners: common coin q_c, and uniform-u products q_0, q_1."""
    q_c = BinaryJointDist(0.5, 0.0, 0.0, 0.5)
    q_0 = BinaryJointDist(0.5, 0.0, 0.5, 0.0)
    q_1 = BinaryJointDist(0.0, 0.5, 0.0, 0.5)
    return q_c, q_0, q_1


def from_barycentric(coords: SimplexCoords) -> BinaryJointDist:
    """Mixture lambda_c q_c + lambda_0 q_0 + lambda_1 q_1 (coords must be in the simplex)."""
    lc, l0, l1 = coords.as_tuple()
    return BinaryJointDist(
        0.5 * (lc + l0), 0.5 * l1, 0.5 * l0, 0.5 * (lc + l1)
    )


def barycentric(q: BinaryJointDist) -> SimplexCoords:
    """Coordinates of q in the q_c/q_0/q_1 triangle.

    Defined only on the affine hull, where q00 + q01 = 1/2; there the
    decomposition is unique: lambda_0 = 2 q10, lambda_1 = 2 q01. Entries may
    be negative for q outside the triangle itself.
    """
    if abs(q.q00 + q.q01 - 0.5) > AFFINE_HULL_ATOL:
        raise ValueError(
            f"q is off the affine hull: q00 + q01 = {q.q00 + q.q01}, expected 1/2"
        )
    l0 = 2.0 * q.q10
    l1 = 2.0 * q.q01
    return SimplexCoords(1.0 - l0 - l1, l0, l1)


def _coords_in_shrunken(coords: SimplexCoords, delta: float, atol: float) -> bool:
    # Vertices q~_i = (1-delta) q_i + delta q_c, so mu_i = lambda_i / (1-delta).
    lc, l0, l1 = coords.as_tuple()
    if delta >= 1.0:
        return abs(l0) <= atol and abs(l1) <= atol
    scale = 1.0 - delta
    mu0 = l0 / scale
    mu1 = l1 / scale
    return mu0 >= -atol and mu1 >= -atol and 1.0 - mu0 - mu1 >= -atol


def in_delta_delta(q: BinaryJointDist, delta: float, atol: float = MEMBERSHIP_ATOL) -> bool:
    """Membership of q in the delta-shrunken triangle conv({q_c, q~_0, q~_1})."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    return _coords_in_shrunken(barycentric(q), delta, atol)


def default_squeezing(budget: EnergyBudget) -> float:
    """Squeezing that spends the whole sender budget: sinh^2 r = alpha^2."""
    return math.asinh(budget.alpha)


def jammer_grid(budget: EnergyBudget, resolution: int) -> list[JammerGaussian]:
    """Gaussian jammer states covering the feasible x-quadrature region.

    Only (A, a) influence the measured quadratures, so the sweep fixes b = 0,
    C = 0 and the minimal-energy conjugate variance B = 1/(4A); that spends
    nothing on the irrelevant quadrature and therefore over-covers the
    reachable region. The named states vacuum, coherent(+-alpha) and
    thermal(alpha^2) are appended explicitly so boundary anchors are always
    present; duplicates are dropped.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    e = budget.alpha_sq
    alpha = budget.alpha
    anchors = [
        JammerGaussian(A=0.5, B=0.5),
        JammerGaussian(A=0.5, B=0.5, a=math.sqrt(2.0) * alpha),
        JammerGaussian(A=0.5, B=0.5, a=-math.sqrt(2.0) * alpha),
        JammerGaussian(A=0.5 * (2.0 * e + 1.0), B=0.5 * (2.0 * e + 1.0)),
    ]
    points: list[JammerGaussian] = []
    seen: set = set()
    for tau in anchors:
        key = (round(tau.A, 12), round(tau.a, 12))
        if key not in seen:
            seen.add(key)
            points.append(tau)
    # A + 1/(4A) <= 2e + 1 bounds the variance range; the rest goes to a^2/2.
    g = 2.0 * e + 1.0
    disc = math.sqrt(max(g * g - 1.0, 0.0))
    a_lo, a_hi = 0.5 * (g - disc), 0.5 * (g + disc)
    for i in range(resolution):
        big_a = a_lo + (a_hi - a_lo) * i / (resolution - 1)
        spare = max(g - big_a - 0.25 / big_a, 0.0)
        a_max = math.sqrt(spare)
        for j in range(resolution):
            a = -a_max + 2.0 * a_max * j / (resolution - 1) if a_max > 0 else 0.0
            key = (round(big_a, 12), round(a, 12))
            if key not in seen:
                seen.add(key)
                points.append(JammerGaussian(A=big_a, B=0.25 / big_a, a=a))
            if a_max == 0.0:
                break
    return points


@dataclass(frozen=True)
class SweepPoint:
    """One jammer state with its induced sign-bit statistics."""

    jammer: JammerGaussian
    q: BinaryJointDist
    coords: SimplexCoords
    rho: float
    rho_bin: float
    mi_bits: float


def sweep_records(
    budget: EnergyBudget, r: float, eta: float = 0.5, resolution: int = 64
) -> list[SweepPoint]:
    """Full per-jammer records for the correlation-set sweep."""
    if r < 0:
        raise ValueError(f"squeezing must be nonnegative, got {r}")
    out = []
    for tau in jammer_grid(budget, resolution):
        biv = homodyne_xx(mix_tmsv_with_jammer(r, eta, tau))
        q = quadrant_distribution(biv)
        out.append(
            SweepPoint(
                jammer=tau,
                q=q,
                coords=barycentric(q),
                rho=correlation_coefficient(biv),
                rho_bin=binarized_correlation(q),
                mi_bits=mutual_information_bits(q),
            )
        )
    return out


def correlation_set_sweep(
    budget: EnergyBudget, r: float, eta: float = 0.5, resolution: int = 64
) -> list[tuple[JammerGaussian, BinaryJointDist]]:
    """Quadrant distribution reachable by each jammer state on the energy grid."""
    return [(p.jammer, p.q) for p in sweep_records(budget, r, eta, resolution)]


def _largest_delta(coords: Sequence[SimplexCoords]) -> float:
    """Largest delta keeping every point inside the shrunken triangle (bisection)."""
    if not coords:
        raise ValueError("sweep produced no points")

    def ok(delta: float) -> bool:
        return all(_coords_in_shrunken(c, delta, MEMBERSHIP_ATOL) for c in coords)

    if ok(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def compute_delta_star(budget: EnergyBudget, r: float, eta: float = 0.5) -> float:
    """Containment margin delta* of the swept correlation set.

    Bisects delta against the sweep as a membership oracle, then doubles the
    grid resolution until the answer moves by less than 1e-4. The margin is
    positive for r > 0 and shrinks as the jammer budget grows.
    """
    if budget.alpha_sq <= 0:
        raise ValueError("delta* needs a positive jammer budget")
    if r <= 0:
        raise ValueError("delta* needs positive squeezing")
    resolution = 16
    last = None
    while True:
        coords = [p.coords for p in sweep_records(budget, r, eta, resolution)]
        value = _largest_delta(coords)
        if last is not None and abs(value - last) < 1e-4:
            return value
        if resolution >= 512:  # sweep map is smooth; this is far past convergence
            return value
        last = value
        resolution *= 2


CSV_COLUMNS = (
    "A", "a", "q00", "q01", "q10", "q11",
    "lambda_c", "lambda_0", "lambda_1", "rho", "rho_bin", "mi_bits",
)


def sweep_to_csv(records: Iterable[SweepPoint], fh: TextIO) -> None:
    """Write sweep records as CSV with the documented column set."""
    writer = csv.writer(fh)
    writer.writerow(CSV_COLUMNS)
    for p in records:
        writer.writerow(
            [
                repr(p.jammer.A), repr(p.jammer.a),
                repr(p.q.q00), repr(p.q.q01), repr(p.q.q10), repr(p.q.q11),
                repr(p.coords.lambda_c), repr(p.coords.lambda_0), repr(p.coords.lambda_1),
                repr(p.rho), repr(p.rho_bin), repr(p.mi_bits),
            ]
        )
