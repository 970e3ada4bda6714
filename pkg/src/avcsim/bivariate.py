"""Bivariate normal marginals of homodyne outcomes and their sign statistics.

The central object is the joint distribution of the two x-quadrature
homodyne records (sender's kept mode, receiver's port). Sign binarization
turns it into a distribution on {0,1}^2 whose quadrant probabilities only
need the standard normal CDF and the bivariate normal CDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian import GaussianState

# Absolute accuracy target for the bivariate CDF. The quadrature refines
# each panel until the two-level difference is below PANEL_TOL, so the
# accumulated error stays well under CDF_ATOL.
CDF_ATOL = 1e-10
PANEL_TOL = 1e-12
_MAX_PANELS = 4096

# Correlations this close to +/-1 are rejected rather than integrated.
RHO_LIMIT = 1.0 - 1e-9

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)

__all__ = [
    "BivariateGaussian",
    "BinaryJointDist",
    "std_normal_cdf",
    "bivariate_normal_pdf",
    "bivariate_normal_cdf",
    "homodyne_xx",
    "correlation_coefficient",
    "quadrant_distribution",
    "binarized_correlation",
    "arcsine_law",
    "mutual_information_bits",
]


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF via erfc, accurate in both tails."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def bivariate_normal_pdf(x: float, y: float, rho: float) -> float:
    """Standard bivariate normal density with correlation rho, |rho| < 1.

    This is also the derivative of the bivariate CDF with respect to rho
    (Plackett's formula), which is what the CDF quadrature integrates.
    """
    if not abs(rho) < 1.0:
        raise ValueError(f"correlation must satisfy |rho| < 1, got {rho}")
    om = 1.0 - rho * rho
    z = (x * x - 2.0 * rho * x * y + y * y) / (2.0 * om)
    return math.exp(-z) / (2.0 * math.pi * math.sqrt(om))


def _panel(x: float, y: float, a: float, b: float) -> float:
    # 20-node Gauss-Legendre on the rho-integral over [a, b]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    acc = 0.0
    for node, wt in zip(_GL_NODES, _GL_WEIGHTS):
        acc += wt * bivariate_normal_pdf(x, y, mid + half * node)
    return half * acc


def bivariate_normal_cdf(x: float, y: float, rho: float) -> float:
    """P(Z1 <= x, Z2 <= y) for standard normals with correlation rho.

    Computed as Phi(x)*Phi(y) plus the integral of the bivariate density
    over correlations [0, rho] (Plackett's formula), with adaptive
    Gauss-Legendre panels. Absolute error is bounded by CDF_ATOL.
    """
    if abs(rho) > RHO_LIMIT:
        raise ValueError(f"|rho| must be <= {RHO_LIMIT}, got {rho}")
    base = std_normal_cdf(x) * std_normal_cdf(y)
    if rho == 0.0:
        return base
    total = 0.0
    stack = [(0.0, rho)]
    panels = 0
    while stack:
        a, b = stack.pop()
        panels += 1
        if panels > _MAX_PANELS:
            raise ArithmeticError(
                f"bivariate CDF quadrature did not converge at ({x}, {y}, {rho})"
            )
        coarse = _panel(x, y, a, b)
        mid = 0.5 * (a + b)
        fine = _panel(x, y, a, mid) + _panel(x, y, mid, b)
        if abs(fine - coarse) <= PANEL_TOL or abs(b - a) < 1e-14:
            total += fine
        else:
            stack.append((a, mid))
            stack.append((mid, b))
    return min(1.0, max(0.0, base + total))


@dataclass(frozen=True)
class BivariateGaussian:
    """Mean (2,) and covariance (2, 2) of a nondegenerate bivariate normal."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if mean.shape != (2,) or cov.shape != (2, 2):
            raise ValueError("mean must be (2,) and cov (2, 2)")
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12:
            raise ValueError("covariance must be symmetric")
        if cov[0, 0] <= 0 or cov[1, 1] <= 0 or np.linalg.det(cov) <= 1e-14:
            raise ValueError("covariance must be positive definite (nondegenerate)")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)


def homodyne_xx(state: GaussianState) -> BivariateGaussian:
    """Joint distribution of the two x-quadrature homodyne records of a 2-mode state."""
    if state.n_modes != 2:
        raise ValueError(f"need a 2-mode state, got {state.n_modes} modes")
    idx = np.array([0, 2])
    return BivariateGaussian(state.mean[idx], state.cov[np.ix_(idx, idx)])


def correlation_coefficient(biv: BivariateGaussian) -> float:
    """Pearson correlation of the two components."""
    c = biv.cov
    return float(c[0, 1] / math.sqrt(c[0, 0] * c[1, 1]))


@dataclass(frozen=True)
class BinaryJointDist:
    """Joint distribution of two bits; q01 is P(first=0, second=1)."""

    q00: float
    q01: float
    q10: float
    q11: float

    def __post_init__(self):
        vals = (self.q00, self.q01, self.q10, self.q11)
        if min(vals) < -1e-9:
            raise ValueError(f"negative probability in {vals}")
        if abs(sum(vals) - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {sum(vals)}, not 1")
        # wipe quadrature-scale negatives
        for name, v in zip(("q00", "q01", "q10", "q11"), vals):
            object.__setattr__(self, name, max(0.0, float(v)))

    def as_array(self) -> np.ndarray:
        """2x2 array indexed [first_bit, second_bit]."""
        return np.array([[self.q00, self.q01], [self.q10, self.q11]])

    @property
    def marginal_first(self) -> float:
        return self.q10 + self.q11

    @property
    def marginal_second(self) -> float:
        return self.q01 + self.q11


def quadrant_distribution(biv: BivariateGaussian) -> BinaryJointDist:
    """Quadrant probabilities of the sign pair, bit = 1 for a nonnegative record.

    Requires the first component (the sender's record) to be centered; the
    second may carry the jammer displacement. With b = mean2/sigma2 and rho
    the correlation, q00 = Phi2(0, -b; rho) and the rest follow from the
    marginals, so q00 + q01 = 1/2 holds identically.
    """
    if abs(biv.mean[0]) > 1e-12:
        raise ValueError(f"first component must be centered, got mean {biv.mean[0]}")
    rho = correlation_coefficient(biv)
    b = float(biv.mean[1] / math.sqrt(biv.cov[1, 1]))
    q00 = bivariate_normal_cdf(0.0, -b, rho)
    phi_mb = std_normal_cdf(-b)
    return BinaryJointDist(q00, 0.5 - q00, phi_mb - q00, 0.5 - phi_mb + q00)


def binarized_correlation(q: BinaryJointDist) -> float:
    """Pearson correlation of the two bits."""
    pu, pv = q.marginal_first, q.marginal_second
    var_u, var_v = pu * (1.0 - pu), pv * (1.0 - pv)
    if var_u <= 0.0 or var_v <= 0.0:
        raise ValueError("binarized correlation undefined for a deterministic bit")
    return float((q.q11 - pu * pv) / math.sqrt(var_u * var_v))


def arcsine_law(rho: float) -> float:
    """Correlation of the sign pair of an unbiased bivariate normal: (2/pi) arcsin rho."""
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got {rho}")
    return 2.0 / math.pi * math.asin(rho)


def mutual_information_bits(q: BinaryJointDist) -> float:
    """Mutual information of the bit pair, in bits. Zero-probability cells are skipped."""
    pu, pv = q.marginal_first, q.marginal_second
    marg = {
        (0, 0): (1.0 - pu) * (1.0 - pv),
        (0, 1): (1.0 - pu) * pv,
        (1, 0): pu * (1.0 - pv),
        (1, 1): pu * pv,
    }
    cells = {(0, 0): q.q00, (0, 1): q.q01, (1, 0): q.q10, (1, 1): q.q11}
    total = 0.0
    for uv, p in cells.items():
        if p > 0.0:
            total += p * math.log2(p / marg[uv])
    return total
