"""Lattice arithmetic structure of random vectors.

The central objects: distance from a vector to the integer lattice, the
expected squared lattice distance of Schur products against symmetrized
entry laws, and the induced randomized log-least-common-denominator
(the norm threshold past which some direction in a subspace produces
lattice-correlated projections).  A small Levy concentration estimator and
the matching small-ball upper bound evaluator round out the toolkit.

Expectations decompose per coordinate, so laws with finite symmetrized
support are handled by exact enumeration and the rest by Monte Carlo.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .ensembles import DistributionLaw, EntryProfile
from .errors import ResourceLimitError

__all__ = [
    "RLCDParams",
    "RLCDEstimate",
    "dist_to_lattice",
    "log_plus",
    "schur_product",
    "expected_sq_dist_to_lattice",
    "matrix_lattice_distance",
    "rlcd_estimate",
    "levy_estimate",
    "esseen_bound_eval",
    "count_lattice_points",
]


def dist_to_lattice(y: np.ndarray) -> float:
    """Euclidean distance from y to the integer lattice (per-coordinate rounding)."""
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("expected finite entries")
    return float(np.linalg.norm(y - np.round(y)))


def schur_product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Coordinate-wise product of two equal-length vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    return x * y


def _residual_sq(z: np.ndarray) -> np.ndarray:
    r = z - np.round(z)
    return r * r


def expected_sq_dist_to_lattice(y: np.ndarray, laws, mc_trials: int,
                                stream: np.random.Generator | None = None) -> float:
    """E dist^2(y * xi_bar, Z^n) for xi_bar with independent symmetrized entries.

    ``laws[i]`` is the (unsymmetrized) law of coordinate i.  The squared
    distance splits into per-coordinate terms, so each coordinate with a
    finitely supported symmetrized law is summed exactly; the others are
    estimated with ``mc_trials`` Monte Carlo draws from the stream.
    """
    y = np.asarray(y, dtype=float)
    laws = list(laws)
    if y.size != len(laws):
        raise ValueError(f"vector length {y.size} does not match {len(laws)} laws")
    groups: dict[DistributionLaw, list[int]] = {}
    for i, law in enumerate(laws):
        groups.setdefault(law, []).append(i)
    total = 0.0
    for law, idx in groups.items():
        support = law.symmetrized_support()
        coords = y[idx]
        if support is not None:
            atoms, weights = support
            prods = coords[:, None] * np.asarray(atoms)[None, :]
            total += float(np.sum(_residual_sq(prods) @ np.asarray(weights)))
        else:
            if stream is None:
                raise ValueError("a law without finite symmetrized support needs a stream")
            draws = law.sample_symmetrized(stream, (mc_trials, len(idx)))
            total += float(np.sum(np.mean(_residual_sq(coords[None, :] * draws), axis=0)))
    return total


def matrix_lattice_distance(x: np.ndarray, profile: EntryProfile, mc_trials: int = 1000,
                            stream: np.random.Generator | None = None) -> float:
    """Lattice distance of x against a matrix profile: the best column wins.

    For each column j, computes E dist^2(x * symmetrized column j, Z^n) and
    returns the square root of the minimum over columns.
    """
    x = np.asarray(x, dtype=float)
    if x.size != profile.n_rows:
        raise ValueError(f"vector length {x.size} does not match profile rows {profile.n_rows}")
    best = min(expected_sq_dist_to_lattice(x, profile.column(j), mc_trials, stream)
               for j in range(profile.n_cols))
    return math.sqrt(max(best, 0.0))


def log_plus(v: float) -> float:
    """max(0, natural log)."""
    return max(0.0, math.log(v)) if v > 0.0 else 0.0


@dataclass(frozen=True)
class RLCDParams:
    """Search parameters for the log-least-common-denominator estimate."""

    L: float
    alpha: float
    radius_cap: float
    resolution: float
    mc_trials: int = 1000

    def __post_init__(self):
        if self.L <= 0.0:
            raise ValueError("L must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.radius_cap <= 0.0 or self.resolution <= 0.0:
            raise ValueError("radius_cap and resolution must be positive")
        if self.resolution >= self.radius_cap:
            raise ValueError("resolution must be smaller than radius_cap")
        if self.mc_trials < 100:
            raise ValueError("mc_trials must be at least 100")


@dataclass(frozen=True)
class RLCDEstimate:
    """Interval answer of the denominator search.

    ``lower`` is the largest norm exhaustively cleared at grid resolution,
    ``upper`` the smallest witness norm found (infinite when none), and
    ``witness`` the witnessing coefficient vector when one exists.  ``note``
    flags degenerate searches.
    """

    lower: float
    upper: float
    witness: np.ndarray | None = None
    note: str | None = None

    def __post_init__(self):
        if self.lower < 0.0 or self.lower > self.upper:
            raise ValueError("estimate interval must satisfy 0 <= lower <= upper")
        if (self.witness is None) != math.isinf(self.upper):
            raise ValueError("witness must be present exactly when upper is finite")


def rlcd_estimate(basis: np.ndarray, profile: EntryProfile, column_indices,
                  params: RLCDParams, stream: np.random.Generator,
                  n_directions: int = 32, trace: list | None = None) -> RLCDEstimate:
    """Interval estimate of the least coefficient norm producing lattice correlation.

    ``basis`` is an m x n matrix whose rows span the target (the m candidate
    directions' coordinates, or an orthonormal basis of a subspace, in which
    case coefficient norms equal vector norms).  A coefficient vector theta
    is a witness when, for y = basis^T theta, some profile column j in
    ``column_indices`` satisfies

        E dist^2(y * symmetrized column j, Z^n)  <  L^2 * log_plus(alpha |y| / L).

    The search walks spheres of radius floor, floor + resolution, ... up to
    radius_cap, where floor = L / (alpha * s_max(basis)) is the analytic
    threshold below which the right side vanishes.  On each sphere it tests
    signed axis directions plus ``n_directions`` random ones (none random
    when m = 1, where the axis pair is exhaustive).  When ``trace`` is a
    list, one (radius, lhs, rhs, witness_flag) row per radius is appended
    for the best direction seen at that radius.
    """
    v = np.asarray(basis, dtype=float)
    if v.ndim != 2:
        raise ValueError("basis must be a 2-d array (rows spanning the target)")
    m, n = v.shape
    if n != profile.n_rows:
        raise ValueError(f"basis columns {n} do not match profile rows {profile.n_rows}")
    cols = list(column_indices)
    if not cols or any(not 0 <= j < profile.n_cols for j in cols):
        raise ValueError("column_indices must be a non-empty subset of profile columns")
    svals = np.linalg.svd(v, compute_uv=False)
    if svals[-1] <= 1e-12 * svals[0]:
        raise ValueError("basis rows must be linearly independent")
    floor = params.L / (params.alpha * float(svals[0]))
    if params.radius_cap < floor:
        return RLCDEstimate(lower=params.radius_cap, upper=math.inf, witness=None,
                            note="search exhausted below analytic floor")

    if m == 1:
        fixed_dirs = np.array([[1.0], [-1.0]])
        n_random = 0
    else:
        fixed_dirs = np.concatenate([np.eye(m), -np.eye(m)])
        n_random = n_directions

    def lhs_of(y):
        return min(expected_sq_dist_to_lattice(y, profile.column(j), params.mc_trials, stream)
                   for j in cols)

    n_steps = int(math.floor((params.radius_cap - floor) / params.resolution))
    cleared = floor
    for step in range(n_steps + 1):
        radius = floor + step * params.resolution
        dirs = fixed_dirs
        if n_random:
            extra = stream.standard_normal((n_random, m))
            extra /= np.linalg.norm(extra, axis=1, keepdims=True)
            dirs = np.concatenate([fixed_dirs, extra])
        best = (math.inf, -math.inf, None)  # (lhs - rhs margin, rhs, theta)
        hit = None
        for u in dirs:
            theta = radius * u
            y = v.T @ theta
            rhs = params.L ** 2 * log_plus(params.alpha * float(np.linalg.norm(y)) / params.L)
            lhs = lhs_of(y)
            if lhs - rhs < best[0]:
                best = (lhs - rhs, rhs, theta)
            if lhs < rhs:
                hit = theta
                break
        if trace is not None:
            trace.append((radius, best[0] + best[1], best[1], hit is not None))
        if hit is not None:
            return RLCDEstimate(lower=cleared, upper=radius, witness=hit)
        cleared = radius
    return RLCDEstimate(lower=cleared, upper=math.inf, witness=None)


def levy_estimate(sampler, t: float, mc_trials: int, stream: np.random.Generator,
                  center_subsample: int = 32) -> tuple[float, float]:
    """Empirical concentration function: max probability mass of a radius-t ball.

    ``sampler(stream, count)`` must return a (count, m) array.  The supremum
    over ball centers is approximated by a finite menu: the origin, the
    componentwise median, and ``center_subsample`` of the observed points.
    Returns (probability, binomial standard error).
    """
    if t < 0.0:
        raise ValueError("t must be non-negative")
    pts = np.asarray(sampler(stream, mc_trials), dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    centers = [np.zeros(pts.shape[1]), np.median(pts, axis=0)]
    take = min(center_subsample, mc_trials)
    centers.extend(pts[stream.choice(mc_trials, size=take, replace=False)])
    best = 0.0
    for c in centers:
        mass = float(np.mean(np.linalg.norm(pts - c, axis=1) <= t))
        best = max(best, mass)
    return best, math.sqrt(best * (1.0 - best) / mc_trials)


def esseen_bound_eval(m: int, L: float, alpha: float, det_root: float,
                      rd: float, t: float, C: float) -> float:
    """Small-ball upper bound (C L / (alpha sqrt(m)))^m / det_root * (t + sqrt(m)/rd)^m."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if det_root <= 0.0:
        raise ValueError("det_root must be positive")
    shift = 0.0 if math.isinf(rd) else math.sqrt(m) / rd
    return (C * L / (alpha * math.sqrt(m))) ** m / det_root * (t + shift) ** m


def count_lattice_points(n: int, radius: float, c: float = 3.0) -> tuple[int, float]:
    """Exact count of integer points in the ball of the given radius, with its bound.

    Enumerates the integer box [-ceil(R), ceil(R)]^n and filters by norm;
    the companion value is the bound (2 + c R / sqrt(n))^n.  Dimensions
    above 4 or radii above 20 are refused (box enumeration blows up).
    """
    if not 1 <= n <= 4 or radius > 20.0:
        raise ResourceLimitError(f"enumeration limited to n <= 4 and radius <= 20, "
                                 f"got n={n}, radius={radius}")
    if radius < 0.0:
        raise ValueError("radius must be non-negative")
    top = math.ceil(radius)
    r2 = radius * radius
    count = sum(1 for pt in itertools.product(range(-top, top + 1), repeat=n)
                if sum(v * v for v in pt) <= r2)
    bound = (2.0 + c * radius / math.sqrt(n)) ** n
    return count, bound
