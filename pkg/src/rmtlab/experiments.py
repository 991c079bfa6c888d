"""Monte Carlo campaigns and exact oracles for rank and singular-value tails.

The heart of the module is a trial table: one row per sampled matrix with
its spectrum summary, rank at tolerance, and the seed that regenerates it.
All tail estimates are computed from trial tables, so different thresholds
(k values, epsilon values) share the same samples and the nesting of the
underlying events holds exactly in the estimates, not just in expectation.

Exact oracles at toy scale (sign-matrix enumeration with integer rank,
closed-form tensorization) anchor the Monte Carlo machinery.
"""

from __future__ import annotations

import itertools
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arithmetic import RLCDEstimate, RLCDParams, matrix_lattice_distance, rlcd_estimate
from .ensembles import DistributionLaw, EntryProfile, sample_matrix
from .errors import ResourceLimitError
from .sphere import almost_orthogonal_check, dist_to_sparse, sampled_span_incompressible

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "TRIAL_DTYPE",
    "KernelEventParams",
    "run_trials",
    "trial_record",
    "rank_tail_from_table",
    "singular_tail_from_table",
    "rank_tail_exact_rademacher",
    "rank_tail_mc",
    "singular_tail_mc",
    "tensorization_check",
    "norm_concentration_mc",
    "compressible_event_check",
    "kernel_tuple_event_check",
    "kernel_complement_basis",
    "kernel_rlcd_probe",
    "scaling_fit",
]

TRIAL_DTYPE = np.dtype([
    ("trial_index", np.int64),
    ("derived_seed", np.uint64),
    ("s_largest", np.float64),
    ("s_kth_smallest", np.float64),
    ("s_smallest", np.float64),
    ("rank_at_tol", np.int64),
    ("tol_used", np.float64),
    ("runtime", np.float64),
])

TAIL_DTYPE = np.dtype([
    ("epsilon", np.float64),
    ("estimate", np.float64),
    ("stderr", np.float64),
    ("bound", np.float64),
])

NORM_DTYPE = np.dtype([
    ("n", np.int64),
    ("op_exceed", np.float64),
    ("op_stderr", np.float64),
    ("hs_exceed", np.float64),
    ("hs_stderr", np.float64),
])


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo campaign: ensemble, thresholds, budget, seed.

    ``k`` indexes the k-th smallest singular value (k = 0 degenerates to the
    always-true rank event and is allowed for rank tails only).  ``tol`` is
    the numerical-rank cutoff; None means the scale-aware per-trial default.
    A small k relative to log(n) leaves the singular-value tail regime and
    triggers a warning, not an error.
    """

    profile: EntryProfile
    n: int
    k: int
    epsilon_grid: tuple[float, ...] = ()
    gamma: float = 0.25
    trials: int = 1
    master_seed: int = 0
    tol: float | None = None

    def __post_init__(self):
        if self.profile.n_rows != self.n or self.profile.n_cols != self.n:
            raise ValueError(f"profile shape {self.profile.n_rows}x{self.profile.n_cols} "
                             f"does not match n = {self.n}")
        if not 0 <= self.k <= self.n:
            raise ValueError(f"k must lie in [0, {self.n}], got {self.k}")
        eps = tuple(float(e) for e in self.epsilon_grid)
        if any(e < 0.0 for e in eps):
            raise ValueError("epsilon grid entries must be non-negative")
        if any(eps[i] > eps[i + 1] for i in range(len(eps) - 1)):
            raise ValueError("epsilon grid must be sorted ascending")
        object.__setattr__(self, "epsilon_grid", eps)
        if not 0.0 < self.gamma < 0.5:
            raise ValueError(f"gamma must lie in (0, 1/2), got {self.gamma}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must fit in 64 bits")
        if self.tol is not None and self.tol <= 0.0:
            raise ValueError("tol must be positive when given")
        if 1 <= self.k < math.log(self.n):
            warnings.warn(f"k = {self.k} is below log(n) = {math.log(self.n):.2f}; "
                          "the singular-value tail regime assumes k >= log(n)",
                          stacklevel=2)


@dataclass(frozen=True)
class TrialRecord:
    """One row of a trial table, as a plain object."""

    trial_index: int
    derived_seed: int
    s_largest: float
    s_kth_smallest: float
    s_smallest: float
    rank_at_tol: int
    tol_used: float
    runtime: float


def trial_record(table: np.ndarray, i: int) -> TrialRecord:
    row = table[i]
    return TrialRecord(int(row["trial_index"]), int(row["derived_seed"]),
                       float(row["s_largest"]), float(row["s_kth_smallest"]),
                       float(row["s_smallest"]), int(row["rank_at_tol"]),
                       float(row["tol_used"]), float(row["runtime"]))


def derived_seed(master_seed: int, trial_index: int) -> int:
    """The per-trial seed: a pure function of (master seed, trial index)."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index,))
    return int(ss.generate_state(1, np.uint64)[0])


def _trial_stream(master_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index,)))


def run_trials(config: ExperimentConfig, n_threads: int = 1,
               chunk_size: int = 4096) -> np.ndarray:
    """Sample config.trials matrices and record their spectrum summaries.

    Each trial gets its own generator derived from (master_seed, index), so
    the table is identical for any thread count or chunk size; threads only
    partition the index range.  SVDs run batched per chunk.
    """
    n, k = config.n, config.k
    out = np.empty(config.trials, TRIAL_DTYPE)

    def do_chunk(start: int, stop: int) -> None:
        t0 = time.perf_counter()
        count = stop - start
        mats = np.empty((count, n, n))
        for i in range(count):
            mats[i] = sample_matrix(config.profile, _trial_stream(config.master_seed, start + i))
        svals = np.linalg.svd(mats, compute_uv=False)
        per_trial = (time.perf_counter() - t0) / count
        tol = (np.full(count, config.tol) if config.tol is not None
               else n * np.finfo(float).eps * svals[:, 0])
        chunk = out[start:stop]
        chunk["trial_index"] = np.arange(start, stop)
        chunk["derived_seed"] = [derived_seed(config.master_seed, j) for j in range(start, stop)]
        chunk["s_largest"] = svals[:, 0]
        chunk["s_kth_smallest"] = svals[:, n - k] if k >= 1 else np.nan
        chunk["s_smallest"] = svals[:, -1]
        chunk["rank_at_tol"] = np.sum(svals > tol[:, None], axis=1)
        chunk["tol_used"] = tol
        chunk["runtime"] = per_trial

    spans = [(s, min(s + chunk_size, config.trials))
             for s in range(0, config.trials, chunk_size)]
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(lambda span: do_chunk(*span), spans))
    else:
        for span in spans:
            do_chunk(*span)
    return out


def _binomial(hits: int, trials: int) -> tuple[float, float]:
    p = hits / trials
    return p, math.sqrt(p * (1.0 - p) / trials)


def rank_tail_from_table(table: np.ndarray, n: int, k: int) -> tuple[float, float]:
    """Fraction of recorded trials with rank at tolerance <= n - k."""
    hits = int(np.sum(table["rank_at_tol"] <= n - k))
    return _binomial(hits, table.size)


def singular_tail_from_table(table: np.ndarray, n: int, epsilon: float) -> tuple[float, float]:
    """Fraction of trials with the k-th smallest singular value <= max(eps/sqrt(n), tol).

    Clamping at the rank tolerance makes the epsilon = 0 column coincide
    exactly with the rank-tail event on the same table.
    """
    thresh = np.maximum(epsilon / math.sqrt(n), table["tol_used"])
    hits = int(np.sum(table["s_kth_smallest"] <= thresh))
    return _binomial(hits, table.size)


def rank_tail_mc(config: ExperimentConfig, n_threads: int = 1) -> tuple[float, float]:
    """Monte Carlo estimate of P(rank <= n - k) with binomial standard error."""
    table = run_trials(config, n_threads)
    return rank_tail_from_table(table, config.n, config.k)


def singular_tail_mc(config: ExperimentConfig, comparison_c: float = 1.0,
                     n_threads: int = 1, table: np.ndarray | None = None) -> np.ndarray:
    """Tail estimates over the epsilon grid, with the comparison curve attached.

    Returns a structured array over config.epsilon_grid with fields
    (epsilon, estimate, stderr, bound) where bound is the reference shape
    (C epsilon / k)^(gamma k^2) at caller-supplied C.  All epsilons share
    one trial table, so estimates are non-decreasing exactly.
    """
    if config.k < 1:
        raise ValueError("singular-value tails need k >= 1")
    if not config.epsilon_grid:
        raise ValueError("config.epsilon_grid is empty")
    if table is None:
        table = run_trials(config, n_threads)
    rows = np.empty(len(config.epsilon_grid), TAIL_DTYPE)
    for i, eps in enumerate(config.epsilon_grid):
        est, se = singular_tail_from_table(table, config.n, eps)
        bound = (comparison_c * eps / config.k) ** (config.gamma * config.k ** 2)
        rows[i] = (eps, est, se, bound)
    return rows


def _exact_rank(mat: list) -> int:
    """Exact rank of a small integer matrix by fraction elimination."""
    m = [[Fraction(v) for v in row] for row in mat]
    n_rows = len(m)
    n_cols = len(m[0])
    rank = 0
    for col in range(n_cols):
        piv = next((r for r in range(rank, n_rows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        lead = m[rank][col]
        for r in range(rank + 1, n_rows):
            if m[r][col]:
                scale = m[r][col] / lead
                m[r] = [a - scale * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == n_rows:
            break
    return rank


def rank_tail_exact_rademacher(n: int, k: int) -> Fraction:
    """Exact P(rank <= n - k) for the n x n sign ensemble, by full enumeration.

    Walks all 2^(n^2) sign matrices and computes exact integer rank, so the
    answer is a rational number.  Refuses n > 4.
    """
    if n > 4:
        raise ResourceLimitError(f"enumeration of 2^({n}^2) sign matrices is infeasible")
    if n < 1 or not 0 <= k <= n:
        raise ValueError("need n >= 1 and 0 <= k <= n")
    total = 2 ** (n * n)
    hits = 0
    for bits in itertools.product((1, -1), repeat=n * n):
        mat = [bits[i * n:(i + 1) * n] for i in range(n)]
        if _exact_rank(mat) <= n - k:
            hits += 1
    return Fraction(hits, total)


def tensorization_check(n: int, t: float, trials: int = 100_000,
                        stream: np.random.Generator | None = None) -> tuple[float, float]:
    """P(mean of n uniform[0,1] variables <= t) against the product bound (e t)^n.

    The probability is the exact simplex volume (n t)^n / n! when n t <= 1
    and a Monte Carlo estimate otherwise.  Returns (probability, bound).
    """
    if not 1 <= n <= 20:
        raise ValueError(f"n must lie in [1, 20], got {n}")
    if not 0.0 < t <= 1.0:
        raise ValueError(f"t must lie in (0, 1], got {t}")
    if n * t <= 1.0:
        prob = (n * t) ** n / math.factorial(n)
    else:
        rng = np.random.default_rng(0) if stream is None else stream
        sums = rng.random((trials, n)).sum(axis=1)
        prob = float(np.mean(sums <= n * t))
    return prob, (math.e * t) ** n


def norm_concentration_mc(law: DistributionLaw, n_grid, trials: int,
                          stream: np.random.Generator, c_op: float = 3.0,
                          c_hs: float = 1.0) -> np.ndarray:
    """Exceedance frequencies of operator and Hilbert-Schmidt norm thresholds.

    For each n in the grid, samples ``trials`` homogeneous n x n matrices and
    records the empirical P(op norm >= c_op sqrt(n)) and P(HS norm >= 2 c_hs n).
    The operator-norm statement assumes bounded entries, so unbounded laws
    are refused.
    """
    if math.isinf(law.support_bound()):
        raise ValueError("the operator-norm check needs a bounded entry law")
    rows = np.empty(len(list(n_grid)), NORM_DTYPE)
    for i, n in enumerate(n_grid):
        profile = EntryProfile.homogeneous(n, n, law, max(law.declared_psi2, 1.0))
        mats = np.stack([sample_matrix(profile, stream) for _ in range(trials)])
        svals = np.linalg.svd(mats, compute_uv=False)
        op_hits = int(np.sum(svals[:, 0] >= c_op * math.sqrt(n)))
        hs = np.sqrt(np.sum(mats * mats, axis=(1, 2)))
        hs_hits = int(np.sum(hs >= 2.0 * c_hs * n))
        p_op, se_op = _binomial(op_hits, trials)
        p_hs, se_hs = _binomial(hs_hits, trials)
        rows[i] = (n, p_op, se_op, p_hs, se_hs)
    return rows


def compressible_event_check(b_matrix: np.ndarray, x_tuple: np.ndarray, tau: float) -> bool:
    """Whether a unit tuple is almost orthogonal, compressible, and B-contracted.

    True iff the columns form a (1/4)-almost orthogonal system, each sits
    within tau^4 of the (tau^2)-sparse set, and every image norm |B x_j| is
    at most tau sqrt(n).
    """
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    x = np.asarray(x_tuple, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    norms = np.linalg.norm(x, axis=0)
    if np.any(np.abs(norms - 1.0) > 1e-8):
        raise ValueError("expected unit columns")
    ok, _, _ = almost_orthogonal_check(x, 0.25)
    if not ok:
        return False
    if any(dist_to_sparse(x[:, j], tau ** 2) > tau ** 4 for j in range(x.shape[1])):
        return False
    b = np.asarray(b_matrix, dtype=float)
    images = np.linalg.norm(b @ x, axis=0)
    return bool(np.all(images <= tau * math.sqrt(x.shape[0])))


@dataclass(frozen=True)
class KernelEventParams:
    """Parameters of the kernel-tuple event: spread level, lattice radius, scales."""

    tau: float
    rho: float
    r: float
    L: float

    def __post_init__(self):
        for name in ("tau", "rho"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if self.r <= 0.0 or self.L <= 0.0:
            raise ValueError("r and L must be positive")


def kernel_tuple_event_check(v_tuple: np.ndarray, b_matrix: np.ndarray,
                             a_profile: EntryProfile, params: KernelEventParams,
                             stream: np.random.Generator, n_span_samples: int = 1000,
                             n_annulus_samples: int = 1000,
                             mc_trials: int = 1000) -> tuple[bool, dict]:
    """The five-condition event for a tuple in the kernel of B.

    Conditions: norms inside [2 r sqrt(n), exp(rho^2 n / (4 L^2))]; sampled
    span incompressibility at (tau^2, tau^4); (1/8)-almost orthogonality;
    per-vector lattice distance at most rho sqrt(n); and the annulus
    condition that combinations V theta with |theta| <= 1/(20 sqrt(l)) and
    |V theta| >= 2 r sqrt(n) keep lattice distance above rho sqrt(n)
    (sampled).  Kernel membership is a checked precondition, not a flag.
    Returns (all true, per-condition flag dict).
    """
    v = np.asarray(v_tuple, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    n, l = v.shape
    b = np.asarray(b_matrix, dtype=float)
    if b.shape[1] != n:
        raise ValueError(f"b_matrix must have {n} columns")
    b_top = float(np.linalg.svd(b, compute_uv=False)[0]) if b.size else 0.0
    col_norms = np.linalg.norm(v, axis=0)
    kernel_residual = np.linalg.norm(b @ v, axis=0)
    if np.any(kernel_residual > 1e-8 * np.maximum(1.0, b_top * col_norms)):
        raise ValueError("tuple is not in the kernel of B within 1e-8")

    sqrt_n = math.sqrt(n)
    big_r = math.exp(params.rho ** 2 * n / (4.0 * params.L ** 2))
    flags = {}
    flags["norm_window"] = bool(np.all(col_norms >= 2.0 * params.r * sqrt_n)
                                and np.all(col_norms <= big_r))
    span_ok, _ = sampled_span_incompressible(v, params.tau ** 2, params.tau ** 4,
                                             stream, n_span_samples)
    flags["span_incomp"] = span_ok
    orth_ok, _, _ = almost_orthogonal_check(v, 0.125)
    flags["almost_orth"] = orth_ok
    flags["lattice_dist"] = all(
        matrix_lattice_distance(v[:, j], a_profile, mc_trials, stream) <= params.rho * sqrt_n
        for j in range(l))

    ball_radius = 1.0 / (20.0 * math.sqrt(l))
    raw = stream.standard_normal((l, n_annulus_samples))
    raw /= np.linalg.norm(raw, axis=0)
    radii = ball_radius * stream.random(n_annulus_samples) ** (1.0 / l)
    images = v @ (raw * radii)
    keep = np.linalg.norm(images, axis=0) >= 2.0 * params.r * sqrt_n
    annulus_ok = True
    for idx in np.flatnonzero(keep):
        if matrix_lattice_distance(images[:, idx], a_profile, mc_trials,
                                   stream) <= params.rho * sqrt_n:
            annulus_ok = False
            break
    flags["annulus"] = annulus_ok
    return all(flags.values()), flags


def kernel_complement_basis(a_sample: np.ndarray, column_subset, dim: int) -> np.ndarray:
    """Orthonormal basis (columns) of a dim-dimensional piece of span(selected columns)^perp.

    Takes the trailing left singular directions of the selected columns, so
    the result spans directions orthogonal to all of them.  Fails when the
    orthogonal complement is smaller than ``dim``.
    """
    a = np.asarray(a_sample, dtype=float)
    cols = a[:, list(column_subset)]
    u, s, _ = np.linalg.svd(cols, full_matrices=True)
    rank = int(np.sum(s > max(cols.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)))
    avail = a.shape[0] - rank
    if avail < dim:
        raise ValueError(f"degenerate instance: complement dimension {avail} < {dim}")
    return u[:, a.shape[0] - dim:]


def kernel_rlcd_probe(a_sample: np.ndarray, a_profile: EntryProfile, column_subset,
                      params: RLCDParams, stream: np.random.Generator,
                      dim: int | None = None, n_directions: int = 32) -> RLCDEstimate:
    """Denominator estimate on a half-k-dimensional slice of a column complement.

    ``column_subset`` selects n - k columns of the sample; the probe spans
    ceil(k/2) trailing complement directions (or ``dim`` when given) and runs
    the denominator search against the laws of the remaining columns.
    """
    a = np.asarray(a_sample, dtype=float)
    n = a.shape[0]
    subset = sorted(set(int(j) for j in column_subset))
    k = n - len(subset)
    if k < 1:
        raise ValueError("column subset leaves no complement directions")
    if dim is None:
        dim = (k + 1) // 2
    basis = kernel_complement_basis(a, subset, dim)
    remaining = [j for j in range(a_profile.n_cols) if j not in set(subset)]
    return rlcd_estimate(basis.T, a_profile, remaining, params, stream,
                         n_directions=n_directions)


def scaling_fit(results) -> tuple[float, np.ndarray]:
    """Least-squares slope of -log p against k*n through the origin.

    ``results`` is a sequence of (n, k, probability) triples.  Probabilities
    outside (0, 1) have no usable log and are dropped with a warning; fewer
    than two usable points is a domain error.  Returns (slope, residuals of
    the usable points in input order).
    """
    xs, ys = [], []
    dropped = 0
    for n, k, p in results:
        if not 0.0 < p < 1.0:
            dropped += 1
            continue
        xs.append(float(k) * float(n))
        ys.append(-math.log(p))
    if dropped:
        warnings.warn(f"scaling_fit dropped {dropped} point(s) with probability "
                      "outside (0, 1)", stacklevel=2)
    if len(xs) < 2:
        raise ValueError("scaling_fit needs at least 2 usable points")
    x = np.asarray(xs)
    y = np.asarray(ys)
    c_hat = float(np.dot(x, y) / np.dot(x, x))
    return c_hat, y - c_hat * x
