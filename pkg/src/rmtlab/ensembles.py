"""Entry distributions for inhomogeneous random matrices.

Every law here has mean 0 and variance 1, together with a declared
subgaussian (psi2) norm.  A matrix ensemble is described by an
:class:`EntryProfile`: an (n_rows, n_cols) grid of laws, all of whose
declared psi2 norms sit below a user-supplied cap ``k_cap``.

All sampling goes through an explicit ``numpy.random.Generator``; equal
generator states produce bit-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EstimationError

__all__ = [
    "DistributionLaw",
    "EntryProfile",
    "atom_moments",
    "rademacher",
    "gaussian",
    "uniform_scaled",
    "sparse_bernoulli",
    "discrete",
    "parse_law_spec",
    "parse_profile_rules",
    "profile_from_rules",
    "sample_entry",
    "sample_symmetrized",
    "sample_matrix",
    "paley_zygmund_floor",
    "psi2_estimate",
]

_SQRT3 = math.sqrt(3.0)

#: psi2 of the +/-1 symmetric law: solves E exp((X/t)^2) = e^(1/t^2) = 2.
RADEMACHER_PSI2 = 1.0 / math.sqrt(math.log(2.0))

#: psi2 of the standard gaussian: E exp((X/t)^2) = (1 - 2/t^2)^(-1/2) = 2.
GAUSSIAN_PSI2 = math.sqrt(8.0 / 3.0)


def atom_moments(atoms, weights):
    """Exact (mean, variance) of a finitely supported law given as atoms/weights."""
    a = np.asarray(atoms, dtype=float)
    w = np.asarray(weights, dtype=float)
    mean = float(np.sum(w * a))
    var = float(np.sum(w * (a - mean) ** 2))
    return mean, var


def _finite_psi2(atoms, weights):
    """Smallest t with sum_j w_j exp((a_j/t)^2) <= 2, by bisection (exact law)."""
    a2 = np.asarray(atoms, dtype=float) ** 2
    w = np.asarray(weights, dtype=float)
    peak = float(np.max(a2))
    if peak == 0.0:
        return 0.0

    def avg(t):
        return float(np.sum(w * np.exp(a2 / (t * t))))

    lo = math.sqrt(peak / (math.log(2.0 / max(np.min(w[a2 == peak]), 1e-300)) + 1.0))
    hi = math.sqrt(peak / math.log(2.0)) + 1e-9  # bounded law: exp(peak/t^2) <= 2 suffices
    if avg(hi) > 2.0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if avg(mid) > 2.0:
            lo = mid
        else:
            hi = mid
    return hi


@lru_cache(maxsize=1)
def _uniform_psi2():
    """psi2 of the variance-1 uniform law, via Gauss-Legendre quadrature + bisection."""
    xs, ws = np.polynomial.legendre.leggauss(200)
    x = 0.5 * _SQRT3 * (xs + 1.0)  # nodes on [0, sqrt(3)], even integrand
    w = 0.5 * _SQRT3 * ws / _SQRT3  # density 1/(2*sqrt3), doubled for symmetry

    def avg(t):
        return float(np.sum(w * np.exp((x / t) ** 2)))

    lo, hi = 1.0, 3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if avg(mid) > 2.0:
            lo = mid
        else:
            hi = mid
    return hi + 1e-9


@dataclass(frozen=True)
class DistributionLaw:
    """A mean-0, variance-1 entry law with a declared psi2 norm.

    ``atoms``/``weights`` are set for finitely supported kinds and are the
    normalized support.  Use the module-level constructors rather than
    instantiating directly.
    """

    kind: str
    declared_psi2: float
    atoms: tuple[float, ...] | None = None
    weights: tuple[float, ...] | None = None
    param: float | None = None

    def __post_init__(self):
        if not (self.declared_psi2 >= 0.0 and math.isfinite(self.declared_psi2)):
            raise ValueError("declared_psi2 must be finite and non-negative")
        if self.atoms is not None:
            mean, var = atom_moments(self.atoms, self.weights)
            if abs(mean) > 1e-12 or abs(var - 1.0) > 1e-12:
                raise ValueError(
                    f"law {self.kind}: normalized atoms have mean {mean:.3e}, "
                    f"variance {var:.15g}; expected (0, 1)"
                )

    @property
    def finite_support(self) -> bool:
        return self.atoms is not None

    def support_bound(self) -> float:
        """sup |X|; infinite for the gaussian law."""
        if self.kind == "gaussian":
            return math.inf
        if self.kind == "uniform":
            return _SQRT3
        return max(abs(a) for a in self.atoms)

    def sample(self, stream: np.random.Generator, size=None):
        if self.kind == "rademacher":
            draw = stream.integers(0, 2, size=size) * 2.0 - 1.0
            return float(draw) if size is None else draw
        if self.kind == "gaussian":
            return stream.standard_normal(size)
        if self.kind == "uniform":
            return stream.uniform(-_SQRT3, _SQRT3, size=size)
        draw = stream.choice(np.asarray(self.atoms), size=size, p=np.asarray(self.weights))
        return float(draw) if size is None else draw

    def sample_symmetrized(self, stream: np.random.Generator, size=None):
        """One draw of X - X' with X, X' independent copies."""
        return self.sample(stream, size) - self.sample(stream, size)

    def symmetrized_support(self):
        """(atoms, weights) of X - X' for finite laws, None otherwise."""
        if self.atoms is None:
            return None
        acc: dict[float, float] = {}
        for a, wa in zip(self.atoms, self.weights):
            for b, wb in zip(self.atoms, self.weights):
                key = round(a - b, 12)
                acc[key] = acc.get(key, 0.0) + wa * wb
        atoms = tuple(sorted(acc))
        return atoms, tuple(acc[a] for a in atoms)

    def spec_string(self) -> str:
        if self.kind == "sparse-bernoulli":
            return f"sparse-bernoulli({self.param:g})"
        if self.kind == "discrete":
            pairs = ",".join(f"{a:.12g}:{w:.12g}" for a, w in zip(self.atoms, self.weights))
            return f"discrete({pairs})"
        return self.kind


def rademacher() -> DistributionLaw:
    """+/-1 with probability 1/2 each."""
    return DistributionLaw("rademacher", RADEMACHER_PSI2, atoms=(-1.0, 1.0), weights=(0.5, 0.5))


def gaussian() -> DistributionLaw:
    """Standard normal."""
    return DistributionLaw("gaussian", GAUSSIAN_PSI2)


def uniform_scaled() -> DistributionLaw:
    """Uniform on [-sqrt(3), sqrt(3)] (unit variance)."""
    return DistributionLaw("uniform", _uniform_psi2())


def sparse_bernoulli(p: float) -> DistributionLaw:
    """0 with probability 1-p, +/-1/sqrt(p) with probability p/2 each."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"sparse-bernoulli needs p in (0, 1], got {p}")
    s = 1.0 / math.sqrt(p)
    # E exp((X/t)^2) = (1-p) + p exp(1/(p t^2)) = 2  <=>  t = 1/sqrt(p log(1 + 1/p))
    psi2 = 1.0 / math.sqrt(p * math.log(1.0 + 1.0 / p))
    if p == 1.0:
        return DistributionLaw("sparse-bernoulli", psi2, atoms=(-1.0, 1.0),
                               weights=(0.5, 0.5), param=1.0)
    return DistributionLaw("sparse-bernoulli", psi2, atoms=(-s, 0.0, s),
                           weights=(p / 2.0, 1.0 - p, p / 2.0), param=p)


def discrete(atoms, weights, declared_psi2: float | None = None) -> DistributionLaw:
    """Finitely supported law, normalized to mean 0 and variance 1.

    ``atoms``/``weights`` describe the raw law; the constructor recenters and
    rescales the atoms so the sampled law satisfies the moment conditions
    exactly.  Weights must be non-negative and sum to 1 (within 1e-12).
    """
    a = np.asarray(atoms, dtype=float)
    w = np.asarray(weights, dtype=float)
    if a.shape != w.shape or a.ndim != 1 or a.size < 2:
        raise ValueError("discrete law needs matching 1-d atoms/weights with >= 2 atoms")
    if np.any(w < 0.0) or abs(float(np.sum(w)) - 1.0) > 1e-12:
        raise ValueError(f"discrete law weights must be >= 0 and sum to 1, got sum {np.sum(w)!r}")
    mean, var = atom_moments(a, w)
    if var <= 0.0:
        raise ValueError("discrete law is degenerate (zero variance)")
    norm = tuple((a - mean) / math.sqrt(var))
    psi2 = _finite_psi2(norm, w)
    if declared_psi2 is None:
        declared_psi2 = psi2
    elif declared_psi2 < psi2 - 1e-9:
        raise ValueError(f"declared_psi2 {declared_psi2} is below the law's psi2 {psi2:.6g}")
    return DistributionLaw("discrete", declared_psi2, atoms=norm, weights=tuple(w))


_NAMED_LAWS = {
    "rademacher": rademacher,
    "gaussian": gaussian,
    "uniform": uniform_scaled,
    "uniform-scaled": uniform_scaled,
}


def parse_law_spec(text: str) -> DistributionLaw:
    """Parse a law spec string.

    Accepted forms: ``rademacher``, ``gaussian``, ``uniform``,
    ``sparse-bernoulli(p)``, ``discrete(a1:w1,a2:w2,...)``.
    """
    text = text.strip()
    if text in _NAMED_LAWS:
        return _NAMED_LAWS[text]()
    if text.startswith("sparse-bernoulli(") and text.endswith(")"):
        return sparse_bernoulli(float(text[len("sparse-bernoulli("):-1]))
    if text.startswith("discrete(") and text.endswith(")"):
        pairs = [p for p in text[len("discrete("):-1].split(",") if p.strip()]
        atoms, weights = [], []
        for p in pairs:
            a, _, w = p.partition(":")
            if not _:
                raise ValueError(f"discrete atom needs the form value:weight, got {p!r}")
            atoms.append(float(a))
            weights.append(float(w))
        return discrete(atoms, weights)
    raise ValueError(f"unknown law spec {text!r}")


@dataclass(frozen=True)
class EntryProfile:
    """Grid of entry laws for an (n_rows x n_cols) ensemble, with a psi2 cap."""

    n_rows: int
    n_cols: int
    laws: tuple[tuple[DistributionLaw, ...], ...]
    k_cap: float

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError("profile dimensions must be positive")
        if len(self.laws) != self.n_rows or any(len(r) != self.n_cols for r in self.laws):
            raise ValueError("law grid shape does not match (n_rows, n_cols)")
        if self.k_cap <= 0:
            raise ValueError("k_cap must be positive")
        worst = max(law.declared_psi2 for row in self.laws for law in row)
        if worst > self.k_cap + 1e-12:
            raise ValueError(f"a law declares psi2 {worst:.6g} above k_cap {self.k_cap:.6g}")

    @classmethod
    def homogeneous(cls, n_rows: int, n_cols: int, law: DistributionLaw,
                    k_cap: float) -> "EntryProfile":
        row = (law,) * n_cols
        return cls(n_rows, n_cols, (row,) * n_rows, k_cap)

    def law(self, i: int, j: int) -> DistributionLaw:
        return self.laws[i][j]

    def column(self, j: int) -> tuple[DistributionLaw, ...]:
        return tuple(row[j] for row in self.laws)

    @property
    def is_homogeneous(self) -> bool:
        first = self.laws[0][0]
        return all(law == first for row in self.laws for law in row)


def parse_profile_rules(lines) -> list[tuple[object, object, DistributionLaw]]:
    """Parse ``law.<i>.<j> = <spec>`` rules; ``*`` selects a whole row/column.

    Rules apply in order: later rules overwrite earlier ones on the cells
    they select.  Returns (row_selector, col_selector, law) triples where a
    selector is an int or the string ``"*"``.
    """
    rules = []
    for line in lines:
        key, _, value = line.partition("=")
        key = key.strip()
        parts = key.split(".")
        if len(parts) != 3 or parts[0] != "law":
            raise ValueError(f"profile rule key must look like law.<i>.<j>, got {key!r}")
        sel = []
        for token in parts[1:]:
            sel.append("*" if token == "*" else int(token))
        rules.append((sel[0], sel[1], parse_law_spec(value)))
    return rules


def profile_from_rules(rules, n_rows: int, n_cols: int, k_cap: float) -> EntryProfile:
    """Materialize a rule list into a dense law grid; every cell must be covered."""
    grid: list[list[DistributionLaw | None]] = [[None] * n_cols for _ in range(n_rows)]
    for row_sel, col_sel, law in rules:
        rows = range(n_rows) if row_sel == "*" else [row_sel]
        cols = range(n_cols) if col_sel == "*" else [col_sel]
        for i in rows:
            if not 0 <= i < n_rows:
                raise ValueError(f"profile rule row {i} out of range for n_rows={n_rows}")
            for j in cols:
                if not 0 <= j < n_cols:
                    raise ValueError(f"profile rule column {j} out of range for n_cols={n_cols}")
                grid[i][j] = law
    for i, row in enumerate(grid):
        for j, law in enumerate(row):
            if law is None:
                raise ValueError(f"profile rule set leaves cell ({i},{j}) unassigned")
    return EntryProfile(n_rows, n_cols, tuple(tuple(r) for r in grid), k_cap)


def sample_entry(law: DistributionLaw, stream: np.random.Generator) -> float:
    """One draw from the law; deterministic given the stream state."""
    return float(law.sample(stream))


def sample_symmetrized(law, stream: np.random.Generator) -> float:
    """One draw of the symmetrization X - X' (any object with a sample method works)."""
    return float(law.sample(stream) - law.sample(stream))


def sample_matrix(profile: EntryProfile, stream: np.random.Generator) -> np.ndarray:
    """Sample an (n_rows x n_cols) matrix with independent entries per the profile.

    Cells sharing a law are drawn in one vectorized call (row-major placement),
    so homogeneous profiles cost a single generator call.
    """
    if profile.is_homogeneous:
        return np.asarray(profile.laws[0][0].sample(stream, (profile.n_rows, profile.n_cols)),
                          dtype=float)
    out = np.empty((profile.n_rows, profile.n_cols))
    groups: dict[DistributionLaw, list[tuple[int, int]]] = {}
    for i, row in enumerate(profile.laws):
        for j, law in enumerate(row):
            groups.setdefault(law, []).append((i, j))
    for law, cells in groups.items():
        draws = law.sample(stream, len(cells))
        for (i, j), v in zip(cells, draws):
            out[i, j] = v
    return out


def paley_zygmund_floor(k_psi2: float) -> float:
    """Lower bound (6 + 4 K^4)^(-1) on P(|X - X'| >= 1) for any law with psi2 <= K.

    Valid for K >= 1 (below that no variance-1 law exists with the cap).
    """
    if k_psi2 < 1.0:
        raise ValueError(f"the floor assumes K >= 1, got {k_psi2}")
    return 1.0 / (6.0 + 4.0 * k_psi2 ** 4)


def psi2_estimate(law, n_samples: int, stream: np.random.Generator | None = None,
                  rel_tol: float = 1e-3, t_cap: float = 100.0) -> float:
    """Empirical psi2 norm: smallest t with mean(exp((X/t)^2)) <= 2 over one sample.

    Bisects on t against a fixed sample of ``n_samples`` draws.  Raises
    :class:`EstimationError` when even ``t_cap`` fails the criterion (the law
    is too heavy-tailed for the sample to certify subgaussianity).
    """
    if n_samples < 1000:
        raise ValueError("psi2_estimate needs n_samples >= 1000")
    rng = np.random.default_rng(0) if stream is None else stream
    sq = np.asarray(law.sample(rng, n_samples), dtype=float) ** 2
    peak = float(np.max(sq))
    if peak == 0.0:
        return 0.0

    def avg(t):
        with np.errstate(over="ignore"):
            return float(np.mean(np.exp(sq / (t * t))))

    if avg(t_cap) > 2.0:
        raise EstimationError(f"empirical exp-moment still above 2 at t = {t_cap}")
    # exp(peak/t^2)/n > 2 guarantees the mean exceeds 2: a valid lower bracket
    lo = math.sqrt(peak / (math.log(2.0 * n_samples) + 1.0))
    hi = t_cap
    if avg(lo) <= 2.0:  # tiny samples of a bounded law; shrink further
        lo = min(lo, 1e-12)
    while (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if avg(mid) > 2.0:
            lo = mid
        else:
            hi = mid
    return hi
