"""Command-line interface: campaign files in, reproducible result files out.

Campaign grammar: one ``key = value`` assignment per line, ``#`` starts a
comment, blank lines ignored.  Later assignments override earlier ones,
except ``law.<i>.<j>`` rules, which accumulate in order (``*`` selects a
whole row or column; ``profile = <law>`` is shorthand for ``law.*.* =
<law>`` applied first).  Law specs: ``rademacher``, ``gaussian``,
``uniform``, ``sparse-bernoulli(p)``, ``discrete(a1:w1,a2:w2,...)``.
Unknown keys are rejected with their line number.  Every campaign needs
``kind`` and ``seed``; list-valued keys (``k``, ``epsilon``, ``t``, ``n``
for norm sweeps) take comma-separated ascending values.

Each run writes into the output directory:

- ``results.csv`` with the fixed header
  ``experiment_id,n,k,epsilon,estimate,stderr,trials,master_seed``
  (the epsilon column carries the row's threshold parameter where one
  applies; cells that do not apply stay empty);
- ``manifest.txt``, a normalized campaign file (plus version comment) that
  reproduces the run byte-for-byte when passed back as ``--config``;
- kind-specific artifacts (sampled matrices, rounding reports, selection
  certificates, denominator traces) and two-column tab-separated plot data
  named ``<experiment_id>.<series>.tsv``.

All randomness derives from the campaign seed; reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .arithmetic import RLCDParams, rlcd_estimate
from .ensembles import EntryProfile, parse_law_spec, profile_from_rules, sample_matrix
from .errors import CampaignError
from .experiments import (ExperimentConfig, rank_tail_exact_rademacher, rank_tail_from_table,
                          run_trials, singular_tail_mc, norm_concentration_mc,
                          tensorization_check)
from .linalg import read_matrix, singular_spectrum, write_matrix
from .rounding import RoundingParams, randomized_round, rounding_report
from .selection import ri_select

RESULTS_HEADER = "experiment_id,n,k,epsilon,estimate,stderr,trials,master_seed"

_KINDS = ("sample", "rank-tail", "singular-tail", "rlcd", "round",
          "ri-select", "tensorize", "norms")

_SIMPLE_KEYS = {
    "kind", "id", "seed", "threads", "k_cap", "profile", "n", "rows", "cols",
    "k", "epsilon", "gamma", "trials", "tol", "method", "L", "alpha",
    "radius_cap", "resolution", "mc_trials", "basis", "columns", "directions",
    "l", "delta", "rho", "tau", "r", "c_op", "c_hs", "comparison_c", "t",
    "mode", "matrix_file", "vectors_file", "vector_scale",
}


@dataclass
class CampaignFile:
    """A parsed campaign: the kind, its keyed values, and the law rules."""

    kind: str
    experiment_id: str
    seed: int
    values: dict  # key -> (raw value, line number)
    law_rules: list  # (line number, raw "law.<i>.<j>" key, raw value)

    def get(self, key: str, default=None):
        if key in self.values:
            return self.values[key][0]
        return default


def parse_campaign(text: str) -> CampaignFile:
    """Parse and validate campaign text; errors name the offending line."""
    values: dict = {}
    law_rules: list = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CampaignError(f"line {line_no}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key.startswith("law."):
            parts = key.split(".")
            if len(parts) != 3 or any(not (p == "*" or p.lstrip("-").isdigit())
                                      for p in parts[1:]):
                raise CampaignError(f"line {line_no}: law keys look like law.<i>.<j>, "
                                    f"got {key!r}")
            law_rules.append((line_no, key, value))
            continue
        if key not in _SIMPLE_KEYS:
            raise CampaignError(f"line {line_no}: unknown key {key!r}")
        if not value:
            raise CampaignError(f"line {line_no}: key {key!r} has no value")
        values[key] = (value, line_no)

    if "kind" not in values:
        raise CampaignError("campaign is missing the kind key")
    kind = values["kind"][0]
    if kind not in _KINDS:
        raise CampaignError(f"line {values['kind'][1]}: unknown kind {kind!r} "
                            f"(expected one of {', '.join(_KINDS)})")
    if "seed" not in values:
        raise CampaignError("campaign is missing the seed key")
    seed_raw, seed_line = values["seed"]
    try:
        seed = int(seed_raw)
    except ValueError:
        raise CampaignError(f"line {seed_line}: seed must be an integer, got {seed_raw!r}")
    if not 0 <= seed < 2 ** 64:
        raise CampaignError(f"line {seed_line}: seed must fit in 64 bits")
    experiment_id = values["id"][0] if "id" in values else kind
    return CampaignFile(kind, experiment_id, seed, values, law_rules)


def normalize_campaign(campaign: CampaignFile, seed: int) -> str:
    """Canonical campaign text embedding the effective seed; parseable as-is."""
    lines = [f"# generated by rmtlab {__version__}",
             f"kind = {campaign.kind}",
             f"id = {campaign.experiment_id}",
             f"seed = {seed}"]
    for key in sorted(campaign.values):
        if key in ("kind", "id", "seed", "threads"):
            continue
        lines.append(f"{key} = {campaign.values[key][0]}")
    for _, key, value in campaign.law_rules:
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def _c_int(campaign, key, default=None):
    raw = campaign.get(key)
    if raw is None:
        if default is None:
            raise CampaignError(f"{campaign.kind} campaign is missing the {key} key")
        return default
    try:
        return int(raw)
    except ValueError:
        line = campaign.values[key][1]
        raise CampaignError(f"line {line}: key {key!r} must be an integer, got {raw!r}")


def _c_float(campaign, key, default=None):
    raw = campaign.get(key)
    if raw is None:
        if default is None:
            raise CampaignError(f"{campaign.kind} campaign is missing the {key} key")
        return default
    try:
        return float(raw)
    except ValueError:
        line = campaign.values[key][1]
        raise CampaignError(f"line {line}: key {key!r} must be a number, got {raw!r}")


def _c_grid(campaign, key, cast=float, default=None):
    raw = campaign.get(key)
    if raw is None:
        if default is None:
            raise CampaignError(f"{campaign.kind} campaign is missing the {key} key")
        return default
    try:
        items = [cast(v.strip()) for v in raw.split(",") if v.strip()]
    except ValueError:
        line = campaign.values[key][1]
        raise CampaignError(f"line {line}: key {key!r} must be a comma list, got {raw!r}")
    if not items:
        raise CampaignError(f"key {key!r} lists no values")
    if any(items[i] > items[i + 1] for i in range(len(items) - 1)):
        line = campaign.values[key][1]
        raise CampaignError(f"line {line}: grid {key!r} must be sorted ascending")
    return items


def _c_tol(campaign):
    raw = campaign.get("tol")
    if raw is None or raw == "auto":
        return None
    return _c_float(campaign, "tol")


def _build_profile(campaign, n_rows: int, n_cols: int) -> EntryProfile:
    k_cap = _c_float(campaign, "k_cap", 2.0)
    rules = []
    base = campaign.get("profile")
    if base is not None:
        try:
            rules.append(("*", "*", parse_law_spec(base)))
        except ValueError as exc:
            raise CampaignError(f"line {campaign.values['profile'][1]}: {exc}")
    for line_no, key, value in campaign.law_rules:
        parts = key.split(".")
        try:
            sel = tuple("*" if p == "*" else int(p) for p in parts[1:])
            rules.append((sel[0], sel[1], parse_law_spec(value)))
        except ValueError as exc:
            raise CampaignError(f"line {line_no}: {exc}")
    if not rules:
        raise CampaignError(f"{campaign.kind} campaign needs a profile "
                            "(profile = <law> or law.<i>.<j> rules)")
    try:
        return profile_from_rules(rules, n_rows, n_cols, k_cap)
    except ValueError as exc:
        raise CampaignError(str(exc))


def _master_stream(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed))


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _row(experiment_id, n, k, epsilon, estimate, stderr, trials, seed) -> str:
    return ",".join(_fmt(v) for v in (experiment_id, n, k, epsilon, estimate,
                                      stderr, trials, seed))


def _write_tsv(path: str, xs, ys) -> None:
    with open(path, "w", newline="") as fh:
        for x, y in zip(xs, ys):
            fh.write(f"{_fmt(float(x))}\t{_fmt(float(y))}\n")


def _run_sample(campaign, out_dir, stream, rows, n_threads):
    if campaign.get("rows") is not None:
        n_rows = _c_int(campaign, "rows")
        n_cols = _c_int(campaign, "cols", n_rows)
    else:
        n_rows = n_cols = _c_int(campaign, "n")
    profile = _build_profile(campaign, n_rows, n_cols)
    mat = sample_matrix(profile, stream)
    write_matrix(os.path.join(out_dir, f"{campaign.experiment_id}.matrix.csv"), mat)
    spec = singular_spectrum(mat)
    rows.append(_row(campaign.experiment_id, n_rows, None, None, spec.smallest,
                     None, 1, campaign.seed))


def _run_rank_tail(campaign, out_dir, stream, rows, n_threads):
    n = _c_int(campaign, "n")
    ks = _c_grid(campaign, "k", int)
    method = campaign.get("method", "mc")
    if method == "exact":
        exact = [float(rank_tail_exact_rademacher(n, k)) for k in ks]
        for k, p in zip(ks, exact):
            rows.append(_row(campaign.experiment_id, n, k, None, p, 0.0,
                             2 ** (n * n), campaign.seed))
        _write_tsv(os.path.join(out_dir, f"{campaign.experiment_id}.ranktail.tsv"),
                   ks, exact)
        return
    if method != "mc":
        raise CampaignError(f"method must be mc or exact, got {method!r}")
    trials = _c_int(campaign, "trials")
    profile = _build_profile(campaign, n, n)
    config = ExperimentConfig(profile, n, max(ks), epsilon_grid=(),
                              gamma=_c_float(campaign, "gamma", 0.25),
                              trials=trials, master_seed=campaign.seed,
                              tol=_c_tol(campaign))
    table = run_trials(config, n_threads)
    estimates = []
    for k in ks:
        est, se = rank_tail_from_table(table, n, k)
        estimates.append(est)
        rows.append(_row(campaign.experiment_id, n, k, None, est, se, trials,
                         campaign.seed))
    _write_tsv(os.path.join(out_dir, f"{campaign.experiment_id}.ranktail.tsv"),
               ks, estimates)


def _run_singular_tail(campaign, out_dir, stream, rows, n_threads):
    n = _c_int(campaign, "n")
    k = _c_int(campaign, "k")
    eps = _c_grid(campaign, "epsilon", float)
    trials = _c_int(campaign, "trials")
    profile = _build_profile(campaign, n, n)
    config = ExperimentConfig(profile, n, k, epsilon_grid=tuple(eps),
                              gamma=_c_float(campaign, "gamma", 0.25),
                              trials=trials, master_seed=campaign.seed,
                              tol=_c_tol(campaign))
    tail = singular_tail_mc(config, comparison_c=_c_float(campaign, "comparison_c", 1.0),
                            n_threads=n_threads)
    for entry in tail:
        rows.append(_row(campaign.experiment_id, n, k, float(entry["epsilon"]),
                         float(entry["estimate"]), float(entry["stderr"]),
                         trials, campaign.seed))
    _write_tsv(os.path.join(out_dir, f"{campaign.experiment_id}.tail.tsv"),
               tail["epsilon"], tail["estimate"])
    _write_tsv(os.path.join(out_dir, f"{campaign.experiment_id}.bound.tsv"),
               tail["epsilon"], tail["bound"])


def _run_rlcd(campaign, out_dir, stream, rows, n_threads):
    n = _c_int(campaign, "n")
    profile = _build_profile(campaign, n, n)
    params = RLCDParams(L=_c_float(campaign, "L"), alpha=_c_float(campaign, "alpha"),
                        radius_cap=_c_float(campaign, "radius_cap"),
                        resolution=_c_float(campaign, "resolution"),
                        mc_trials=_c_int(campaign, "mc_trials", 1000))
    basis_spec = campaign.get("basis", "axis 1")
    parts = basis_spec.split()
    if parts[0] == "axis" and len(parts) == 2:
        m = int(parts[1])
        basis = np.eye(n)[:m]
    elif parts[0] == "file" and len(parts) == 2:
        basis = read_matrix(parts[1])
    else:
        raise CampaignError(f"basis must be 'axis <m>' or 'file <path>', got {basis_spec!r}")
    columns = campaign.get("columns")
    col_idx = ([int(v) for v in columns.split(",")] if columns is not None
               else list(range(profile.n_cols)))
    trace: list = []
    est = rlcd_estimate(basis, profile, col_idx, params, stream,
                        n_directions=_c_int(campaign, "directions", 32), trace=trace)
    rows.append(_row(campaign.experiment_id, n, None, None,
                     est.upper if math.isfinite(est.upper) else math.inf,
                     None, params.mc_trials, campaign.seed))
    with open(os.path.join(out_dir, f"{campaign.experiment_id}.rlcd.csv"), "w",
              newline="") as fh:
        fh.write("lower,upper,note\n")
        fh.write(f"{_fmt(est.lower)},{_fmt(est.upper)},{est.note or ''}\n")
    if trace:
        radii = [t[0] for t in trace]
        _write_tsv(os.path.join(out_dir, f"{campaign.experiment_id}.trace.tsv"),
                   radii, [t[1] for t in trace])
        _write_tsv(os.path.join(out_dir, f"{campaign.experiment_id}.threshold.tsv"),
                   radii, [t[2] for t in trace])


def _run_round(campaign, out_dir, stream, rows, n_threads):
    n = _c_int(campaign, "n")
    l = _c_int(campaign, "l", 1)
    profile = _build_profile(campaign, n, n)
    params = RoundingParams(delta=_c_float(campaign, "delta"),
                            rho=_c_float(campaign, "rho"),
                            tau=_c_float(campaign, "tau", 0.5),
                            K=_c_float(campaign, "k_cap", 2.0),
                            r=_c_float(campaign, "r", 0.05),
                            c_op=_c_float(campaign, "c_op", 3.0))
    vectors_file = campaign.get("vectors_file")
    if vectors_file is not None:
        v = read_matrix(vectors_file)
    else:
        v = stream.standard_normal((n, l))
        v /= np.linalg.norm(v, axis=0)
        v *= _c_float(campaign, "vector_scale", 1.0)
    u = np.column_stack([randomized_round(v[:, j], params.delta, stream)
                         for j in range(v.shape[1])])
    b = sample_matrix(profile, stream)
    report = rounding_report(v, u, profile, b, params, stream,
                             mc_trials=_c_int(campaign, "mc_trials", 1000))
    path = os.path.join(out_dir, f"{campaign.experiment_id}.rounding_report.csv")
    with open(path, "w", newline="") as fh:
        fh.write("name,measured,threshold,pass\n")
        for line in report.csv_rows():
            fh.write(line + "\n")
    passed = sum(1 for c in report.checks if c.passed)
    rows.append(_row(campaign.experiment_id, n, None, None, passed / 7.0, None, 1,
                     campaign.seed))


def _run_ri_select(campaign, out_dir, stream, rows, n_threads):
    matrix_file = campaign.get("matrix_file")
    if matrix_file is not None:
        mat = read_matrix(matrix_file)
    else:
        n_rows = _c_int(campaign, "rows")
        n_cols = _c_int(campaign, "cols")
        profile = _build_profile(campaign, n_rows, n_cols)
        mat = sample_matrix(profile, stream)
    l = _c_int(campaign, "l")
    mode = campaign.get("mode", "exhaustive")
    cert = ri_select(mat, l, mode)
    path = os.path.join(out_dir, f"{campaign.experiment_id}.certificates.csv")
    with open(path, "w", newline="") as fh:
        fh.write("indices,s_l,rhs,ratio\n")
        fh.write(cert.csv_row() + "\n")
    rows.append(_row(campaign.experiment_id, mat.shape[0], l, None, cert.ratio,
                     None, 1, campaign.seed))


def _run_tensorize(campaign, out_dir, stream, rows, n_threads):
    n = _c_int(campaign, "n")
    ts = _c_grid(campaign, "t", float)
    trials = _c_int(campaign, "trials", 100_000)
    probs, bounds = [], []
    for t in ts:
        prob, bound = tensorization_check(n, t, trials=trials, stream=stream)
        probs.append(prob)
        bounds.append(bound)
        exact = n * t <= 1.0
        se = None if exact else math.sqrt(prob * (1.0 - prob) / trials)
        rows.append(_row(campaign.experiment_id, n, None, t, prob, se,
                         1 if exact else trials, campaign.seed))
    _write_tsv(os.path.join(out_dir, f"{campaign.experiment_id}.exact.tsv"), ts, probs)
    _write_tsv(os.path.join(out_dir, f"{campaign.experiment_id}.bound.tsv"), ts, bounds)


def _run_norms(campaign, out_dir, stream, rows, n_threads):
    law_spec = campaign.get("profile")
    if law_spec is None or campaign.law_rules:
        raise CampaignError("norms campaigns take a single homogeneous law via profile =")
    try:
        law = parse_law_spec(law_spec)
    except ValueError as exc:
        raise CampaignError(f"line {campaign.values['profile'][1]}: {exc}")
    n_grid = _c_grid(campaign, "n", int)
    trials = _c_int(campaign, "trials")
    table = norm_concentration_mc(law, n_grid, trials, stream,
                                  c_op=_c_float(campaign, "c_op", 3.0),
                                  c_hs=_c_float(campaign, "c_hs", 1.0))
    for entry in table:
        n = int(entry["n"])
        rows.append(_row(f"{campaign.experiment_id}.op", n, None, None,
                         float(entry["op_exceed"]), float(entry["op_stderr"]),
                         trials, campaign.seed))
        rows.append(_row(f"{campaign.experiment_id}.hs", n, None, None,
                         float(entry["hs_exceed"]), float(entry["hs_stderr"]),
                         trials, campaign.seed))
    _write_tsv(os.path.join(out_dir, f"{campaign.experiment_id}.opnorm.tsv"),
               table["n"], table["op_exceed"])
    _write_tsv(os.path.join(out_dir, f"{campaign.experiment_id}.hsnorm.tsv"),
               table["n"], table["hs_exceed"])


_RUNNERS = {
    "sample": _run_sample,
    "rank-tail": _run_rank_tail,
    "singular-tail": _run_singular_tail,
    "rlcd": _run_rlcd,
    "round": _run_round,
    "ri-select": _run_ri_select,
    "tensorize": _run_tensorize,
    "norms": _run_norms,
}


def run_campaign(campaign: CampaignFile, out_dir: str = ".", n_threads: int = 1) -> int:
    """Execute one campaign; returns the process exit status.

    The manifest and any partial results are flushed even when a module
    raises, so failed runs leave a reproducible record behind.
    """
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "manifest.txt"), "w", newline="") as fh:
        fh.write(normalize_campaign(campaign, campaign.seed))
    rows: list = []
    status = 0
    try:
        _RUNNERS[campaign.kind](campaign, out_dir,
                                _master_stream(campaign.seed), rows, n_threads)
    except (CampaignError, ValueError, RuntimeError, OSError) as exc:
        print(f"rmtlab: {exc}", file=sys.stderr)
        status = 2
    with open(os.path.join(out_dir, "results.csv"), "w", newline="") as fh:
        fh.write(RESULTS_HEADER + "\n")
        for row in rows:
            fh.write(row + "\n")
    return status


def _report(out_dir: str) -> int:
    results = os.path.join(out_dir, "results.csv")
    if not os.path.exists(results):
        print(f"rmtlab: no results.csv under {out_dir}", file=sys.stderr)
        return 2
    with open(results, newline="") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header, data = lines[0], lines[1:]
    counts: dict = {}
    for line in data:
        counts[line.split(",", 1)[0]] = counts.get(line.split(",", 1)[0], 0) + 1
    print(f"results: {len(data)} row(s), header {header}")
    for exp_id in sorted(counts):
        print(f"  {exp_id}: {counts[exp_id]} row(s)")
    manifest = os.path.join(out_dir, "manifest.txt")
    print(f"manifest: {'present' if os.path.exists(manifest) else 'missing'}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rmtlab",
        description="Random-matrix laboratory: tail estimation, lattice rounding, "
                    "and arithmetic-structure diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in _KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} campaign")
        p.add_argument("--config", required=True, help="campaign file path")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the campaign seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads for trials")
    rep = sub.add_parser("report", help="summarize an output directory")
    rep.add_argument("--out", default=".", help="output directory to summarize")
    args = parser.parse_args(argv)

    if args.command == "report":
        return _report(args.out)
    try:
        with open(args.config, encoding="utf-8") as fh:
            campaign = parse_campaign(fh.read())
        if campaign.kind != args.command:
            raise CampaignError(f"campaign kind {campaign.kind!r} does not match "
                                f"subcommand {args.command!r}")
        if args.seed is not None:
            if not 0 <= args.seed < 2 ** 64:
                raise CampaignError("--seed must fit in 64 bits")
            campaign.seed = args.seed
    except (OSError, CampaignError) as exc:
        print(f"rmtlab: {exc}", file=sys.stderr)
        return 2
    return run_campaign(campaign, out_dir=args.out, n_threads=args.threads)


if __name__ == "__main__":
    sys.exit(main())
