"""Seeded experiment driver reproducing the four experiment families
(real-pattern ranks, Omega ~ W flatness sweep, spectral-gap sweep,
proportional-sampling budget sweep) plus certification runs.

Determinism contract: every random draw comes from a generator derived
as rng_from(master_seed, experiment, role, *counters) -- see
linalg.rng_from for the word-hashing scheme.  No global RNG state is
touched, so identical configs produce byte-identical CSVs, and cells of
the parameter lattice could be evaluated in any order.

Within a cell both estimators consume the exact same observation
matrix, and in the spectral-gap experiment all three product kinds share
the same data/noise draws (paired comparisons).
"""

from __future__ import annotations

import hashlib
import json
import math
import subprocess
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from .diagnostics import (
    best_rank1_weight,
    diagnose,
    plugin_bounds,
    unweighted_error,
    weighted_error,
)
from .errors import ConfigError, DomainError, NonnegativityError
from .estimators import (
    EstimatorConfig,
    debiased_rank_projection,
    proportional_sampling_recovery,
    standard_rank_projection,
)
from .linalg import FactoredVectorPair, WeightMatrix, rng_from
from .patterns import (
    SamplePattern,
    WeightFamilySpec,
    circulant_regular,
    ingest_ratings,
    random_regular,
    sample_bernoulli,
    spiky_weight,
    tensor_product,
)

EXPERIMENTS = ("real_pattern", "sample_w", "spectral_gap", "certify", "proportional")

KIND_CIRC_CIRC = "circ_circ"
KIND_CIRC_RAND = "circ_rand"
KIND_RAND_RAND = "rand_rand"
PRODUCT_KINDS = (KIND_CIRC_CIRC, KIND_CIRC_RAND, KIND_RAND_RAND)

CSV_COLUMNS = [
    "experiment", "d1", "d2", "rank", "m_target", "y", "rho", "graph_kind",
    "budget", "method", "weighted_mean", "weighted_std", "unweighted_mean",
    "unweighted_std", "rel_error_mean", "rel_error_std", "realized_samples",
    "expected_samples", "clamped", "lambda", "mu", "m", "lambda1", "lambda2",
    "gap", "sample_count", "master_seed",
]

_AGGREGATION_NOTES = {
    "real_pattern": "mean over noise repeats within a trial; std across trials (outer axis n)",
    "sample_w": "mean over data draws within a pattern draw; std across pattern draws (outer axis t)",
    "spectral_gap": "mean over data draws within a graph draw; std across graph draws (outer axis t)",
    "proportional": "mean and std across repeats; rel_error columns hold ||X - Xhat||_F / ||X||_F",
}


@dataclass
class ExperimentConfig:
    """Flat description of one experiment run; mirrors the config file."""

    experiment: str
    master_seed: int = 0
    sigma: float = 1.0
    trials: int = 1
    noise_repeats: int = 1
    out: str = "results.csv"
    # real_pattern
    dataset_path: str | None = None
    dataset_format: str | None = None
    rank_grid: list = field(default_factory=list)
    max_users: int | None = None
    min_row_count: int = 1
    min_col_count: int = 1
    # synthetic sweeps
    d: int = 0
    data_rank: int = 0
    y_grid: list = field(default_factory=list)
    m_grid: list = field(default_factory=list)
    k: int = 0
    rho_grid: list = field(default_factory=list)
    # proportional
    budget_grid: list = field(default_factory=list)
    repeats: int = 5
    maxnorm_iterations: int = 2000
    # certify
    pattern_path: str | None = None
    weight_path: str | None = None
    bound_rank: int = 1
    bound_beta: float = 1.0
    bound_sigma: float = 0.0

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if self.trials < 1 or self.noise_repeats < 1:
            raise ConfigError("trials and noise_repeats must be >= 1")
        if self.sigma < 0:
            raise ConfigError("sigma must be nonnegative")
        if self.experiment == "real_pattern":
            if not self.dataset_path or not self.dataset_format:
                raise ConfigError("real_pattern needs dataset_path and dataset_format")
            if not self.rank_grid:
                raise ConfigError("real_pattern needs a nonempty rank_grid")
        elif self.experiment == "sample_w":
            if self.d <= 0 or self.data_rank <= 0:
                raise ConfigError("sample_w needs positive d and data_rank")
            if not self.y_grid or not self.m_grid:
                raise ConfigError("sample_w needs nonempty y_grid and m_grid")
            for m in self.m_grid:
                for y in self.y_grid:
                    try:
                        WeightFamilySpec(d=self.d, m_target=float(m), y=float(y))
                    except DomainError as exc:
                        raise ConfigError(f"invalid grid point (m={m}, y={y}): {exc}") from exc
        elif self.experiment == "spectral_gap":
            if self.k <= 0 or self.data_rank <= 0:
                raise ConfigError("spectral_gap needs positive k and data_rank")
            if not self.rho_grid:
                raise ConfigError("spectral_gap needs a nonempty rho_grid")
        elif self.experiment == "proportional":
            if self.d <= 0 or self.data_rank <= 0:
                raise ConfigError("proportional needs positive d and data_rank")
            if not self.budget_grid:
                raise ConfigError("proportional needs a nonempty budget_grid")
            if self.repeats < 1:
                raise ConfigError("repeats must be >= 1")
        elif self.experiment == "certify":
            if not self.pattern_path:
                raise ConfigError("certify needs pattern_path")
        return self


def _desk_presets():
    d = 200
    m_lo, m_hi = 4.0 * d * math.log(d), d * d / 4.0
    return {
        "real_pattern": dict(rank_grid=list(range(1, 11)), trials=10, noise_repeats=5,
                             sigma=1.0, max_users=2000),
        "sample_w": dict(d=d, data_rank=5, trials=8, noise_repeats=8, sigma=4.0,
                         y_grid=[0.10, 0.12, 0.14, 0.16],
                         m_grid=[int(round(v)) for v in np.geomspace(m_lo, m_hi, 4)]),
        "spectral_gap": dict(k=24, data_rank=5, rho_grid=[4, 8, 12], trials=2,
                             noise_repeats=8, sigma=1.0),
        "proportional": dict(d=120, data_rank=3, repeats=5, maxnorm_iterations=6000,
                             budget_grid=[1152, 2160, 4320, 8640, 14400]),
        "certify": dict(),
    }


def _paper_presets():
    d = 1000
    m_lo, m_hi = 4.0 * d * math.log(d), d * d / 4.0
    return {
        "real_pattern": dict(rank_grid=list(range(1, 11)), trials=50, noise_repeats=25,
                             sigma=1.0),
        "sample_w": dict(d=d, data_rank=10, trials=15, noise_repeats=15, sigma=1.0,
                         y_grid=[0.045, 0.058, 0.070, 0.083],
                         m_grid=[int(round(v)) for v in np.geomspace(m_lo, m_hi, 6)]),
        "spectral_gap": dict(k=50, data_rank=10, rho_grid=list(range(2, 21, 2)),
                             trials=15, noise_repeats=15, sigma=1.0),
        "proportional": dict(d=120, data_rank=3, repeats=10, maxnorm_iterations=6000,
                             budget_grid=[1152, 2160, 4320, 6480, 8640, 11520, 14400]),
        "certify": dict(),
    }


PRESETS = {"desk": _desk_presets(), "paper": _paper_presets()}


def make_config(experiment, preset=None, **overrides) -> ExperimentConfig:
    fields = {"experiment": experiment}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; expected desk or paper")
        if experiment not in PRESETS[preset]:
            raise ConfigError(f"no {preset} preset for experiment {experiment!r}")
        fields.update(PRESETS[preset][experiment])
    fields.update({k: v for k, v in overrides.items() if v is not None})
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(fields) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**fields).validate()


def load_config_file(path) -> dict:
    """Flat TOML key-value document mirroring ExperimentConfig fields."""
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must be a flat key-value table")
    return data


def derive_seed_int(master_seed, *path) -> int:
    """Stable unsigned 64-bit seed from a master seed and a path of labels."""
    h = hashlib.blake2s(digest_size=8)
    h.update(repr(int(master_seed)).encode())
    for part in path:
        h.update(b"/")
        h.update(repr(part).encode())
    return int.from_bytes(h.digest(), "little")


@dataclass
class ResultRow:
    """One aggregated CSV record; unused parameter columns stay empty."""

    experiment: str
    d1: int
    d2: int
    method: str
    master_seed: int
    rank: int | None = None
    m_target: float | None = None
    y: float | None = None
    rho: int | None = None
    graph_kind: str | None = None
    budget: float | None = None
    weighted_mean: float | None = None
    weighted_std: float | None = None
    unweighted_mean: float | None = None
    unweighted_std: float | None = None
    rel_error_mean: float | None = None
    rel_error_std: float | None = None
    realized_samples: float | None = None
    expected_samples: float | None = None
    clamped: int | None = None
    lambda_: float | None = None
    mu: float | None = None
    m: float | None = None
    lambda1: float | None = None
    lambda2: float | None = None
    gap: float | None = None
    sample_count: float | None = None

    def csv_values(self):
        raw = {
            "experiment": self.experiment, "d1": self.d1, "d2": self.d2,
            "rank": self.rank, "m_target": self.m_target, "y": self.y,
            "rho": self.rho, "graph_kind": self.graph_kind, "budget": self.budget,
            "method": self.method, "weighted_mean": self.weighted_mean,
            "weighted_std": self.weighted_std, "unweighted_mean": self.unweighted_mean,
            "unweighted_std": self.unweighted_std, "rel_error_mean": self.rel_error_mean,
            "rel_error_std": self.rel_error_std, "realized_samples": self.realized_samples,
            "expected_samples": self.expected_samples, "clamped": self.clamped,
            "lambda": self.lambda_, "mu": self.mu, "m": self.m,
            "lambda1": self.lambda1, "lambda2": self.lambda2, "gap": self.gap,
            "sample_count": self.sample_count, "master_seed": self.master_seed,
        }
        return [_format_cell(raw[c]) for c in CSV_COLUMNS]


def _format_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def config_hash(cfg: ExperimentConfig) -> str:
    fields = asdict(cfg)
    fields.pop("out", None)  # identity of the run, not of the destination
    blob = json.dumps(fields, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _git_revision() -> str:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            capture_output=True, text=True, timeout=10,
        )
        rev = out.stdout.strip()
        return rev if out.returncode == 0 and rev else "unknown"
    except OSError:
        return "unknown"


def write_csv(path, rows, cfg: ExperimentConfig):
    lines = [
        "# wmc results",
        f"# experiment: {cfg.experiment}",
        f"# config_hash: {config_hash(cfg)}",
        f"# git_revision: {_git_revision()}",
        f"# aggregation: {_AGGREGATION_NOTES.get(cfg.experiment, 'single record')}",
        ",".join(CSV_COLUMNS),
    ]
    lines.extend(",".join(row.csv_values()) for row in rows)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _mean_std(values):
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.mean()), float(arr.std())


def _rank_r_data(rng, d1, d2, r):
    return rng.standard_normal((d1, r)) @ rng.standard_normal((r, d2))


def _mean_diag(diags):
    """Average diagnostics over pattern draws for the row snapshot."""
    lam1 = lam2 = gap = None
    if all(dg.lambda1 is not None for dg in diags):
        lam1 = float(np.mean([dg.lambda1 for dg in diags]))
        lam2 = float(np.mean([dg.lambda2 for dg in diags]))
        gap = float(np.mean([dg.gap for dg in diags]))
    return dict(
        lambda_=float(np.mean([dg.lambda_ for dg in diags])),
        mu=float(np.mean([dg.mu for dg in diags])),
        m=float(np.mean([dg.m for dg in diags])),
        lambda1=lam1,
        lambda2=lam2,
        gap=gap,
        sample_count=float(np.mean([dg.sample_count for dg in diags])),
    )


def load_real_pattern(cfg: ExperimentConfig) -> SamplePattern:
    """Ingest, optionally subsample users and filter sparse rows/columns."""
    result = ingest_ratings(cfg.dataset_path, cfg.dataset_format)
    pat = result.pattern
    if cfg.max_users is not None and pat.d1 > cfg.max_users:
        sel = pat.row_index < cfg.max_users
        pat = SamplePattern(cfg.max_users, pat.d2, pat.row_index[sel], pat.col_index[sel])
        pat, _, _ = pat.reduce()
    if cfg.min_row_count > 1 or cfg.min_col_count > 1:
        pat, _, _ = pat.filter_min_counts(cfg.min_row_count, cfg.min_col_count)
    else:
        pat, _, _ = pat.reduce()
    return pat


def run_real_pattern(cfg: ExperimentConfig):
    """Both estimators over a rank grid on a real sampling pattern."""
    cfg.validate()
    pat = load_real_pattern(cfg)
    w = best_rank1_weight(pat)
    diag = diagnose(pat, w)
    snapshot = _mean_diag([diag])
    mask = pat.indicator()
    d1, d2 = pat.shape
    rows = []
    for r in cfg.rank_grid:
        est_cfg = EstimatorConfig(rank=r)
        per_trial = {"debiased": {"w": [], "u": []}, "standard": {"w": [], "u": []}}
        for n in range(cfg.trials):
            x = _rank_r_data(rng_from(cfg.master_seed, "real_pattern", "data", r, n), d1, d2, r)
            accum = {"debiased": {"w": [], "u": []}, "standard": {"w": [], "u": []}}
            for t in range(cfg.noise_repeats):
                z = cfg.sigma * rng_from(
                    cfg.master_seed, "real_pattern", "noise", r, n, t
                ).standard_normal((d1, d2))
                y = mask * (x + z)
                deb = debiased_rank_projection(y, pat, w, est_cfg)
                std = standard_rank_projection(y, pat, est_cfg)
                for name, est in (("debiased", deb), ("standard", std)):
                    accum[name]["w"].append(weighted_error(w, x, est.m_hat))
                    accum[name]["u"].append(unweighted_error(x, est.m_hat))
            for name in per_trial:
                per_trial[name]["w"].append(float(np.mean(accum[name]["w"])))
                per_trial[name]["u"].append(float(np.mean(accum[name]["u"])))
        for name in ("debiased", "standard"):
            wm, ws = _mean_std(per_trial[name]["w"])
            um, us = _mean_std(per_trial[name]["u"])
            rows.append(ResultRow(
                experiment=cfg.experiment, d1=d1, d2=d2, method=name,
                master_seed=cfg.master_seed, rank=r,
                weighted_mean=wm, weighted_std=ws,
                unweighted_mean=um, unweighted_std=us, **snapshot,
            ))
    return rows


def run_sample_w(cfg: ExperimentConfig):
    """Flatness sweep: spiky weight family, Bernoulli patterns Omega ~ W."""
    cfg.validate()
    d, r = cfg.d, cfg.data_rank
    rows = []
    for mi, m in enumerate(cfg.m_grid):
        for yi, y in enumerate(cfg.y_grid):
            w = spiky_weight(WeightFamilySpec(d=d, m_target=float(m), y=float(y)))
            diags = []
            per_t = {"debiased": {"w": [], "u": []}, "standard": {"w": [], "u": []}}
            est_cfg = EstimatorConfig(rank=r)
            for t in range(cfg.noise_repeats):
                pat = sample_bernoulli(
                    w, derive_seed_int(cfg.master_seed, "sample_w", "pattern", mi, yi, t)
                )
                diags.append(diagnose(pat, w))
                mask = pat.indicator()
                accum = {"debiased": {"w": [], "u": []}, "standard": {"w": [], "u": []}}
                for n in range(cfg.trials):
                    x = _rank_r_data(rng_from(cfg.master_seed, "sample_w", "data", n), d, d, r)
                    z = cfg.sigma * rng_from(
                        cfg.master_seed, "sample_w", "noise", mi, yi, t, n
                    ).standard_normal((d, d))
                    yobs = mask * (x + z)
                    deb = debiased_rank_projection(yobs, pat, w, est_cfg)
                    std = standard_rank_projection(yobs, pat, est_cfg)
                    for name, est in (("debiased", deb), ("standard", std)):
                        accum[name]["w"].append(weighted_error(w, x, est.m_hat))
                        accum[name]["u"].append(unweighted_error(x, est.m_hat))
                for name in per_t:
                    per_t[name]["w"].append(float(np.mean(accum[name]["w"])))
                    per_t[name]["u"].append(float(np.mean(accum[name]["u"])))
            snapshot = _mean_diag(diags)
            for name in ("debiased", "standard"):
                wm, ws = _mean_std(per_t[name]["w"])
                um, us = _mean_std(per_t[name]["u"])
                rows.append(ResultRow(
                    experiment=cfg.experiment, d1=d, d2=d, method=name,
                    master_seed=cfg.master_seed, m_target=float(m), y=float(y),
                    weighted_mean=wm, weighted_std=ws,
                    unweighted_mean=um, unweighted_std=us, **snapshot,
                ))
    return rows


def _regular_product_weight(pat: SamplePattern, degree: int):
    """Best rank-1 weight for a regular product pattern.

    Disconnected or bipartite factors make the top singular space of the
    indicator degenerate, and the computed singular vector need not be
    positive.  Every rho-regular pattern has sigma1 = degree with the
    flat vector a valid top singular pair, so the flat rank-1 matrix
    attains the same (minimal) Frobenius error; fall back to it.
    """
    try:
        return best_rank1_weight(pat)
    except NonnegativityError:
        d = pat.d1
        p = degree / d
        return WeightMatrix(FactoredVectorPair(np.full(d, p), np.ones(d)))


def spectral_gap_cells(cfg: ExperimentConfig):
    """Per-(rho, draw, kind) detail for the graph-product sweep.

    Within one (rho, draw) all kinds share the random factor and the
    data/noise draws (paired comparison).  Each cell dict carries the
    per-cell mean errors of both methods and the cell's diagnostics.
    """
    cfg.validate()
    k, r = cfg.k, cfg.data_rank
    d = k * k
    cells = []
    est_cfg = EstimatorConfig(rank=r)
    for rho in cfg.rho_grid:
        circ = circulant_regular(k, rho)
        for t in range(cfg.noise_repeats):
            rand = random_regular(
                k, rho, derive_seed_int(cfg.master_seed, "spectral_gap", "graph", rho, t)
            )
            pats = {
                KIND_CIRC_CIRC: tensor_product(circ, circ),
                KIND_CIRC_RAND: tensor_product(circ, rand),
                KIND_RAND_RAND: tensor_product(rand, rand),
            }
            draws = []
            for n in range(cfg.trials):
                x = _rank_r_data(rng_from(cfg.master_seed, "spectral_gap", "data", rho, t, n), d, d, r)
                z = cfg.sigma * rng_from(
                    cfg.master_seed, "spectral_gap", "noise", rho, t, n
                ).standard_normal((d, d))
                draws.append((x, z))
            for kind, pat in pats.items():
                w = _regular_product_weight(pat, rho * rho)
                diag = diagnose(pat, w)
                mask = pat.indicator()
                accum = {"debiased": {"w": [], "u": []}, "standard": {"w": [], "u": []}}
                for x, z in draws:
                    yobs = mask * (x + z)
                    deb = debiased_rank_projection(yobs, pat, w, est_cfg)
                    std = standard_rank_projection(yobs, pat, est_cfg)
                    for name, est in (("debiased", deb), ("standard", std)):
                        accum[name]["w"].append(weighted_error(w, x, est.m_hat))
                        accum[name]["u"].append(unweighted_error(x, est.m_hat))
                cells.append(dict(
                    rho=int(rho), draw=t, kind=kind, diag=diag,
                    debiased_weighted=float(np.mean(accum["debiased"]["w"])),
                    standard_weighted=float(np.mean(accum["standard"]["w"])),
                    debiased_unweighted=float(np.mean(accum["debiased"]["u"])),
                    standard_unweighted=float(np.mean(accum["standard"]["u"])),
                ))
    return cells


def run_spectral_gap(cfg: ExperimentConfig):
    """Graph-product sweep, aggregated per (rho, kind, method) over draws."""
    cells = spectral_gap_cells(cfg)
    rows = []
    for rho in cfg.rho_grid:
        for kind in PRODUCT_KINDS:
            sub = [c for c in cells if c["rho"] == rho and c["kind"] == kind]
            snapshot = _mean_diag([c["diag"] for c in sub])
            for name in ("debiased", "standard"):
                wm, ws = _mean_std([c[f"{name}_weighted"] for c in sub])
                um, us = _mean_std([c[f"{name}_unweighted"] for c in sub])
                rows.append(ResultRow(
                    experiment=cfg.experiment, d1=cfg.k * cfg.k, d2=cfg.k * cfg.k,
                    method=name, master_seed=cfg.master_seed, rho=int(rho),
                    graph_kind=kind, weighted_mean=wm, weighted_std=ws,
                    unweighted_mean=um, unweighted_std=us, **snapshot,
                ))
    return rows


def flat_low_rank(d: int, r: int, scale: float = 2.0):
    """Rank-r matrix with exactly flat row and column leverage scores.

    Columns come in cosine/sine pairs (plus a constant column when r is
    odd) with equal singular values within a pair, which makes each
    leverage sum constant across rows.
    """
    if r < 1 or r > d // 2:
        raise DomainError("need 1 <= r <= d/2 for the flat construction")
    idx = np.arange(d)

    def basis(freq_offset):
        cols, svals = [], []
        pairs, const = divmod(r, 2)
        for p in range(pairs):
            f = p + 1 + freq_offset
            cols.append(np.sqrt(2.0 / d) * np.cos(2 * np.pi * f * idx / d))
            cols.append(np.sqrt(2.0 / d) * np.sin(2 * np.pi * f * idx / d))
            sv = scale * d * 0.9**p
            svals.extend([sv, sv])
        if const:
            cols.append(np.sqrt(1.0 / d) * np.ones(d))
            svals.append(scale * d * 0.625)
        return np.stack(cols, axis=1), np.asarray(svals)

    u, sv = basis(0)
    v, _ = basis(r)  # distinct frequencies on the right factor
    return (u * sv) @ v.T


def run_proportional(cfg: ExperimentConfig):
    """Budget sweep for leverage-proportional sampling recovery."""
    cfg.validate()
    d, r = cfg.d, cfg.data_rank
    x = flat_low_rank(d, r)
    x_norm = float(np.linalg.norm(x))
    rows = []
    for bi, budget in enumerate(cfg.budget_grid):
        rels, realized, expected, clamped = [], [], [], []
        for rep in range(cfg.repeats):
            est_cfg = EstimatorConfig(
                rank=r,
                maxnorm_iterations=cfg.maxnorm_iterations,
                init_seed=derive_seed_int(cfg.master_seed, "proportional", "init", bi, rep),
            )
            x_hat, queried = proportional_sampling_recovery(
                x,
                float(budget),
                derive_seed_int(cfg.master_seed, "proportional", "omega", bi, rep),
                rank_hint=r,
                cfg=est_cfg,
            )
            rels.append(float(np.linalg.norm(x - x_hat)) / x_norm)
            realized.append(queried.size)
            expected.append(queried.meta["expected_samples"])
            clamped.append(queried.meta["clamped_entries"])
        rm, rs = _mean_std(rels)
        rows.append(ResultRow(
            experiment=cfg.experiment, d1=d, d2=d, method="proportional",
            master_seed=cfg.master_seed, rank=r, budget=float(budget),
            rel_error_mean=rm, rel_error_std=rs,
            realized_samples=float(np.mean(realized)),
            expected_samples=float(np.mean(expected)),
            clamped=int(max(clamped)),
        ))
    return rows


def load_weight_file(path) -> WeightMatrix:
    """JSON weight file: {"left": [...], "right": [...]}."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "left" not in data or "right" not in data:
        raise ConfigError("weight file must be a JSON object with 'left' and 'right' arrays")
    return WeightMatrix(FactoredVectorPair(np.asarray(data["left"]), np.asarray(data["right"])))


def run_certify(cfg: ExperimentConfig) -> dict:
    """Diagnostics plus plug-in bounds for a stored pattern, as one record."""
    cfg.validate()
    pattern = SamplePattern.load(cfg.pattern_path)
    if cfg.weight_path:
        w = load_weight_file(cfg.weight_path)
        if w.shape != pattern.shape:
            raise ConfigError(f"weight shape {w.shape} != pattern shape {pattern.shape}")
    else:
        w = best_rank1_weight(pattern)
    report = diagnose(pattern, w)
    bounds = plugin_bounds(report, cfg.bound_rank, cfg.bound_beta, cfg.bound_sigma)
    record = report.to_json_dict()
    bound_record = bounds.to_json_dict()
    record["flags"] = sorted(set(record["flags"]) | set(bound_record.pop("flags")))
    record.update(bound_record)
    return record


RUNNERS = {
    "real_pattern": run_real_pattern,
    "sample_w": run_sample_w,
    "spectral_gap": run_spectral_gap,
    "proportional": run_proportional,
}


def run_experiment(cfg: ExperimentConfig):
    """Dispatch a CSV-producing experiment and write cfg.out."""
    if cfg.experiment == "certify":
        raise ConfigError("use run_certify for certification runs")
    rows = RUNNERS[cfg.experiment](cfg)
    write_csv(cfg.out, rows, cfg)
    return rows
