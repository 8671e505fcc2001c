"""Recovery procedures: debiased rank-r projection, the standard
(inverse-density) projection baseline, the max-norm-constrained debiased
estimator, and proportional (leverage-style) sampling recovery.

Estimators are stateless; each call owns its buffers and may run
concurrently with others on independent inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractError,
    DimensionError,
    DomainError,
    NumericalError,
    ReductionRequiredError,
)
from .linalg import FactoredVectorPair, WeightMatrix, check_matrix, rng_from, truncated_svd
from .patterns import SamplePattern, bernoulli_pattern

DEBIASED_RANK = "debiased_rank"
STANDARD_RANK = "standard_rank"
DEBIASED_MAXNORM = "debiased_maxnorm"
PROPORTIONAL = "proportional"

_FEASIBILITY_SLACK = 1e-9


@dataclass
class EstimatorConfig:
    """Knobs shared by the estimators.

    maxnorm_radius defaults to beta * sqrt(rank) when unset.  The
    max-norm solver draws its factor initialization from init_seed, so a
    fixed config gives bit-identical results.
    """

    rank: int
    beta: float = 1.0
    sigma: float = 0.0
    maxnorm_radius: float | None = None
    maxnorm_iterations: int = 500
    maxnorm_step: float | None = None
    init_seed: int = 0

    def __post_init__(self):
        if self.rank < 1:
            raise DomainError("rank must be >= 1")
        if self.beta <= 0:
            raise DomainError("beta must be positive")
        if self.sigma < 0:
            raise DomainError("sigma must be nonnegative")
        if self.maxnorm_radius is not None and self.maxnorm_radius <= 0:
            raise DomainError("maxnorm_radius must be positive")
        if self.maxnorm_iterations < 1:
            raise DomainError("maxnorm_iterations must be >= 1")
        if self.maxnorm_step is not None and self.maxnorm_step <= 0:
            raise DomainError("maxnorm_step must be positive")

    @property
    def radius(self):
        return self.maxnorm_radius if self.maxnorm_radius is not None else self.beta * math.sqrt(self.rank)


@dataclass
class Estimate:
    """One recovered matrix plus solver bookkeeping."""

    m_hat: np.ndarray
    method: str
    diagnostics_used: object = None
    objective: float | None = None
    iterations: int | None = None
    objective_trace: list = field(default_factory=list)
    max_feasibility_violation: float | None = None


def _check_observation(y, omega: SamplePattern):
    y = check_matrix(y, "y_omega")
    if y.shape != omega.shape:
        raise DimensionError(f"observation shape {y.shape} != pattern shape {omega.shape}")
    off = y.copy()
    off[omega.row_index, omega.col_index] = 0.0
    if off.size and np.abs(off).max() > 0:
        raise ContractError("observation matrix must be zero off the pattern")
    return y


def debiased_rank_projection(y_omega, omega: SamplePattern, w: WeightMatrix, cfg: EstimatorConfig) -> Estimate:
    """W^(-1/2) o [rank-r projection of W^(-1/2) o Y_Omega]."""
    y = _check_observation(y_omega, omega)
    if w.shape != omega.shape:
        raise DimensionError("weight shape mismatch")
    if cfg.rank > min(omega.shape):
        raise DimensionError(f"rank {cfg.rank} exceeds min dimension {min(omega.shape)}")
    inv_sqrt = w.power(-0.5).materialize()
    projected = truncated_svd(y * inv_sqrt, cfg.rank).reconstruct()
    return Estimate(m_hat=inv_sqrt * projected, method=DEBIASED_RANK)


def standard_rank_projection(y_omega, omega: SamplePattern, cfg: EstimatorConfig) -> Estimate:
    """Rank-r projection of the observations scaled by inverse density."""
    y = _check_observation(y_omega, omega)
    if omega.size == 0:
        raise DomainError("standard projection undefined on an empty pattern")
    if cfg.rank > min(omega.shape):
        raise DimensionError(f"rank {cfg.rank} exceeds min dimension {min(omega.shape)}")
    p = omega.size / (omega.d1 * omega.d2)
    projected = truncated_svd(y / p, cfg.rank).reconstruct()
    return Estimate(m_hat=projected, method=STANDARD_RANK)


def _project_rows(m, cap):
    norms = np.linalg.norm(m, axis=1)
    factors = np.minimum(1.0, cap / np.maximum(norms, 1e-300))
    return m * factors[:, None]


def _maxnorm_least_squares(a, radius, k, iterations, step0, rng, tol=1e-14):
    """min ||X - a||_F^2 over X = L R^T with row norms of L, R <= sqrt(radius).

    Projected gradient with step halving on objective increase and mild
    growth on acceptance; the objective is nonincreasing across accepted
    steps.  Returns (x, objective, iterations_used, trace, worst_violation).
    """
    d1, d2 = a.shape
    cap = math.sqrt(radius)
    scale = math.sqrt(radius / (2.0 * k))
    left = _project_rows(rng.standard_normal((d1, k)) * scale, cap)
    right = _project_rows(rng.standard_normal((d2, k)) * scale, cap)
    diff = left @ right.T - a
    obj = float((diff * diff).sum())
    step = step0 if step0 is not None else 1.0 / max(d1, d2)
    trace = [obj]
    worst_violation = 0.0
    used = 0
    for used in range(1, iterations + 1):
        grad_l = 2.0 * diff @ right
        grad_r = 2.0 * diff.T @ left
        accepted = False
        for _ in range(60):
            cand_l = _project_rows(left - step * grad_l, cap)
            cand_r = _project_rows(right - step * grad_r, cap)
            cand_diff = cand_l @ cand_r.T - a
            cand_obj = float((cand_diff * cand_diff).sum())
            if not math.isfinite(cand_obj):
                raise NumericalError(
                    "max-norm solver diverged (non-finite objective)",
                    iterations=used,
                    trace=trace[-10:],
                )
            if cand_obj <= obj:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            # no descent direction at float resolution: stationary point
            break
        improvement = obj - cand_obj
        left, right, diff, obj = cand_l, cand_r, cand_diff, cand_obj
        # feasibility is enforced by the row projection; track the margin
        prod = float(np.linalg.norm(left, axis=1).max() * np.linalg.norm(right, axis=1).max())
        worst_violation = max(worst_violation, prod - radius)
        if prod > radius * (1.0 + _FEASIBILITY_SLACK):
            raise NumericalError(
                f"max-norm feasibility violated: {prod} > {radius}",
                iterations=used,
                trace=trace[-10:],
            )
        trace.append(obj)
        step *= 1.1
        if improvement <= tol * max(obj, 1e-300):
            break
    return left @ right.T, obj, used, trace, worst_violation


def debiased_maxnorm_projection(y_omega, omega: SamplePattern, w: WeightMatrix, cfg: EstimatorConfig) -> Estimate:
    """Debiased estimator constrained to the max-norm ball.

    Approximately solves  argmin_{||X||_max <= radius} ||X - W^(-1/2) o Y_Omega||_F
    by factored projected gradient over X = L R^T with k = min(2r+2, min dim)
    columns, projecting every row of L and R onto the ball of radius
    sqrt(radius) after each step (this enforces the max-norm constraint by
    its factorization definition).  Returns W^(-1/2) o X with the achieved
    squared-Frobenius objective, iteration count, and objective trace
    recorded on the estimate.
    """
    y = _check_observation(y_omega, omega)
    if w.shape != omega.shape:
        raise DimensionError("weight shape mismatch")
    radius = cfg.radius
    k = min(2 * cfg.rank + 2, min(omega.shape))
    inv_sqrt = w.power(-0.5).materialize()
    target = y * inv_sqrt
    x, obj, used, trace, violation = _maxnorm_least_squares(
        target,
        radius,
        k,
        cfg.maxnorm_iterations,
        cfg.maxnorm_step,
        rng_from(cfg.init_seed, "maxnorm-init"),
    )
    return Estimate(
        m_hat=inv_sqrt * x,
        method=DEBIASED_MAXNORM,
        objective=obj,
        iterations=used,
        objective_trace=trace,
        max_feasibility_violation=violation,
    )


def leverage_weight(x, m_budget: float):
    """Rank-1 sampling weight built from SVD leverage factors of x.

    W[i,j] = ||e_i U S^(1/2)||^2 ||e_j V S^(1/2)||^2 / ||x||_*^2 * m.
    Returns (weight, nuclear_norm).  Rows or columns of x with zero
    leverage make the weight degenerate and raise.
    """
    x = check_matrix(x, "x")
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    nuc = float(s.sum())
    if nuc == 0:
        raise DomainError("zero matrix has no leverage weight")
    row_lev = (u * u * s).sum(axis=1)
    col_lev = (vt.T * vt.T * s).sum(axis=1)
    if row_lev.min() <= 0 or col_lev.min() <= 0:
        zr = np.flatnonzero(row_lev <= 0).tolist()
        zc = np.flatnonzero(col_lev <= 0).tolist()
        raise ReductionRequiredError(
            "zero row/column leverage; drop those rows/columns and retry",
            empty_rows=zr,
            empty_cols=zc,
        )
    weight = WeightMatrix(
        FactoredVectorPair(row_lev * (m_budget / nuc**2), col_lev)
    )
    return weight, nuc


def proportional_sampling_recovery(x, m_budget: float, seed, rank_hint: int | None = None,
                                   cfg: EstimatorConfig | None = None):
    """Observe x at entries drawn proportional to its leverage weight and
    reconstruct it with the max-norm debiased estimator.

    Probabilities above 1 are clamped for the Bernoulli draw (count
    recorded in the returned pattern's metadata, with the expected sample
    total); the rank-1 weight itself is kept for debiasing.  Returns
    (x_hat, queried_pattern).
    """
    x = check_matrix(x, "x")
    if m_budget <= 0:
        raise DomainError("m_budget must be positive")
    weight, nuc = leverage_weight(x, m_budget)
    dense_w = weight.materialize()
    probs = np.minimum(dense_w, 1.0)
    clamped = int((dense_w > 1.0).sum())
    omega = bernoulli_pattern(probs, rng_from(seed, "proportional-omega"))
    omega.meta.update(
        clamped_entries=clamped,
        expected_samples=float(probs.sum()),
        budget=float(m_budget),
    )
    if rank_hint is None:
        fro = float(np.linalg.norm(x))
        rank_hint = max(1, round((nuc / fro) ** 2))
    if cfg is None:
        cfg = EstimatorConfig(rank=rank_hint, maxnorm_iterations=2000)
    radius = nuc / math.sqrt(m_budget)
    cfg = EstimatorConfig(
        rank=cfg.rank,
        beta=cfg.beta,
        sigma=0.0,
        maxnorm_radius=radius,
        maxnorm_iterations=cfg.maxnorm_iterations,
        maxnorm_step=cfg.maxnorm_step,
        init_seed=cfg.init_seed,
    )
    m_matrix = x / np.sqrt(dense_w)
    y = np.zeros_like(x)
    y[omega.row_index, omega.col_index] = m_matrix[omega.row_index, omega.col_index]
    est = debiased_maxnorm_projection(y, omega, weight, cfg)
    x_hat = np.sqrt(dense_w) * est.m_hat
    return x_hat, omega
