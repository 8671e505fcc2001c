"""Certifiable pattern/weight diagnostics.

The two scalars that govern recovery quality for a pattern Omega and a
rank-1 positive weight W:

  lambda = || W^(1/2) - W^(-1/2) o 1_Omega ||   (operator norm)
  mu^2   = max over rows/columns of the sums of 1/W over Omega

together with m = sum(W) (the squared Frobenius mass of W^(1/2)), the
top two eigenvalues of 1_Omega for symmetric square patterns, the
weighted/unweighted error metrics, and plug-in evaluation of the upper
bound formulas.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CapacityError,
    DimensionError,
    DomainError,
    NonnegativityError,
    ReductionRequiredError,
)
from .linalg import (
    FactoredVectorPair,
    WeightMatrix,
    check_matrix,
    operator_norm,
    top_two_eigenpairs,
    truncated_svd,
)
from .patterns import SamplePattern

# Dense materializations are refused beyond desk scale.  Square-ish
# matrices are capped at 2048 per side; tall-thin ratings patterns
# (e.g. 73k x 100) are allowed up to an absolute entry budget.
_DENSE_SIDE_CAP = 2048
_DENSE_ENTRY_CAP = 32_000_000

_CLAMP_FLOOR = 1e-10


def _check_dense_capacity(d1, d2, what):
    if min(d1, d2) > _DENSE_SIDE_CAP or d1 * d2 > _DENSE_ENTRY_CAP:
        raise CapacityError(
            f"{what} would materialize a {d1}x{d2} dense matrix; "
            f"the desk-scale guard allows min-side <= {_DENSE_SIDE_CAP} "
            f"and at most {_DENSE_ENTRY_CAP} entries"
        )


def _check_shapes(omega: SamplePattern, w: WeightMatrix):
    if omega.shape != w.shape:
        raise DimensionError(f"pattern shape {omega.shape} != weight shape {w.shape}")


def compute_lambda(omega: SamplePattern, w: WeightMatrix) -> float:
    """Operator norm of W^(1/2) - W^(-1/2) o 1_Omega.

    Zero exactly when the indicator of Omega equals W; grows as the
    pattern and the weight disagree.
    """
    _check_shapes(omega, w)
    d1, d2 = omega.shape
    _check_dense_capacity(d1, d2, "lambda")
    sqrt_w = w.power(0.5)
    dense = sqrt_w.materialize()
    rows, cols = omega.row_index, omega.col_index
    dense[rows, cols] -= 1.0 / (sqrt_w.factors.left[rows] * sqrt_w.factors.right[cols])
    return operator_norm(dense)


def compute_mu(omega: SamplePattern, w: WeightMatrix) -> float:
    """Square root of the worst row/column sum of 1/W over Omega."""
    _check_shapes(omega, w)
    if omega.size == 0:
        return 0.0
    inv = 1.0 / (w.factors.left[omega.row_index] * w.factors.right[omega.col_index])
    row_sums = np.bincount(omega.row_index, weights=inv, minlength=omega.d1)
    col_sums = np.bincount(omega.col_index, weights=inv, minlength=omega.d2)
    return float(math.sqrt(max(row_sums.max(), col_sums.max())))


def weighted_error(w: WeightMatrix, m_true, m_hat) -> float:
    """Weighted per-entry RMS error: (sum W (M - Mhat)^2 / sum W)^(1/2)."""
    m_true = check_matrix(m_true, "m_true")
    m_hat = check_matrix(m_hat, "m_hat")
    if m_true.shape != m_hat.shape or m_true.shape != w.shape:
        raise DimensionError("weighted_error shapes disagree")
    diff2 = (m_true - m_hat) ** 2
    num = float(w.factors.left @ diff2 @ w.factors.right)
    return math.sqrt(max(num, 0.0) / w.total())


def unweighted_error(m_true, m_hat) -> float:
    """||M - Mhat||_F / sqrt(d1 d2)."""
    m_true = check_matrix(m_true, "m_true")
    m_hat = check_matrix(m_hat, "m_hat")
    if m_true.shape != m_hat.shape:
        raise DimensionError("unweighted_error shapes disagree")
    return float(np.linalg.norm(m_true - m_hat) / math.sqrt(m_true.size))


def best_rank1_weight(omega: SamplePattern) -> WeightMatrix:
    """Best rank-1 approximation to 1_Omega, as a positive weight matrix.

    The factors are sqrt(sigma1) times the top singular vectors,
    sign-normalized to be entrywise positive.  Entries within 1e-10 of
    zero are clamped up to 1e-10 (Perron noise on connected patterns);
    anything more negative raises.
    """
    empty_r, empty_c = omega.empty_rows(), omega.empty_cols()
    if empty_r.size or empty_c.size:
        raise ReductionRequiredError(
            "pattern has empty rows/columns; drop them (reduce()) and rebuild "
            "the weight on the smaller problem",
            empty_rows=empty_r.tolist(),
            empty_cols=empty_c.tolist(),
        )
    _check_dense_capacity(omega.d1, omega.d2, "best_rank1_weight")
    triple = truncated_svd(omega.indicator(), 1)
    left = math.sqrt(triple.singular_values[0]) * triple.u_factors[:, 0]
    right = math.sqrt(triple.singular_values[0]) * triple.v_factors[:, 0]
    if left.sum() < 0:
        left, right = -left, -right
    worst = min(left.min(), right.min())
    if worst < -_CLAMP_FLOOR:
        raise NonnegativityError(
            f"top singular factor has entry {worst:.3e} < -1e-10; "
            "pattern is not Perron-compatible at numerical tolerance"
        )
    left = np.maximum(left, _CLAMP_FLOOR)
    right = np.maximum(right, _CLAMP_FLOOR)
    return WeightMatrix(FactoredVectorPair(left, right))


@dataclass
class DiagnosticsReport:
    """All computed certification parameters for one (Omega, W) pair.

    lambda1/lambda2 are populated only for square symmetric patterns;
    the None marker is deliberate (never zero) so gap-based bounds
    cannot be misused on rectangular problems.
    """

    lambda_: float
    mu: float
    m: float
    sample_count: int
    d1: int
    d2: int
    lambda1: float | None = None
    lambda2: float | None = None
    gap: float | None = None
    flags: list = field(default_factory=list)

    def to_json_dict(self):
        out = {
            "lambda": self.lambda_,
            "mu": self.mu,
            "m": self.m,
            "sample_count": self.sample_count,
            "d1": self.d1,
            "d2": self.d2,
            "flags": list(self.flags),
        }
        if self.lambda1 is not None:
            out["lambda1"] = self.lambda1
            out["lambda2"] = self.lambda2
            out["gap"] = self.gap
        return out

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)


def diagnose(omega: SamplePattern, w: WeightMatrix) -> DiagnosticsReport:
    """Full diagnostics for a pattern/weight pair."""
    _check_shapes(omega, w)
    flags = []
    lam1 = lam2 = gap = None
    if omega.d1 == omega.d2 and omega.is_symmetric():
        l1, _, l2, _ = top_two_eigenpairs(omega.indicator())
        lam1, lam2 = float(l1), float(l2)
        gap = lam1 - lam2
    else:
        flags.append("asymmetric_pattern_no_eigenvalues")
    return DiagnosticsReport(
        lambda_=compute_lambda(omega, w),
        mu=compute_mu(omega, w),
        m=w.total(),
        sample_count=omega.size,
        d1=omega.d1,
        d2=omega.d2,
        lambda1=lam1,
        lambda2=lam2,
        gap=gap,
        flags=flags,
    )


@dataclass
class PluginBounds:
    """Normalized plug-in error bounds evaluated from a report.

    rank_bound carries explicit constants; maxnorm_bound and gap_bound
    have unspecified leading constants, reported with the constant set to
    1 and flagged "up to constant".
    """

    rank_bound: float
    maxnorm_bound: float
    gap_bound: float | None
    flags: list

    def to_json_dict(self):
        out = {
            "rank_bound": self.rank_bound,
            "maxnorm_bound": self.maxnorm_bound,
            "flags": list(self.flags),
        }
        if self.gap_bound is not None:
            out["gap_bound"] = self.gap_bound
        return out


def plugin_bounds(report: DiagnosticsReport, r: int, beta: float, sigma: float) -> PluginBounds:
    """Evaluate the upper-bound right-hand sides at the measured parameters.

    All values are in the normalized (per-entry) form.  The rank-r and
    max-norm formulas bound the unnormalized weighted error and are
    divided by sqrt(m); the spectral-gap formula is already normalized.
    """
    if r < 1:
        raise DomainError("r must be >= 1")
    if beta <= 0:
        raise DomainError("beta must be positive")
    if sigma < 0:
        raise DomainError("sigma must be nonnegative")
    log_d = math.log(report.d1 + report.d2)
    sqrt_m = math.sqrt(report.m)
    rank_unnorm = (
        2.0 * math.sqrt(2.0) * r * report.lambda_ * beta
        + 4.0 * math.sqrt(2.0) * sigma * report.mu * math.sqrt(r * log_d)
    )
    maxnorm_unnorm = math.sqrt(sqrt_m) * (
        beta * math.sqrt(r * report.lambda_)
        + math.sqrt(beta * sigma) * (report.mu**2 * r * log_d) ** 0.25
    )
    flags = ["maxnorm_bound_up_to_constant"]
    gap_bound = None
    if report.lambda1 is not None and report.lambda1 > 0:
        gap_bound = r * (abs(report.lambda2) / report.lambda1) + sigma * math.sqrt(
            r * math.log(report.d1) / report.lambda1
        )
        flags.append("gap_bound_up_to_constant")
    return PluginBounds(
        rank_bound=rank_unnorm / sqrt_m,
        maxnorm_bound=maxnorm_unnorm / sqrt_m,
        gap_bound=gap_bound,
        flags=flags,
    )
