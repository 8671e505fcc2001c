"""Dense linear-algebra kernels: Hadamard products, truncated SVD,
operator norms, top eigenpairs, and seeded Gaussian sampling.

All operations are pure functions on immutable inputs.  Tolerances used
throughout the package: 1e-8 for orthonormality, 1e-6 for eigen/singular
residuals, 1e-12 for exact algebraic identities.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DimensionError, DomainError, NumericalError

ORTHONORMAL_TOL = 1e-8
RESIDUAL_TOL = 1e-6
EXACT_TOL = 1e-12

_SYMMETRY_TOL = 1e-10


def check_matrix(a, name="matrix"):
    """Coerce to a 2-D float64 array and enforce finiteness."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={a.ndim}")
    if a.size and not np.isfinite(a).all():
        raise DomainError(f"{name} contains NaN or Inf entries")
    return a


def _check_vector(v, name):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got ndim={v.ndim}")
    return v


@dataclass(frozen=True)
class FactoredVectorPair:
    """A rank-1 matrix left @ right.T stored as its two factor vectors."""

    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "left", _check_vector(self.left, "left"))
        object.__setattr__(self, "right", _check_vector(self.right, "right"))

    @property
    def shape(self):
        return (self.left.size, self.right.size)

    def materialize(self):
        return np.outer(self.left, self.right)


@dataclass(frozen=True)
class WeightMatrix:
    """Strictly positive rank-1 weight matrix W = left @ right.T."""

    factors: FactoredVectorPair

    def __post_init__(self):
        f = self.factors
        if f.left.size == 0 or f.right.size == 0:
            raise DimensionError("weight matrix must be non-empty")
        if f.left.max() < 0 and f.right.max() < 0:
            # canonicalize a doubly-negative factorization
            f = FactoredVectorPair(-f.left, -f.right)
            object.__setattr__(self, "factors", f)
        if f.left.min() <= 0 or f.right.min() <= 0:
            raise DomainError("weight matrix entries must be strictly positive")

    @classmethod
    def from_vectors(cls, left, right):
        return cls(FactoredVectorPair(left, right))

    @property
    def shape(self):
        return self.factors.shape

    def materialize(self):
        return self.factors.materialize()

    def power(self, exponent):
        """Entrywise power, returned as a new WeightMatrix."""
        return WeightMatrix(hadamard_power(self.factors, exponent))

    def total(self):
        """Sum of all entries; equals ||W^(1/2)||_F^2 for positive W."""
        return float(self.factors.left.sum() * self.factors.right.sum())


def hadamard(a, b):
    """Entrywise product of two equal-shape matrices."""
    a = check_matrix(a, "a")
    b = check_matrix(b, "b")
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a * b


def hadamard_power(pair: FactoredVectorPair, exponent: float) -> FactoredVectorPair:
    """Entrywise power of the rank-1 matrix represented by `pair`.

    Requires strictly positive factor entries when the exponent is
    negative (the entrywise inverse is undefined otherwise).
    """
    if exponent < 0 and (pair.left.min() <= 0 or pair.right.min() <= 0):
        raise DomainError("negative exponent requires strictly positive factors")
    return FactoredVectorPair(pair.left**exponent, pair.right**exponent)


@dataclass(frozen=True)
class SvdTriple:
    """Top-r singular triple with orthonormal factor columns."""

    u_factors: np.ndarray
    singular_values: np.ndarray
    v_factors: np.ndarray

    @property
    def rank(self):
        return self.singular_values.size

    def reconstruct(self):
        return (self.u_factors * self.singular_values) @ self.v_factors.T


def truncated_svd(a, r: int) -> SvdTriple:
    """Best rank-r approximation factors of a dense matrix.

    Deterministic given the input.  The reconstruction is a minimizer of
    both the Frobenius and operator-norm error over rank-r matrices.
    """
    a = check_matrix(a, "a")
    if not 1 <= r <= min(a.shape):
        raise DimensionError(f"rank {r} out of range for shape {a.shape}")
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed to converge: {exc}") from exc
    return SvdTriple(u[:, :r].copy(), s[:r].copy(), vt[:r].T.copy())


def operator_norm(a, tol: float = 1e-8) -> float:
    """Largest singular value, within relative tolerance `tol`."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    a = check_matrix(a, "a")
    if a.size == 0:
        return 0.0
    try:
        s = np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular values failed to converge: {exc}") from exc
    return float(s[0])


def top_two_eigenpairs(a):
    """Top two eigenpairs by magnitude of a symmetric matrix.

    Returns (lam1, v1, lam2, v2) with |lam1| >= |lam2| >= remaining
    magnitudes, unit eigenvectors, and v1 sign-normalized so that its
    entry sum is nonnegative (v2 likewise, for determinism).  Ties are
    broken by the deterministic solver ordering; downstream diagnostics
    depend only on |lam2|.
    """
    a = check_matrix(a, "a")
    d1, d2 = a.shape
    if d1 != d2:
        raise DimensionError(f"square matrix required, got {a.shape}")
    if d1 < 2:
        raise DimensionError("need dimension >= 2 for two eigenpairs")
    scale = max(1.0, np.abs(a).max())
    if np.abs(a - a.T).max() > _SYMMETRY_TOL * scale:
        raise ContractError("matrix is not symmetric to 1e-10")
    try:
        evals, evecs = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(-np.abs(evals), kind="stable")
    out = []
    for idx in order[:2]:
        lam = float(evals[idx])
        v = evecs[:, idx].copy()
        s = v.sum()
        flip = s < 0
        if s == 0:
            nz = np.flatnonzero(v)
            flip = nz.size > 0 and v[nz[0]] < 0
        if flip:
            v = -v
        out.append((lam, v))
    (lam1, v1), (lam2, v2) = out
    return lam1, v1, lam2, v2


def gaussian_matrix(d1: int, d2: int, sigma: float, seed) -> np.ndarray:
    """d1 x d2 matrix of i.i.d. normal(0, sigma^2) entries; reproducible."""
    if d1 <= 0 or d2 <= 0:
        raise DimensionError("dimensions must be positive")
    if sigma < 0:
        raise DomainError("sigma must be nonnegative")
    return sigma * rng_from(seed).standard_normal((d1, d2))


def _entropy_word(part) -> int:
    """Map one seed-path component to a stable unsigned 64-bit word."""
    if isinstance(part, (int, np.integer)):
        if not 0 <= int(part) < 2**64:
            raise DomainError("integer seed components must be unsigned 64-bit")
        return int(part)
    digest = hashlib.blake2s(str(part).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def rng_from(seed, *path) -> np.random.Generator:
    """Seeded generator; identical (seed, path) gives a bit-identical stream.

    Derivation scheme: every component (the master seed plus any number of
    path elements such as an experiment id or trial counters) is mapped to
    an unsigned 64-bit word (strings via blake2s) and the word sequence
    seeds a PCG64 through numpy's SeedSequence.  No global RNG state.
    """
    words = [_entropy_word(seed)] + [_entropy_word(p) for p in path]
    return np.random.default_rng(np.random.SeedSequence(words))
