"""Sampling patterns: the incidence-set type, synthetic generators
(Bernoulli, spiky weight family, circulant bands, random regular graphs,
graph tensor products) and ratings-file ingestion.

Generators are pure given (parameters, seed); ingestion does a single
streaming pass.  All outputs are immutable.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContractError,
    DimensionError,
    DomainError,
    PatternParseError,
    RetryExhaustedError,
)
from .linalg import FactoredVectorPair, WeightMatrix, rng_from

MOVIELENS = "movielens"
JESTER = "jester"

_REGULAR_RETRY_CAP = 1000


class SamplePattern:
    """A set of observed index pairs over a d1 x d2 grid.

    Stores the members as parallel index arrays in lexicographic order;
    duplicates in the input are collapsed.  `meta` carries generator or
    ingestion annotations (duplicate counts, clamp flags) and takes no
    part in equality.
    """

    __slots__ = ("d1", "d2", "row_index", "col_index", "row_counts", "col_counts", "meta", "_mask")

    def __init__(self, d1, d2, rows, cols, meta=None):
        d1, d2 = int(d1), int(d2)
        if d1 < 0 or d2 < 0:
            raise DimensionError("dimensions must be nonnegative")
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        if rows.size != cols.size:
            raise DimensionError("row and column index arrays differ in length")
        if rows.size:
            if rows.min() < 0 or rows.max() >= d1 or cols.min() < 0 or cols.max() >= d2:
                raise DimensionError("index out of range for pattern shape")
            keys = np.unique(rows * d2 + cols)
            rows, cols = keys // d2, keys % d2
        self.d1, self.d2 = d1, d2
        self.row_index, self.col_index = rows, cols
        self.row_counts = np.bincount(rows, minlength=d1) if d1 else np.zeros(0, dtype=np.int64)
        self.col_counts = np.bincount(cols, minlength=d2) if d2 else np.zeros(0, dtype=np.int64)
        self.meta = dict(meta) if meta else {}
        self._mask = None

    @classmethod
    def from_pairs(cls, d1, d2, pairs, meta=None):
        pairs = list(pairs)
        rows = [p[0] for p in pairs]
        cols = [p[1] for p in pairs]
        return cls(d1, d2, rows, cols, meta=meta)

    @classmethod
    def from_mask(cls, mask, meta=None):
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim != 2:
            raise DimensionError("mask must be 2-D")
        rows, cols = np.nonzero(mask)
        return cls(mask.shape[0], mask.shape[1], rows, cols, meta=meta)

    @classmethod
    def full(cls, d1, d2):
        return cls.from_mask(np.ones((d1, d2), dtype=bool))

    @property
    def shape(self):
        return (self.d1, self.d2)

    @property
    def size(self):
        return int(self.row_index.size)

    def __len__(self):
        return self.size

    def __eq__(self, other):
        if not isinstance(other, SamplePattern):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.row_index, other.row_index)
            and np.array_equal(self.col_index, other.col_index)
        )

    def __repr__(self):
        return f"SamplePattern(d1={self.d1}, d2={self.d2}, nnz={self.size})"

    def pairs(self):
        return zip(self.row_index.tolist(), self.col_index.tolist())

    def member_set(self):
        return set(self.pairs())

    def mask(self):
        """Dense boolean membership array (cached)."""
        if self._mask is None:
            m = np.zeros((self.d1, self.d2), dtype=bool)
            m[self.row_index, self.col_index] = True
            self._mask = m
        return self._mask

    def indicator(self):
        """Dense 0/1 float matrix."""
        return self.mask().astype(np.float64)

    def is_symmetric(self):
        if self.d1 != self.d2:
            return False
        swapped = np.unique(self.col_index * self.d2 + self.row_index)
        return np.array_equal(swapped, self.row_index * self.d2 + self.col_index)

    def transpose(self):
        return SamplePattern(self.d2, self.d1, self.col_index, self.row_index, meta=self.meta)

    def empty_rows(self):
        return np.flatnonzero(self.row_counts == 0)

    def empty_cols(self):
        return np.flatnonzero(self.col_counts == 0)

    def reduce(self):
        """Drop empty rows/columns; returns (pattern, kept_rows, kept_cols)."""
        keep_r = np.flatnonzero(self.row_counts > 0)
        keep_c = np.flatnonzero(self.col_counts > 0)
        rmap = np.full(self.d1, -1, dtype=np.int64)
        cmap = np.full(self.d2, -1, dtype=np.int64)
        rmap[keep_r] = np.arange(keep_r.size)
        cmap[keep_c] = np.arange(keep_c.size)
        pat = SamplePattern(
            keep_r.size, keep_c.size, rmap[self.row_index], cmap[self.col_index], meta=self.meta
        )
        return pat, keep_r, keep_c

    def filter_min_counts(self, min_row_count=1, min_col_count=1):
        """Iteratively drop rows/columns observed fewer than the given number
        of times, until stable; returns (pattern, kept_rows, kept_cols).

        kept_rows/kept_cols index into this pattern's rows/columns.
        """
        keep_r = np.arange(self.d1)
        keep_c = np.arange(self.d2)
        pat = self
        while True:
            bad_r = np.flatnonzero(pat.row_counts < min_row_count)
            bad_c = np.flatnonzero(pat.col_counts < min_col_count)
            if bad_r.size == 0 and bad_c.size == 0:
                return pat, keep_r, keep_c
            ok_r = np.flatnonzero(pat.row_counts >= min_row_count)
            ok_c = np.flatnonzero(pat.col_counts >= min_col_count)
            sel = np.isin(pat.row_index, ok_r) & np.isin(pat.col_index, ok_c)
            rmap = np.full(pat.d1, -1, dtype=np.int64)
            cmap = np.full(pat.d2, -1, dtype=np.int64)
            rmap[ok_r] = np.arange(ok_r.size)
            cmap[ok_c] = np.arange(ok_c.size)
            pat = SamplePattern(
                ok_r.size, ok_c.size, rmap[pat.row_index[sel]], cmap[pat.col_index[sel]]
            )
            keep_r = keep_r[ok_r]
            keep_c = keep_c[ok_c]

    def save(self, path):
        """Native pattern file: header "d1 d2 nnz", then 0-indexed "i j" lines."""
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"{self.d1} {self.d2} {self.size}\n")
            for i, j in zip(self.row_index, self.col_index):
                fh.write(f"{i} {j}\n")

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="ascii") as fh:
            header = fh.readline()
            parts = header.split()
            if len(parts) != 3:
                raise PatternParseError("header must be 'd1 d2 nnz'", line=1)
            try:
                d1, d2, nnz = (int(p) for p in parts)
            except ValueError as exc:
                raise PatternParseError(f"bad header: {exc}", line=1) from exc
            rows = np.empty(nnz, dtype=np.int64)
            cols = np.empty(nnz, dtype=np.int64)
            for n in range(nnz):
                line = fh.readline()
                if not line:
                    raise PatternParseError("file ended before nnz pairs", line=n + 2)
                parts = line.split()
                if len(parts) != 2:
                    raise PatternParseError("expected 'i j'", line=n + 2)
                try:
                    rows[n], cols[n] = int(parts[0]), int(parts[1])
                except ValueError as exc:
                    raise PatternParseError(f"bad pair: {exc}", line=n + 2) from exc
        try:
            return cls(d1, d2, rows, cols)
        except DimensionError as exc:
            raise PatternParseError(str(exc)) from exc


def bernoulli_pattern(probs, rng) -> SamplePattern:
    """Independent Bernoulli inclusion from a dense probability matrix."""
    probs = np.asarray(probs, dtype=np.float64)
    return SamplePattern.from_mask(rng.random(probs.shape) < probs)


def sample_bernoulli(w: WeightMatrix, seed) -> SamplePattern:
    """Draw a pattern with (i,j) included independently w.p. W[i,j]."""
    left, right = w.factors.left, w.factors.right
    if left.max() * right.max() > 1.0 + 1e-12:
        raise DomainError("weight entries exceed 1; clamp or rescale before sampling")
    return bernoulli_pattern(w.materialize(), rng_from(seed))


@dataclass(frozen=True)
class WeightFamilySpec:
    """Two-plateau symmetric weight family: w = (f(y,m,d) on the first d/2
    coordinates, y on the rest), with f chosen so the total weight is m.

    The experiment sweeps take m in [4 d log d, d^2/4] and y in
    [sqrt(2/d), sqrt(log d / d)]; the type itself only requires both
    plateau values to land in (0, 1].
    """

    d: int
    m_target: float
    y: float

    def __post_init__(self):
        if self.d <= 0 or self.d % 2:
            raise DomainError("d must be a positive even integer")
        if not 0 < self.y <= 1:
            raise DomainError("y must lie in (0, 1]")
        if not 0 < self.f <= 1:
            raise DomainError(f"f(y,m,d) = {self.f:.6g} must lie in (0, 1]")

    @property
    def f(self):
        return 2.0 * math.sqrt(self.m_target) / self.d - self.y


def spiky_weight(spec: WeightFamilySpec) -> WeightMatrix:
    """Symmetric rank-1 weight W = w w^T with ||w||_1 = sqrt(m)."""
    half = spec.d // 2
    w = np.concatenate([np.full(half, spec.f), np.full(half, spec.y)])
    return WeightMatrix(FactoredVectorPair(w, w))


def circulant_band(d: int, t: int) -> SamplePattern:
    """Symmetric circulant whose first row has (t+1)/2 leading and
    (t-1)/2 trailing ones; t odd, so every row and column has t members.

    Its largest eigenvalue is t and the eigenvectors are the discrete
    cosine basis.
    """
    if t % 2 == 0:
        raise DomainError("band count t must be odd")
    if not 1 <= t <= d:
        raise DomainError(f"need 1 <= t <= d, got t={t}, d={d}")
    shifts = np.concatenate([np.arange((t + 1) // 2), d - 1 - np.arange((t - 1) // 2)])
    base = np.arange(d)
    rows = np.repeat(base, shifts.size)
    cols = (rows + np.tile(shifts, d)) % d
    return SamplePattern(d, d, rows, cols)


def circulant_regular(k: int, rho: int) -> SamplePattern:
    """Zero-diagonal rho-regular circulant: neighbors at cyclic shifts
    +-1..rho/2, plus the antipodal vertex when rho is odd (k even).

    Degenerates to the complete graph (minus the diagonal) at rho = k-1.
    """
    if not 1 <= rho < k:
        raise DomainError(f"need 1 <= rho < k, got rho={rho}, k={k}")
    if rho % 2 and k % 2:
        raise DomainError("odd regularity requires an even vertex count")
    shifts = list(range(1, rho // 2 + 1))
    shifts += [k - s for s in shifts]
    if rho % 2:
        shifts.append(k // 2)
    shifts = np.asarray(sorted(shifts), dtype=np.int64)
    base = np.arange(k)
    rows = np.repeat(base, shifts.size)
    cols = (rows + np.tile(shifts, k)) % k
    return SamplePattern(k, k, rows, cols)


def _suitable(edges, potential):
    # remaining stubs can still be paired without repeats or self-loops
    if not potential:
        return True
    for s1 in potential:
        for s2 in potential:
            if s1 == s2:
                break
            a, b = (s2, s1) if s1 > s2 else (s1, s2)
            if (a, b) not in edges:
                return True
    return False


def random_regular(k: int, rho: int, seed) -> SamplePattern:
    """Uniform-ish random simple rho-regular graph on k vertices.

    Pairing (configuration) model: pair stubs at random, keep the simple
    edges, and re-pair only the colliding stubs each round; restart when
    the remaining stubs cannot be completed.  Restart cap 1000.
    """
    if not 0 <= rho < k:
        raise DomainError(f"need 0 <= rho < k, got rho={rho}, k={k}")
    if (k * rho) % 2:
        raise DomainError("k * rho must be even")
    rng = rng_from(seed)

    def try_creation():
        edges = set()
        stubs = list(range(k)) * rho
        while stubs:
            potential = defaultdict(int)
            stubs = [int(s) for s in rng.permutation(stubs)]
            it = iter(stubs)
            for s1, s2 in zip(it, it):
                if s1 > s2:
                    s1, s2 = s2, s1
                if s1 != s2 and (s1, s2) not in edges:
                    edges.add((s1, s2))
                else:
                    potential[s1] += 1
                    potential[s2] += 1
            if not _suitable(edges, potential):
                return None
            stubs = [v for v, c in potential.items() for _ in range(c)]
        return edges

    for _ in range(_REGULAR_RETRY_CAP):
        edges = try_creation()
        if edges is not None:
            mask = np.zeros((k, k), dtype=bool)
            for u, v in edges:
                mask[u, v] = mask[v, u] = True
            return SamplePattern.from_mask(mask)
    raise RetryExhaustedError(f"no simple {rho}-regular graph found in {_REGULAR_RETRY_CAP} restarts")


def tensor_product(a: SamplePattern, b: SamplePattern) -> SamplePattern:
    """Kronecker product of two square symmetric patterns.

    ((i1,i2),(j1,j2)) is a member iff (i1,j1) in a and (i2,j2) in b;
    eigenvalues of the indicator are the pairwise products.
    """
    for name, p in (("a", a), ("b", b)):
        if p.d1 != p.d2:
            raise ContractError(f"{name} must be square")
        if not p.is_symmetric():
            raise ContractError(f"{name} must be symmetric")
    return SamplePattern.from_mask(np.kron(a.mask(), b.mask()))


CIRCULANT_BAND = "circulant_band"
RANDOM_REGULAR = "random_regular"
TENSOR_PRODUCT = "tensor_product"


@dataclass(frozen=True)
class GraphSpec:
    """Description of one pattern-generating graph."""

    kind: str
    k: int = 0
    rho: int = 0
    sub_specs: tuple = ()
    seed: int = 0

    def build(self) -> SamplePattern:
        if self.kind == CIRCULANT_BAND:
            return circulant_band(self.k, self.rho)
        if self.kind == RANDOM_REGULAR:
            return random_regular(self.k, self.rho, self.seed)
        if self.kind == TENSOR_PRODUCT:
            if len(self.sub_specs) != 2:
                raise DomainError("tensor product needs exactly two sub-specs")
            return tensor_product(self.sub_specs[0].build(), self.sub_specs[1].build())
        raise DomainError(f"unknown graph kind: {self.kind}")


@dataclass
class IngestResult:
    """Pattern plus the dense re-indexing of the file's sparse ids."""

    pattern: SamplePattern
    user_ids: list
    item_ids: list
    duplicates: int = 0


def _ingest_movielens(path):
    seen = {}
    duplicates = 0
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise PatternParseError("expected tab-separated 'user item rating timestamp'", line=ln)
            try:
                user, item = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise PatternParseError(f"bad ids: {exc}", line=ln) from exc
            if (user, item) in seen:
                duplicates += 1
            else:
                seen[(user, item)] = None
    return list(seen), duplicates


def _ingest_jester(path):
    pairs = []
    duplicates = 0
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != 101:
                raise PatternParseError(
                    f"expected 101 comma-separated fields, got {len(parts)}", line=ln
                )
            try:
                values = [float(p) for p in parts[1:]]
            except ValueError as exc:
                raise PatternParseError(f"bad rating value: {exc}", line=ln) from exc
            user = ln - 1
            for j, v in enumerate(values):
                if v != 99.0:
                    pairs.append((user, j))
    return pairs, duplicates


def ingest_ratings(path, format: str) -> IngestResult:
    """Read a ratings file and return the observed (user, item) pattern.

    MovieLens lines are "user \\t item \\t rating \\t timestamp"; Jester is
    a comma-separated grid whose first column counts ratings and whose
    sentinel 99 marks an unrated item.  Duplicate (user, item) pairs are
    collapsed silently with a count in the result and pattern metadata.
    """
    if format == MOVIELENS:
        pairs, duplicates = _ingest_movielens(path)
    elif format == JESTER:
        pairs, duplicates = _ingest_jester(path)
    else:
        raise DomainError(f"unknown ratings format: {format}")
    if not pairs:
        empty = SamplePattern(0, 0, [], [], meta={"duplicates": duplicates})
        return IngestResult(empty, [], [], duplicates)
    users = sorted({u for u, _ in pairs})
    items = sorted({i for _, i in pairs})
    umap = {u: n for n, u in enumerate(users)}
    imap = {i: n for n, i in enumerate(items)}
    rows = [umap[u] for u, i in pairs]
    cols = [imap[i] for u, i in pairs]
    pattern = SamplePattern(
        len(users), len(items), rows, cols, meta={"duplicates": duplicates}
    )
    return IngestResult(pattern, users, items, duplicates)
