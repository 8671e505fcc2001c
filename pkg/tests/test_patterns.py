import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import write_jester, write_movielens
from wmc.errors import (
    ContractError,
    DimensionError,
    DomainError,
    PatternParseError,
    RetryExhaustedError,
)
from wmc.linalg import FactoredVectorPair, WeightMatrix, top_two_eigenpairs
from wmc.patterns import (
    JESTER,
    MOVIELENS,
    GraphSpec,
    SamplePattern,
    WeightFamilySpec,
    circulant_band,
    circulant_regular,
    ingest_ratings,
    random_regular,
    sample_bernoulli,
    spiky_weight,
    tensor_product,
)

# ---------------------------------------------------------------- oracles


def shift_pairs(pairs, d):
    return {((i + 1) % d, (j + 1) % d) for i, j in pairs}


# ------------------------------------------------------------ SamplePattern


def test_pattern_dedups_and_sorts():
    p = SamplePattern.from_pairs(3, 3, [(2, 1), (0, 0), (2, 1), (1, 2)])
    assert p.size == 3
    assert list(p.pairs()) == [(0, 0), (1, 2), (2, 1)]
    assert p.row_counts.tolist() == [1, 1, 1]
    assert p.col_counts.tolist() == [1, 1, 1]


def test_pattern_rejects_out_of_range():
    with pytest.raises(DimensionError):
        SamplePattern.from_pairs(2, 2, [(0, 2)])


def test_pattern_symmetry_checks():
    sym = SamplePattern.from_pairs(3, 3, [(0, 1), (1, 0), (2, 2)])
    asym = SamplePattern.from_pairs(3, 3, [(0, 1)])
    assert sym.is_symmetric()
    assert not asym.is_symmetric()
    assert not SamplePattern.full(2, 3).is_symmetric()


def test_pattern_reduce_drops_empty_lines():
    p = SamplePattern.from_pairs(4, 4, [(1, 1), (1, 3), (3, 3)])
    red, rows, cols = p.reduce()
    assert red.shape == (2, 2)
    assert rows.tolist() == [1, 3] and cols.tolist() == [1, 3]
    assert set(red.pairs()) == {(0, 0), (0, 1), (1, 1)}


def test_pattern_filter_min_counts_iterates():
    # dropping the weak column empties row 2, which must then go too
    p = SamplePattern.from_pairs(3, 3, [(0, 0), (1, 0), (2, 1), (0, 2), (1, 2)])
    filt, rows, cols = p.filter_min_counts(min_row_count=2, min_col_count=2)
    assert rows.tolist() == [0, 1]
    assert cols.tolist() == [0, 2]
    assert filt.size == 4


def test_pattern_file_roundtrip(tmp_path):
    p = SamplePattern.from_pairs(5, 4, [(0, 3), (2, 1), (4, 0)])
    path = tmp_path / "omega.pat"
    p.save(path)
    q = SamplePattern.load(path)
    assert q == p


def test_pattern_file_parse_errors(tmp_path):
    bad = tmp_path / "bad.pat"
    bad.write_text("2 2\n")
    with pytest.raises(PatternParseError) as err:
        SamplePattern.load(bad)
    assert err.value.line == 1
    bad.write_text("2 2 2\n0 0\n0 x\n")
    with pytest.raises(PatternParseError) as err:
        SamplePattern.load(bad)
    assert err.value.line == 3


# ------------------------------------------------------------ circulant_band


def test_circulant_full_when_t_equals_d():
    assert circulant_band(5, 5) == SamplePattern.full(5, 5)


def test_circulant_first_row_members():
    p = circulant_band(9, 3)
    row0 = sorted(j for i, j in p.pairs() if i == 0)
    assert row0 == [0, 1, 8]


def test_circulant_row_counts_and_symmetry():
    p = circulant_band(11, 5)
    assert (p.row_counts == 5).all() and (p.col_counts == 5).all()
    assert p.is_symmetric()


def test_circulant_top_eigenvalue_is_t():
    p = circulant_band(12, 7)
    lam1, _, _, _ = top_two_eigenpairs(p.indicator())
    assert lam1 == pytest.approx(7.0, rel=1e-10)


def test_circulant_shift_invariance():
    d, t = 10, 3
    p = circulant_band(d, t)
    assert shift_pairs(p.member_set(), d) == p.member_set()


def test_circulant_rejects_even_t():
    with pytest.raises(DomainError):
        circulant_band(8, 4)


# --------------------------------------------------------- circulant_regular


def test_circulant_regular_degenerates_to_complete():
    k = 8
    p = circulant_regular(k, k - 1)
    assert p == SamplePattern.from_mask(~np.eye(k, dtype=bool))


def test_circulant_regular_degree_and_no_diagonal():
    p = circulant_regular(24, 12)
    assert (p.row_counts == 12).all()
    assert p.is_symmetric()
    assert not np.diag(p.mask()).any()


def test_circulant_regular_odd_needs_even_k():
    with pytest.raises(DomainError):
        circulant_regular(9, 3)


# ------------------------------------------------------------ random_regular


def test_random_regular_complete_graph():
    p = random_regular(6, 5, seed=0)
    assert p == SamplePattern.from_mask(~np.eye(6, dtype=bool))


def test_random_regular_contract():
    p = random_regular(50, 3, seed=11)
    assert (p.row_counts == 3).all() and (p.col_counts == 3).all()
    assert p.is_symmetric()
    assert not np.diag(p.mask()).any()


def test_random_regular_parity_error():
    with pytest.raises(DomainError):
        random_regular(5, 3, seed=0)


def test_random_regular_distinct_seeds_rarely_collide():
    collisions = 0
    for s in range(100):
        a = random_regular(50, 3, seed=(2 * s, "a"))
        b = random_regular(50, 3, seed=(2 * s, "b"))
        collisions += a == b
    # number of 3-regular graphs on 50 vertices is astronomically large
    assert collisions <= 1


def test_random_regular_deterministic():
    assert random_regular(20, 4, seed=3) == random_regular(20, 4, seed=3)


def test_random_regular_dense_regularity():
    # dense case exercises the partial re-pairing rounds
    p = random_regular(24, 12, seed=5)
    assert (p.row_counts == 12).all()


# ------------------------------------------------------------ tensor_product


def test_tensor_with_single_vertex_loop_is_isomorphic():
    a = circulant_band(7, 3)
    one = SamplePattern.full(1, 1)
    assert tensor_product(a, one).member_set() == a.member_set()


def test_tensor_member_count_multiplies():
    a = circulant_band(6, 3)
    b = random_regular(5, 2, seed=1)
    assert tensor_product(a, b).size == a.size * b.size


def test_tensor_top_eigenvalue_multiplies():
    a = circulant_band(9, 3)
    b = random_regular(10, 4, seed=2)
    prod = tensor_product(a, b)
    la, _, _, _ = top_two_eigenpairs(a.indicator())
    lb, _, _, _ = top_two_eigenpairs(b.indicator())
    lp, _, _, _ = top_two_eigenpairs(prod.indicator())
    assert lp == pytest.approx(la * lb, rel=1e-9)


@given(st.integers(min_value=1, max_value=3), st.integers(min_value=1, max_value=4))
def test_tensor_row_counts_are_products(ta, kb):
    a = circulant_band(7, 2 * ta + 1)
    b = circulant_band(9, 2 * kb + 1)
    prod = tensor_product(a, b)
    expect = np.outer(a.row_counts, b.row_counts).ravel()
    assert np.array_equal(prod.row_counts, expect)


def test_tensor_rejects_rectangular():
    with pytest.raises(ContractError):
        tensor_product(SamplePattern.full(2, 3), SamplePattern.full(2, 2))


def test_graph_spec_builds_products():
    spec = GraphSpec(
        kind="tensor_product",
        sub_specs=(
            GraphSpec(kind="circulant_band", k=6, rho=3),
            GraphSpec(kind="random_regular", k=6, rho=2, seed=4),
        ),
    )
    pat = spec.build()
    assert pat.shape == (36, 36)
    assert pat.size == 6 * 3 * 6 * 2


# ---------------------------------------------------------- sample_bernoulli


def test_sample_bernoulli_all_ones_gives_full():
    w = WeightMatrix(FactoredVectorPair(np.ones(6), np.ones(4)))
    assert sample_bernoulli(w, 0) == SamplePattern.full(6, 4)


def test_sample_bernoulli_vanishing_probability():
    w = WeightMatrix(FactoredVectorPair(np.full(100, 1e-9), np.ones(100)))
    total = sum(sample_bernoulli(w, s).size for s in range(100))
    # oracle: Binomial(1e6, 1e-9); P(total > 3) < 1e-12
    assert total <= 3


def test_sample_bernoulli_rejects_excess_probability():
    w = WeightMatrix(FactoredVectorPair(np.full(3, 1.5), np.ones(3)))
    with pytest.raises(DomainError):
        sample_bernoulli(w, 0)


def test_sample_bernoulli_deterministic():
    w = WeightMatrix(FactoredVectorPair(np.full(20, 0.4), np.full(20, 0.9)))
    assert sample_bernoulli(w, 9) == sample_bernoulli(w, 9)


def test_sample_bernoulli_entry_frequency_in_binomial_ci():
    p = 0.4 * 0.9
    w = WeightMatrix(FactoredVectorPair(np.full(8, 0.4), np.full(8, 0.9)))
    n_seeds = 2000
    hits = sum((1, 5) in sample_bernoulli(w, s).member_set() for s in range(n_seeds))
    half_width = 4 * np.sqrt(p * (1 - p) / n_seeds)
    assert abs(hits / n_seeds - p) <= half_width


# ------------------------------------------------------------- spiky_weight


def test_spiky_weight_flat_point():
    # y = sqrt(m)/d makes both plateaus equal
    d, m = 10, 25.0
    spec = WeightFamilySpec(d=d, m_target=m, y=np.sqrt(m) / d)
    w = spiky_weight(spec)
    assert np.allclose(w.factors.left, 0.5 * np.ones(d), atol=1e-12)


def test_spiky_weight_total_is_m(rng):
    for m, y in [(5000.0, 0.05), (77045.0, 0.045), (250000.0, 0.083)]:
        spec = WeightFamilySpec(d=1000, m_target=m, y=y)
        w = spiky_weight(spec)
        assert w.total() == pytest.approx(m, rel=1e-9)
        assert np.abs(w.factors.left).sum() == pytest.approx(np.sqrt(m), rel=1e-9)


def test_spiky_weight_two_plateaus_match_construction():
    d, m, y = 1000, 77045.0, 0.045
    w = spiky_weight(WeightFamilySpec(d=d, m_target=m, y=y))
    f = 2 * np.sqrt(m) / d - y
    assert np.allclose(w.factors.left[: d // 2], f, atol=1e-12)
    assert np.allclose(w.factors.left[d // 2 :], y, atol=1e-12)
    assert 0 < y < f <= 1


def test_spiky_weight_rejects_out_of_range_f():
    with pytest.raises(DomainError):
        WeightFamilySpec(d=10, m_target=1.0, y=0.5)  # f would be <= 0
    with pytest.raises(DomainError):
        WeightFamilySpec(d=10, m_target=150.0, y=0.1)  # f would exceed 1
    with pytest.raises(DomainError):
        WeightFamilySpec(d=9, m_target=16.0, y=0.4)  # odd d


# ------------------------------------------------------------------- ingest


def test_ingest_empty_file(tmp_path):
    path = tmp_path / "empty.data"
    path.write_text("")
    res = ingest_ratings(path, MOVIELENS)
    assert res.pattern.shape == (0, 0)
    assert res.pattern.size == 0


def test_ingest_movielens_fixture(tmp_path):
    path = write_movielens(tmp_path / "u.data", [(1, 10, 5), (1, 20, 3), (2, 10, 4)])
    res = ingest_ratings(path, MOVIELENS)
    assert res.pattern.shape == (2, 2)
    assert res.pattern.size == 3
    assert res.user_ids == [1, 2]
    assert res.item_ids == [10, 20]


def test_ingest_movielens_dedup(tmp_path):
    path = write_movielens(tmp_path / "u.data", [(1, 10, 5), (1, 10, 2), (2, 10, 4)])
    res = ingest_ratings(path, MOVIELENS)
    assert res.pattern.size == 2
    assert res.duplicates == 1
    assert res.pattern.meta["duplicates"] == 1


def test_ingest_movielens_malformed_line(tmp_path):
    path = tmp_path / "u.data"
    path.write_text("1\t10\t5\t1\nnot-a-line\n")
    with pytest.raises(PatternParseError) as err:
        ingest_ratings(path, MOVIELENS)
    assert err.value.line == 2


def test_ingest_jester_fixture(tmp_path):
    row1 = [99.0] * 100
    row1[0], row1[7] = 4.25, -7.5
    row2 = [99.0] * 100
    row2[7] = 1.0
    path = write_jester(tmp_path / "jester.csv", [row1, row2])
    res = ingest_ratings(path, JESTER)
    assert res.pattern.shape == (2, 2)  # items 0 and 7 observed
    assert set(res.pattern.pairs()) == {(0, 0), (0, 1), (1, 1)}


def test_ingest_jester_bad_width(tmp_path):
    path = tmp_path / "jester.csv"
    path.write_text("3,1.0,2.0\n")
    with pytest.raises(PatternParseError) as err:
        ingest_ratings(path, JESTER)
    assert err.value.line == 1


def test_ingest_unknown_format(tmp_path):
    with pytest.raises(DomainError):
        ingest_ratings(tmp_path / "x", "netflix")


@pytest.mark.skipif(
    not __import__("os").path.exists("/root/data/ml-100k/u.data"),
    reason="MovieLens-100k corpus not present",
)
def test_ingest_movielens_100k_size():
    res = ingest_ratings("/root/data/ml-100k/u.data", MOVIELENS)
    assert res.pattern.size == 100_000


def test_random_regular_retry_exhaustion_is_typed():
    # rho = k-1 with an adversarial k forces many restarts but still succeeds;
    # a direct RetryExhaustedError is hard to trigger honestly, so assert the
    # type exists on the failure path via a tiny monkeypatched cap instead.
    import wmc.patterns as pt

    old = pt._REGULAR_RETRY_CAP
    pt._REGULAR_RETRY_CAP = 0
    try:
        with pytest.raises(RetryExhaustedError):
            random_regular(8, 3, seed=0)
    finally:
        pt._REGULAR_RETRY_CAP = old


def test_sample_bernoulli_size_concentrates_around_total_weight():
    # 200 seeded draws at d = 400: every |Omega| lands within m/4 of m
    d = 400
    w = WeightMatrix(FactoredVectorPair(np.full(d, 0.25), np.full(d, 0.6)))
    m = w.total()
    for s in range(200):
        size = sample_bernoulli(w, ("size-conc", s)).size
        assert abs(size - m) <= m / 4.0
