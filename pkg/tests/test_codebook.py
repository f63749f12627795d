import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tecsim.codebook import (BranchMapping, Codebook, best_half, design_ed_codebook,
                             lte_dft_codebook, map_codewords_to_branches, min_distance,
                             pairwise_sq_distances, random_codebook, rvq_codebook)
from tecsim.errors import ConfigError
from tecsim.trellis import code_for_rate


def test_lte_dft_words():
    cb = lte_dft_codebook(4, 8)
    assert cb.n_words == 8 and cb.dim_l == 4
    np.testing.assert_allclose(cb.words[0, :, 0], [0.5] * 4)
    np.testing.assert_allclose(cb.words[4, :, 0], [0.5, -0.5, 0.5, -0.5], atol=1e-15)
    np.testing.assert_allclose(cb.words[2, :, 0], [0.5, 0.5j, -0.5, -0.5j], atol=1e-15)


def test_lte_householder_words():
    cb = lte_dft_codebook(4, 16)
    # first column of I - u u^H / 2 for u = (1, -1, 1, 1)
    np.testing.assert_allclose(cb.words[8, :, 0], [0.5, 0.5, -0.5, -0.5], atol=1e-15)
    # u = (1, 1, 1, 1) gives (1/2, -1/2, -1/2, -1/2)
    np.testing.assert_allclose(cb.words[15, :, 0], [0.5, -0.5, -0.5, -0.5], atol=1e-15)
    np.testing.assert_allclose(np.linalg.norm(cb.words, axis=1)[:, 0], 1.0)
    assert np.allclose(cb.words[:, 0, 0], 0.5)
    assert min_distance(cb) > 0.1


@pytest.mark.parametrize("args", [(8, 8), (4, 4), (4, 32)])
def test_lte_rejects(args):
    with pytest.raises(ConfigError):
        lte_dft_codebook(*args)


# Rankin bounds on the real 8-sphere: 8 points in a simplex-like packing reach
# d^2 = 2N/(N-1) = 16/7; 16 points (cross-polytope) reach d^2 = 2.
@pytest.mark.parametrize("n,bound", [(8, 16 / 7), (16, 2.0)])
def test_ed_codebook_reaches_packing_bound(n, bound):
    cb = design_ed_codebook(4, n)
    d2 = min_distance(cb) ** 2
    assert d2 <= bound + 1e-9
    assert d2 >= bound - 2e-3
    np.testing.assert_allclose(np.linalg.norm(cb.words, axis=(1, 2)), 1.0, atol=1e-12)


def test_ed_rank2_orthonormal_columns():
    cb = design_ed_codebook(4, 8, rank_k=2, n_starts=4, n_anneal=300, n_polish=100)
    for w in cb.words:
        np.testing.assert_allclose(2 * w.conj().T @ w, np.eye(2), atol=1e-12)


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 1000))
def test_ed_never_worse_than_random_start(seed):
    ed = design_ed_codebook(4, 8, rng_seed=seed, n_starts=2, n_anneal=50, n_polish=20)
    assert min_distance(ed) >= min_distance(random_codebook(4, 8, rng_seed=seed)) - 1e-12


def test_ed_is_deterministic():
    a = design_ed_codebook(4, 8, rng_seed=3, n_starts=4, n_anneal=100)
    b = design_ed_codebook(4, 8, rng_seed=3, n_starts=4, n_anneal=100)
    assert np.array_equal(a.words, b.words)


def _exhaustive_even_best(d2):
    """Max over all 35 two-way splits of 8 words of the better half's min distance."""
    best = -np.inf
    for half in itertools.combinations(range(1, 8), 3):
        a = (0,) + half
        b = tuple(i for i in range(8) if i not in a)
        for part in (a, b):
            best = max(best, min(d2[i, j] for i, j in itertools.combinations(part, 2)))
    return best


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_proposed_even_half_is_optimal(seed):
    cb = random_codebook(4, 8, rng_seed=seed)
    d2 = pairwise_sq_distances(cb.words)
    m = map_codewords_to_branches(cb, code_for_rate(2))
    even = m.label_to_word[0::2]
    got = min(d2[i, j] for i, j in itertools.combinations(even, 2))
    assert got == _exhaustive_even_best(d2)


def test_sub_split_of_odd_labels():
    cb = random_codebook(4, 8, rng_seed=7)
    d2 = pairwise_sq_distances(cb.words)
    m = map_codewords_to_branches(cb, code_for_rate(2)).label_to_word
    odd = sorted(m[1::2])
    # best pair among the odd words goes to labels 1 and 5
    best = max(itertools.combinations(odd, 2), key=lambda p: d2[p])
    assert sorted([m[1], m[5]]) == sorted(best)


def test_mapping_16_words_is_permutation():
    cb = lte_dft_codebook(4, 16)
    m = map_codewords_to_branches(cb, code_for_rate(3))
    assert sorted(m.label_to_word.tolist()) == list(range(16))
    # the even labels get the better half of the codebook
    d2 = pairwise_sq_distances(cb.words)
    even = m.label_to_word[0::2]
    got = min(d2[i, j] for i, j in itertools.combinations(even, 2))
    sub, _ = best_half(d2, range(16))
    assert got == min(d2[i, j] for i, j in itertools.combinations(sub, 2))


def test_mapping_kinds():
    cb = random_codebook(4, 4, rng_seed=1)
    code = code_for_rate(1)
    assert map_codewords_to_branches(cb, code, "identity").label_to_word.tolist() == [0, 1, 2, 3]
    r1 = map_codewords_to_branches(cb, code, "random", np.random.default_rng(5))
    r2 = map_codewords_to_branches(cb, code, "random", np.random.default_rng(5))
    assert np.array_equal(r1.label_to_word, r2.label_to_word)
    with pytest.raises(ValueError):
        map_codewords_to_branches(cb, code, "bogus")
    with pytest.raises(ValueError):
        map_codewords_to_branches(cb, code_for_rate(2))
    with pytest.raises(ValueError):
        BranchMapping([0, 0, 1, 2], "bad")


def test_scaling_and_roundtrip(tmp_path):
    cb = random_codebook(4, 8, rank_k=2, rng_seed=2)
    sc = cb.scaled(64)
    assert sc.norm_mode == "scaled" and sc.squared_norm == pytest.approx(4 / 64)
    np.testing.assert_allclose(np.sum(np.abs(sc.words) ** 2, axis=(1, 2)), 4 / 64)
    np.testing.assert_allclose(sc.unit().words, cb.words, atol=1e-15)
    with pytest.raises(ConfigError):
        cb.scaled(10)
    p = tmp_path / "cb.json"
    sc.save(p)
    back = Codebook.load(p)
    assert np.array_equal(back.words, sc.words) and back.squared_norm == sc.squared_norm


def test_rvq_codebook():
    cb = rvq_codebook(4, 8, rng_seed=0)
    assert cb.n_words == 256
    np.testing.assert_allclose(np.linalg.norm(cb.words, axis=(1, 2)), 1.0)
    with pytest.raises(ConfigError):
        rvq_codebook(64, 17)
