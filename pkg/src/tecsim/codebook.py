"""Per-stage codebooks and the codeword-to-branch mapping."""
from dataclasses import dataclass
import itertools
import json

import numpy as np

from .errors import ConfigError
from .rng import complex_normal, stream_rng

MAX_VQ_BITS = 16

# Householder generating vectors of the 4-antenna LTE codebook; the rank-1
# precoder is the first column of I - 2 u u^H / u^H u.
_S = 1 / np.sqrt(2)
_LTE_U = np.array([
    [1, -1, -1, -1],
    [1, -1j, 1, 1j],
    [1, 1, -1, 1],
    [1, 1j, 1, -1j],
    [1, (-1 - 1j) * _S, -1j, (1 - 1j) * _S],
    [1, (1 - 1j) * _S, 1j, (-1 - 1j) * _S],
    [1, (1 + 1j) * _S, -1j, (-1 + 1j) * _S],
    [1, (-1 + 1j) * _S, 1j, (1 + 1j) * _S],
    [1, -1, 1, 1],
    [1, -1j, -1, -1j],
    [1, 1, 1, -1],
    [1, 1j, -1, 1j],
    [1, -1, -1, 1],
    [1, -1, 1, -1],
    [1, 1, -1, -1],
    [1, 1, 1, 1],
], dtype=complex)


@dataclass(frozen=True, eq=False)
class Codebook:
    """Ordered codewords, stored as an array of shape (n_words, L, K).

    ``squared_norm`` is 1 for a unit codebook and ``L / M_t`` once scaled for a
    trellis with ``M_t / L`` stages.
    """

    words: np.ndarray
    norm_mode: str = "unit"
    squared_norm: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.words, dtype=complex)
        if w.ndim == 2:
            w = w[..., None]
        if w.ndim != 3:
            raise ValueError("codewords must be vectors or matrices")
        w.setflags(write=False)
        object.__setattr__(self, "words", w)

    @property
    def n_words(self):
        return self.words.shape[0]

    @property
    def dim_l(self):
        return self.words.shape[1]

    @property
    def rank_k(self):
        return self.words.shape[2]

    def __len__(self):
        return self.n_words

    def scaled(self, M_t):
        """Rescale every word to squared norm ``L / M_t``."""
        if M_t % self.dim_l:
            raise ConfigError(f"L={self.dim_l} does not divide M_t={M_t}")
        target = self.dim_l / M_t
        factor = np.sqrt(target / self.squared_norm)
        return Codebook(self.words * factor, "scaled", target)

    def unit(self):
        return Codebook(self.words / np.sqrt(self.squared_norm), "unit", 1.0)

    def to_dict(self):
        return {
            "dim_l": self.dim_l,
            "rank_k": self.rank_k,
            "norm_mode": self.norm_mode,
            "squared_norm": self.squared_norm,
            "words": [[[float(z.real), float(z.imag)] for z in w.ravel()] for w in self.words],
        }

    @classmethod
    def from_dict(cls, d):
        words = np.array(d["words"], dtype=float)
        words = (words[..., 0] + 1j * words[..., 1]).reshape(-1, d["dim_l"], d["rank_k"])
        return cls(words, d.get("norm_mode", "unit"), float(d.get("squared_norm", 1.0)))

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=1)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_dict(json.load(f))


@dataclass(frozen=True, eq=False)
class BranchMapping:
    """``label_to_word[label]`` is the codeword index carried by that label."""

    label_to_word: np.ndarray
    kind: str

    def __post_init__(self):
        m = np.asarray(self.label_to_word, dtype=np.int64)
        if sorted(m.tolist()) != list(range(m.size)):
            raise ValueError("branch mapping must be a permutation")
        m.setflags(write=False)
        object.__setattr__(self, "label_to_word", m)


def pairwise_sq_distances(words):
    w = np.asarray(words)
    flat = w.reshape(w.shape[0], -1)
    diff = flat[:, None, :] - flat[None, :, :]
    return np.sum(np.abs(diff) ** 2, axis=-1)


def min_distance(words):
    """Smallest Euclidean (Frobenius) distance between two distinct codewords."""
    if isinstance(words, Codebook):
        words = words.words
    d2 = pairwise_sq_distances(words)
    iu = np.triu_indices(d2.shape[0], 1)
    return float(np.sqrt(d2[iu].min()))


# ---------------------------------------------------------------- construction

def lte_dft_codebook(L=4, n_words=8):
    """The 4-antenna LTE rank-1 codewords.

    ``n_words=8`` gives the oversampled DFT vectors ``exp(j 2 pi m n / 8) / 2``;
    ``n_words=16`` appends the remaining eight Householder codewords.
    """
    if L != 4:
        raise ConfigError("the LTE codebook is defined for L = 4 only")
    if n_words not in (8, 16):
        raise ConfigError("the LTE codebook has 8 (DFT) or 16 codewords")
    m = np.arange(4)
    dft = [np.exp(2j * np.pi * m * n / 8) / 2 for n in range(8)]
    words = list(dft)
    if n_words == 16:
        for u in _LTE_U[8:]:
            col = -u * np.conj(u[0]) / 2
            col[0] += 1
            words.append(col)
    return Codebook(np.array(words))


def _project(x):
    """Map each (..., L, K) block onto orthonormal columns, then unit Frobenius norm."""
    K = x.shape[-1]
    if K == 1:
        return x / np.linalg.norm(x, axis=(-2, -1), keepdims=True)
    u, _, vh = np.linalg.svd(x, full_matrices=False)
    return (u @ vh) / np.sqrt(K)


def random_codebook(L, n_words, rank_k=1, rng_seed=0):
    """Isotropic random codewords (orthonormal columns for rank > 1)."""
    rng = stream_rng(rng_seed, "random-codebook")
    return Codebook(_project(complex_normal(rng, (n_words, L, rank_k))))


def rvq_codebook(M_t, B_tot, rng_seed=0, rank_k=1):
    """``2**B_tot`` i.i.d. isotropic unit-norm codewords of dimension ``M_t``."""
    if B_tot > MAX_VQ_BITS:
        raise ConfigError(
            f"RVQ with {B_tot} bits needs 2**{B_tot} codewords; exhaustive search is "
            f"infeasible beyond {MAX_VQ_BITS} bits"
        )
    rng = stream_rng(rng_seed, "rvq")
    return Codebook(_project(complex_normal(rng, (1 << int(B_tot), M_t, rank_k))))


def _pair_distances(x):
    """Squared distances between all words of every start: (S, N, N)."""
    flat = x.reshape(x.shape[0], x.shape[1], -1)
    gram = np.real(flat @ flat.conj().transpose(0, 2, 1))
    sq = np.real(np.sum(np.abs(flat) ** 2, axis=-1))
    d2 = sq[:, :, None] + sq[:, None, :] - 2 * gram
    n = x.shape[1]
    d2[:, np.arange(n), np.arange(n)] = np.inf
    return d2


def _repulsion_step(x, weights, step):
    # ascent direction of sum_ij w_ij ||x_i - x_j||^2 with respect to x_i
    wsum = weights.sum(axis=2)
    grad = wsum[:, :, None, None] * x - np.einsum("sij,sjlk->silk", weights, x)
    return _project(x + step[:, None, None, None] * grad)


def design_ed_codebook(L, n_words, rank_k=1, rng_seed=0, n_starts=32,
                       n_anneal=1500, n_polish=400):
    """Codebook of ``n_words`` unit-norm L x K words with large minimum distance.

    Multi-start search: annealed soft-min repulsion followed by polishing that
    only accepts moves raising the exact minimum distance.  Start 0 is
    :func:`random_codebook` for the same seed, and the best configuration
    seen (including every start's initial one) is returned, so the result is
    never worse than that random codebook.
    """
    if n_words < 2:
        raise ValueError("an ED codebook needs at least two codewords")
    if L < 1 or rank_k < 1 or rank_k > L:
        raise ValueError("need 1 <= rank_k <= L")
    rng = stream_rng(rng_seed, "ed-design")
    x = _project(complex_normal(rng, (n_starts, n_words, L, rank_k)))
    x[0] = random_codebook(L, n_words, rank_k, rng_seed).words

    def score(cfg):
        return _pair_distances(cfg).min(axis=(1, 2))

    best = x.copy()
    best_score = score(x)

    temps = np.geomspace(0.3, 0.003, n_anneal)
    step = np.full(n_starts, 0.2)
    for it, tau in enumerate(temps):
        d2 = _pair_distances(x)
        m = d2.min(axis=(1, 2), keepdims=True)
        w = np.exp(-(d2 - m) / tau)
        w /= w.sum(axis=(1, 2), keepdims=True)
        x = _repulsion_step(x, w, step * (1.0 - 0.7 * it / n_anneal))
        s = score(x)
        better = s > best_score
        best[better] = x[better]
        best_score = np.where(better, s, best_score)

    # polishing: push apart the near-closest pairs, keep only improvements
    x = best.copy()
    cur = best_score.copy()
    step = np.full(n_starts, 0.05)
    for _ in range(n_polish):
        d2 = _pair_distances(x)
        m = d2.min(axis=(1, 2), keepdims=True)
        w = (d2 <= m * (1 + 1e-3) + 1e-12).astype(float)
        trial = _repulsion_step(x, w, step)
        s = score(trial)
        ok = s > cur
        x[ok] = trial[ok]
        cur = np.where(ok, s, cur)
        step = np.where(ok, step * 1.2, step * 0.5)
        if np.all(step < 1e-12):
            break
    better = cur > best_score
    best[better] = x[better]
    best_score = np.where(better, cur, best_score)

    # ties go to the lowest start index
    pick = int(np.argmax(best_score))
    return Codebook(best[pick])


# -------------------------------------------------------------------- mapping

def _subset_min_sq(d2, subset):
    sub = d2[np.ix_(subset, subset)]
    iu = np.triu_indices(len(subset), 1)
    return sub[iu].min()


def best_half(d2, indices):
    """Half-size subset of ``indices`` with the largest minimum internal distance.

    Scans subsets in lexicographic order and keeps the first maximiser, so
    ties go to the lexicographically smallest subset.  Returns
    ``(subset, complement)`` as sorted lists.
    """
    indices = sorted(indices)
    half = len(indices) // 2
    best, best_val = None, -np.inf
    for subset in itertools.combinations(indices, half):
        val = _subset_min_sq(d2, list(subset))
        if val > best_val:
            best, best_val = list(subset), val
    return best, [i for i in indices if i not in best]


def _assign(table, labels, words):
    for lab, w in zip(sorted(labels), sorted(words)):
        table[lab] = w


def map_codewords_to_branches(cb, code, kind="proposed", rng=None):
    """Assign codewords to the trellis output labels.

    ``proposed``: the even labels get the half of the codebook with the
    largest minimum internal distance.  The odd half is split the same way;
    the better pair group goes to labels {1, 5} (1 mod 4) and the rest to
    {3, 7} (3 mod 4).  For 16 words the even half is split likewise into labels
    0 mod 4 and 2 mod 4.  Inside each group words go to labels in ascending
    order.

    ``random``: a uniformly random bijection drawn from ``rng``.
    ``identity``: label i carries word i.
    """
    n = code.n_labels
    if cb.n_words != n:
        raise ConfigError(f"codebook has {cb.n_words} words, trellis has {n} labels")
    if kind == "identity":
        return BranchMapping(np.arange(n), kind)
    if kind == "random":
        if rng is None:
            rng = np.random.default_rng()
        return BranchMapping(rng.permutation(n), kind)
    if kind != "proposed":
        raise ValueError(f"unknown mapping kind {kind!r}")
    if code.b_out not in (2, 3, 4):
        raise ConfigError("proposed mapping is defined for 4, 8 or 16 labels")

    d2 = pairwise_sq_distances(cb.words)
    table = np.empty(n, dtype=np.int64)
    even_words, odd_words = best_half(d2, range(n))
    even_labels = list(range(0, n, 2))
    odd_labels = list(range(1, n, 2))
    if code.b_out == 2:
        _assign(table, even_labels, even_words)
        _assign(table, odd_labels, odd_words)
    else:
        first, second = best_half(d2, odd_words)
        _assign(table, [lab for lab in odd_labels if lab % 4 == 1], first)
        _assign(table, [lab for lab in odd_labels if lab % 4 == 3], second)
        if code.b_out == 3:
            _assign(table, even_labels, even_words)
        else:
            first, second = best_half(d2, even_words)
            _assign(table, [lab for lab in even_labels if lab % 4 == 0], first)
            _assign(table, [lab for lab in even_labels if lab % 4 == 2], second)
    return BranchMapping(table, kind)
