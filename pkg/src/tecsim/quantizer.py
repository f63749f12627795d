"""Trellis-extended codebook quantizer and reconstructor.

The user runs a Viterbi search per candidate phase ``theta`` with branch
metric ``||x_t - e^{j theta} c(label)||^2`` over length-L row blocks ``x_t`` of
the channel vector (or eigenvector matrix), keeps the best (path, theta), and
feeds back the trellis *input* symbols.  The base station re-runs the
encoder on those symbols and concatenates the mapped codewords.
"""
from dataclasses import dataclass, field

import numpy as np

from .codebook import MAX_VQ_BITS, BranchMapping, Codebook, map_codewords_to_branches
from .errors import ConfigError
from .trellis import encode_batch, viterbi

DEFAULT_K_THETA = 16


def theta_grid(K_theta=DEFAULT_K_THETA):
    """``K_theta`` uniform phases ``2 pi i / K_theta``."""
    return 2 * np.pi * np.arange(K_theta) / K_theta


@dataclass(frozen=True)
class FeedbackWord:
    """Trellis input symbols sent back to the base station.

    Only ``inputs`` is fed back; ``best_theta`` is a diagnostic.
    """

    inputs: tuple
    b_in: int
    scheme: str = "tec"
    best_theta: float = 0.0

    @property
    def n_bits(self):
        return self.b_in * len(self.inputs)

    def bits(self):
        """Bit stream, stage 0 first, least significant input bit first."""
        return [(u >> i) & 1 for u in self.inputs for i in range(self.b_in)]

    def bitstring(self):
        return "".join(str(b) for b in self.bits())

    def to_bytes(self):
        """Pack :meth:`bits` little-endian: stream bit i is bit ``i % 8`` of byte ``i // 8``."""
        out = bytearray((self.n_bits + 7) // 8)
        for i, b in enumerate(self.bits()):
            out[i // 8] |= b << (i % 8)
        return bytes(out)

    @classmethod
    def from_bytes(cls, data, b_in, n_stages, scheme="tec"):
        if len(data) * 8 < b_in * n_stages:
            raise ValueError("not enough bytes for the requested stage count")
        bits = [(data[i // 8] >> (i % 8)) & 1 for i in range(b_in * n_stages)]
        inputs = tuple(
            sum(bits[t * b_in + i] << i for i in range(b_in)) for t in range(n_stages)
        )
        return cls(inputs, b_in, scheme)


@dataclass(frozen=True, eq=False)
class QuantizerConfig:
    M_t: int
    code: object
    codebook: Codebook
    mapping: BranchMapping
    thetas: np.ndarray = field(default_factory=theta_grid)

    def __post_init__(self):
        cb = self.codebook
        if self.M_t % cb.dim_l:
            raise ConfigError(f"L={cb.dim_l} does not divide M_t={self.M_t}")
        if cb.n_words != self.code.n_labels:
            raise ConfigError(
                f"codebook has {cb.n_words} words but the trellis has {self.code.n_labels} labels"
            )
        if cb.norm_mode != "scaled" or not np.isclose(cb.squared_norm, cb.dim_l / self.M_t):
            raise ConfigError("codebook must be scaled to squared norm L / M_t")
        thetas = np.atleast_1d(np.asarray(self.thetas, dtype=float))
        if thetas.size == 0:
            raise ConfigError("the phase grid is empty")
        object.__setattr__(self, "thetas", thetas)

    @property
    def L(self):
        return self.codebook.dim_l

    @property
    def T(self):
        return self.M_t // self.L

    @property
    def rank_k(self):
        return self.codebook.rank_k

    @property
    def K_theta(self):
        return self.thetas.size

    @property
    def bits_per_entry(self):
        return self.code.b_in / self.L

    @property
    def total_bits(self):
        return self.code.b_in * self.T


def make_config(M_t, codebook, code, mapping="proposed", K_theta=DEFAULT_K_THETA, thetas=None):
    """Build a :class:`QuantizerConfig` from a unit codebook."""
    if isinstance(mapping, str):
        mapping = map_codewords_to_branches(codebook, code, mapping)
    if thetas is None:
        thetas = theta_grid(K_theta)
    return QuantizerConfig(M_t, code, codebook.scaled(M_t), mapping, thetas)


def trellis_search(code, corr, x_energy, w_energy, thetas, init=None):
    """Joint minimisation over trellis paths and the phase grid.

    The branch metric at stage t for label l and phase theta is
    ``x_energy[t] + w_energy[t, l] - 2 Re(e^{j theta} corr[t, l])``, which
    equals ``||x_t - e^{j theta} w_l||^2`` when ``corr = x_t^H w_l``.

    Parameters
    ----------
    corr : ndarray (n, T, n_labels), complex
    x_energy : ndarray (n, T)
    w_energy : ndarray broadcastable to (n, T, n_labels)
    init : ndarray (n, K_theta), optional
        Metric already accumulated before the first trellis stage.

    Returns ``(inputs (n, T), metric (n,), theta_index (n,))``; phase ties go to
    the smaller grid index.
    """
    n, T, n_lab = corr.shape
    K = thetas.size
    rot = np.exp(1j * thetas)
    bm = (x_energy[:, None, :, None] + np.broadcast_to(w_energy, corr.shape)[:, None]
          - 2.0 * np.real(rot[None, :, None, None] * corr[:, None]))
    init_flat = None if init is None else init.reshape(n * K)
    if T == 0:
        inputs = np.zeros((n * K, 0), dtype=np.int64)
        metric = np.zeros(n * K) if init_flat is None else init_flat
    else:
        inputs, metric = viterbi(code, bm.reshape(n * K, T, n_lab), init_flat)
    metric = metric.reshape(n, K)
    k = metric.argmin(axis=1)
    rows = np.arange(n)
    return inputs.reshape(n, K, T)[rows, k], metric[rows, k], k


def _blocks(cfg, x):
    """(n, M_t, K) -> (n, T, L, K)"""
    return x.reshape(x.shape[0], cfg.T, cfg.L, x.shape[2])


def _label_words(cfg, label_maps):
    words = cfg.codebook.words
    if label_maps is None:
        return words[cfg.mapping.label_to_word]
    return words[np.asarray(label_maps)]


def quantize_batch(cfg, X, label_maps=None):
    """Quantize many channels at once.

    Parameters
    ----------
    X : ndarray (n, M_t) or (n, M_t, K)
    label_maps : ndarray (n, n_labels), optional
        Per-row label-to-word tables (e.g. a fresh random mapping per trial);
        defaults to ``cfg.mapping`` for every row.

    Returns ``(inputs, metric, theta_index)``.
    """
    X = np.asarray(X, dtype=complex)
    if X.ndim == 2:
        X = X[..., None]
    if X.shape[1] != cfg.M_t or X.shape[2] != cfg.rank_k:
        raise ValueError(f"expected channels of shape (n, {cfg.M_t}, {cfg.rank_k}), got {X.shape}")
    xb = _blocks(cfg, X)
    lw = _label_words(cfg, label_maps)
    x_energy = np.sum(np.abs(xb) ** 2, axis=(2, 3))
    w_energy = np.sum(np.abs(lw) ** 2, axis=(-2, -1))
    if label_maps is None:
        corr = np.einsum("ntlk,wlk->ntw", xb.conj(), lw)
        w_energy = w_energy[None, None, :]
    else:
        corr = np.einsum("ntlk,nwlk->ntw", xb.conj(), lw)
        w_energy = w_energy[:, None, :]
    return trellis_search(cfg.code, corr, x_energy, w_energy, cfg.thetas)


def reconstruct_batch(cfg, inputs, label_maps=None):
    """Base-station reconstruction for many feedback words: (n, M_t, K)."""
    inputs = np.asarray(inputs, dtype=np.int64)
    if inputs.ndim != 2 or inputs.shape[1] != cfg.T:
        raise ValueError(f"expected {cfg.T} stages per feedback word")
    labels = encode_batch(cfg.code, inputs)
    if label_maps is None:
        word_idx = cfg.mapping.label_to_word[labels]
    else:
        word_idx = np.take_along_axis(np.asarray(label_maps), labels, axis=1)
    blocks = cfg.codebook.words[word_idx]
    return blocks.reshape(inputs.shape[0], cfg.M_t, cfg.rank_k)


def _feedback(cfg, inputs, k):
    return FeedbackWord(tuple(int(u) for u in inputs), cfg.code.b_in, "tec", float(cfg.thetas[k]))


def quantize(cfg, h):
    """Quantize one channel vector; returns ``(FeedbackWord, metric)``."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (cfg.M_t,):
        raise ValueError(f"channel must have shape ({cfg.M_t},), got {h.shape}")
    if cfg.rank_k != 1:
        raise ConfigError("vector quantization needs a rank-1 codebook")
    inputs, metric, k = quantize_batch(cfg, h[None])
    return _feedback(cfg, inputs[0], k[0]), float(metric[0])


def quantize_subspace(cfg, U, tol=1e-6):
    """Quantize an M_t x K matrix with orthonormal columns (Frobenius metric)."""
    U = np.asarray(U, dtype=complex)
    if U.ndim == 1:
        U = U[:, None]
    if U.shape != (cfg.M_t, cfg.rank_k):
        raise ValueError(f"expected shape ({cfg.M_t}, {cfg.rank_k}), got {U.shape}")
    if np.abs(U.conj().T @ U - np.eye(cfg.rank_k)).max() > tol:
        raise ValueError("columns are not orthonormal")
    inputs, metric, k = quantize_batch(cfg, U[None])
    return _feedback(cfg, inputs[0], k[0]), float(metric[0])


def reconstruct(cfg, b):
    """Quantized CSI for one feedback word (vector for rank 1, else M_t x K)."""
    inputs = np.asarray(b.inputs if isinstance(b, FeedbackWord) else b, dtype=np.int64)
    out = reconstruct_batch(cfg, inputs[None])[0]
    return out[:, 0] if cfg.rank_k == 1 else out


def quantize_vq(cb, h):
    """Index of the codeword maximising ``|h^H c|^2`` (lowest index on ties)."""
    if cb.n_words > (1 << MAX_VQ_BITS):
        raise ConfigError(f"exhaustive codeword search refused beyond {MAX_VQ_BITS} bits")
    h = np.asarray(h, dtype=complex).reshape(-1)
    if cb.rank_k != 1 or h.size != cb.dim_l:
        raise ValueError("channel dimension does not match the codebook")
    gains = np.abs(cb.words[:, :, 0] @ h.conj()) ** 2
    return int(np.argmax(gains))


def select_vq_batch(cb, X):
    """Batched codeword selection: max ``||X^H C||_F^2`` per row of ``X`` (n, M, K).

    For K = 1 this is :func:`quantize_vq`.
    """
    if cb.n_words > (1 << MAX_VQ_BITS):
        raise ConfigError(f"exhaustive codeword search refused beyond {MAX_VQ_BITS} bits")
    X = np.asarray(X, dtype=complex)
    if X.ndim == 2:
        X = X[..., None]
    n, M, K = X.shape
    if M != cb.dim_l or K != cb.rank_k:
        raise ValueError("channel dimension does not match the codebook")
    # (n*K, M) @ (M, N*K) -> inner products between every pair of columns
    W = cb.words.transpose(1, 0, 2).reshape(M, -1)
    G = X.transpose(0, 2, 1).conj().reshape(n * K, M) @ W
    score = np.sum(np.abs(G.reshape(n, K, cb.n_words, K)) ** 2, axis=(1, 3))
    return score.argmax(axis=1)
