"""Channel models and the eigenvector computations built on them."""
from dataclasses import dataclass, asdict
import json

import numpy as np
from scipy.special import j0

from .errors import ConfigError
from .rng import complex_normal, stream_rng

SPEED_OF_LIGHT = 299_792_458.0
KINDS = ("iid_rayleigh", "gauss_markov", "exp_spatial")
THETA_MODES = ("per_realization", "fixed")


@dataclass(frozen=True)
class ChannelModel:
    kind: str
    M_t: int
    M_r: int = 1
    seed: int = 0
    eta: float = None
    alpha: float = None
    theta_mode: str = "per_realization"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown channel kind {self.kind!r}")
        if self.M_t < 1 or self.M_r < 1:
            raise ConfigError("antenna counts must be positive")
        if self.kind == "gauss_markov":
            if self.eta is None or not 0.0 <= self.eta <= 1.0:
                raise ConfigError("Gauss-Markov correlation eta must lie in [0, 1]")
        if self.kind == "exp_spatial":
            if self.alpha is None or not 0.0 <= self.alpha < 1.0:
                raise ConfigError("exponential correlation alpha must lie in [0, 1)")
            if self.theta_mode not in THETA_MODES:
                raise ConfigError(f"theta_mode must be one of {THETA_MODES}")


@dataclass
class ChannelRealization:
    matrix: np.ndarray
    model: ChannelModel
    index: int
    k: int = 0


def draw_iid(model, n, first_trial=0):
    """``n`` channels with i.i.d. CN(0, 1) entries, shape (n, M_t, M_r).

    Trial ``i`` is drawn from its own substream, so any slice of trials can be
    regenerated independently.
    """
    out = np.empty((n, model.M_t, model.M_r), dtype=complex)
    for i in range(n):
        rng = stream_rng(model.seed, "channel", first_trial + i)
        out[i] = complex_normal(rng, (model.M_t, model.M_r))
    return out


def evolve_gauss_markov(model, h_prev, rng):
    """One step of ``h[k] = eta h[k-1] + sqrt(1 - eta^2) g[k]``."""
    if model.kind != "gauss_markov":
        raise ConfigError("model is not Gauss-Markov")
    h_prev = np.asarray(h_prev, dtype=complex)
    g = complex_normal(rng, h_prev.shape)
    return model.eta * h_prev + np.sqrt(1.0 - model.eta ** 2) * g


def gauss_markov_chain(model, n, n_steps, first_trial=0):
    """Trajectories ``h[0..n_steps]`` for ``n`` trials, shape (n, n_steps + 1, M_t)."""
    if model.kind != "gauss_markov":
        raise ConfigError("model is not Gauss-Markov")
    out = np.empty((n, n_steps + 1, model.M_t), dtype=complex)
    for i in range(n):
        rng = stream_rng(model.seed, "channel", first_trial + i)
        h = complex_normal(rng, model.M_t)
        out[i, 0] = h
        for k in range(1, n_steps + 1):
            h = evolve_gauss_markov(model, h, rng)
            out[i, k] = h
    return out


def jakes_eta(carrier_hz, tau_s, speed_mps):
    """Temporal correlation ``J0(2 pi f_D tau)`` with ``f_D = v f_c / c``."""
    f_d = speed_mps * carrier_hz / SPEED_OF_LIGHT
    return float(j0(2 * np.pi * f_d * tau_s))


def exp_correlation(M_t, alpha, vartheta):
    """Toeplitz matrix with ``R[l, r] = (alpha e^{j vartheta})^(r - l)`` for l <= r."""
    idx = np.arange(M_t)
    lag = idx[None, :] - idx[:, None]
    rho = alpha * np.exp(1j * vartheta)
    R = np.where(lag >= 0, rho ** np.abs(lag), np.conj(rho) ** np.abs(lag))
    return R


def hermitian_sqrt(R):
    lam, V = np.linalg.eigh(R)
    lam = np.clip(lam, 0.0, None)
    return (V * np.sqrt(lam)) @ V.conj().T


def _exp_theta(model, trial):
    if model.theta_mode == "fixed":
        return stream_rng(model.seed, "exp-theta").uniform(0, 2 * np.pi)
    return stream_rng(model.seed, "exp-theta", trial).uniform(0, 2 * np.pi)


def draw_exp_spatial(model, trial=0):
    """``(R, h)`` for one trial: ``h = R^{1/2} h_w`` with a fresh phase vartheta."""
    if model.kind != "exp_spatial":
        raise ConfigError("model is not exponentially correlated")
    R = exp_correlation(model.M_t, model.alpha, _exp_theta(model, trial))
    hw = complex_normal(stream_rng(model.seed, "channel", trial), model.M_t)
    return R, hermitian_sqrt(R) @ hw


def draw_exp_spatial_batch(model, n, first_trial=0):
    """Batched :func:`draw_exp_spatial`.

    Returns ``(varthetas (n,), H (n, M_t), u1 (n, M_t))`` where ``u1`` is the
    dominant eigenvector of each trial's R.  Uses ``R(vartheta) = D R(0) D^H``
    with ``D = diag(e^{-j vartheta m})``, so R(0) is factorised once.
    """
    if model.kind != "exp_spatial":
        raise ConfigError("model is not exponentially correlated")
    R0 = exp_correlation(model.M_t, model.alpha, 0.0)
    S0 = hermitian_sqrt(R0)
    u0, _ = dominant_eigenvectors(R0, 1)
    m = np.arange(model.M_t)
    thetas = np.array([_exp_theta(model, first_trial + i) for i in range(n)])
    D = np.exp(-1j * thetas[:, None] * m[None, :])
    H = np.empty((n, model.M_t), dtype=complex)
    for i in range(n):
        hw = complex_normal(stream_rng(model.seed, "channel", first_trial + i), model.M_t)
        H[i] = D[i] * (S0 @ (D[i].conj() * hw))
    return thetas, H, D * u0[:, 0]


def _orthonormalize(X):
    q, r = np.linalg.qr(X)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    phase = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1), 1)
    return q * phase[..., None, :]


def _start_block(dim, p):
    x = np.eye(dim, p, dtype=complex)
    # a small fixed dense component so the start cannot be orthogonal to the target
    rng = stream_rng(0, "eig-start")
    return x + 1e-3 * complex_normal(rng, (dim, p))


def dominant_eigenvectors(A, K, tol=1e-10, max_iter=20000):
    """Leading ``K`` eigenpairs of a Hermitian PSD matrix by subspace iteration.

    The block iterated has ``min(dim, 2K + 2)`` columns, starts at the identity
    block (plus a fixed small dense term) and ends with a Rayleigh-Ritz step.
    Stops when the leading K-dimensional subspace moves by less than ``tol``.
    If the K-th and (K+1)-th eigenvalues coincide, any orthonormal basis of
    the leading invariant subspace is a valid answer.

    Returns ``(U (dim, K), eigenvalues (K,))`` in non-increasing order.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    dim = A.shape[0]
    scale = max(np.abs(A).max(), 1e-300)
    if np.abs(A - A.conj().T).max() > 1e-10 * max(scale, 1.0):
        raise ValueError("matrix is not Hermitian")
    if not 1 <= K <= dim:
        raise ValueError("need 1 <= K <= dim")
    p = min(dim, 2 * K + 2)
    X = _orthonormalize(_start_block(dim, p))
    prev = None
    for _ in range(max_iter):
        X = _orthonormalize(A @ X)
        lam, V = np.linalg.eigh(X.conj().T @ A @ X)
        order = np.argsort(lam)[::-1]
        X = X @ V[:, order]
        lead = X[:, :K]
        if prev is not None:
            moved = np.linalg.norm(lead - prev @ (prev.conj().T @ lead))
            if moved < tol:
                break
        prev = lead
    return X[:, :K], lam[order][:K].real


def dominant_eigenvectors_batch(A, K, tol=1e-10, max_iter=5000):
    """:func:`dominant_eigenvectors` for a stack of matrices (n, dim, dim)."""
    A = np.asarray(A, dtype=complex)
    n, dim, _ = A.shape
    p = min(dim, 2 * K + 2)
    X = np.broadcast_to(_orthonormalize(_start_block(dim, p)), (n, dim, p)).copy()
    prev = None
    for _ in range(max_iter):
        X = _orthonormalize(A @ X)
        lam, V = np.linalg.eigh(X.conj().transpose(0, 2, 1) @ A @ X)
        V = V[:, :, ::-1]
        lam = lam[:, ::-1]
        X = X @ V
        lead = X[:, :, :K]
        if prev is not None:
            proj = prev @ (prev.conj().transpose(0, 2, 1) @ lead)
            if np.linalg.norm(lead - proj, axis=(1, 2)).max() < tol:
                break
        prev = lead
    return X[:, :, :K], lam[:, :K].real


def dump_channels(path, H, model, extra=None):
    """Write ``H`` as little-endian f64 interleaved re/im, row-major, plus a JSON sidecar."""
    H = np.ascontiguousarray(np.asarray(H, dtype=np.complex128))
    inter = np.empty(H.shape + (2,), dtype="<f8")
    inter[..., 0] = H.real
    inter[..., 1] = H.imag
    with open(path, "wb") as f:
        f.write(inter.tobytes(order="C"))
    meta = {"shape": list(H.shape), "dtype": "f64le-interleaved", "model": asdict(model)}
    if extra:
        meta.update(extra)
    with open(str(path) + ".json", "w") as f:
        json.dump(meta, f, indent=1)


def load_channels(path):
    with open(str(path) + ".json") as f:
        meta = json.load(f)
    raw = np.fromfile(path, dtype="<f8").reshape(meta["shape"] + [2])
    return raw[..., 0] + 1j * raw[..., 1], meta
