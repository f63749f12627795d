"""Successive block-wise phase adjustment of previously quantized CSI.

At update k the previous estimate ``h_hat`` and the new channel are both
circularly shifted left by ``(L/2)(k-1)`` entries, a trellis search picks one
phase per length-L block from ``psi_l = l pi / 2**b_out`` (plus a global phase
from the noncoherent grid), and the rotated estimate is shifted back.
The trellis input symbols are the feedback.
"""
from dataclasses import dataclass, replace
import json

import numpy as np

from .errors import ConfigError
from .quantizer import FeedbackWord, theta_grid, trellis_search
from .trellis import encode_batch


@dataclass(frozen=True, eq=False)
class PhaseSet:
    """Half-circle phase alphabet; trellis label l carries ``psis[l]``."""

    b_out: int

    @property
    def psis(self):
        n = 1 << self.b_out
        return np.arange(n) * np.pi / n

    def label_map(self):
        return {lab: float(p) for lab, p in enumerate(self.psis)}


@dataclass(frozen=True, eq=False)
class TespaState:
    """Quantized CSI and the update counter shared by user and base station."""

    h_hat: np.ndarray
    k: int
    L: int
    code: object
    block_shift: bool = True

    @property
    def shift_per_step(self):
        return self.L // 2

    @property
    def M_t(self):
        return self.h_hat.shape[-1]

    def shift_at(self, k):
        """Left circular shift used by update ``k``."""
        if not self.block_shift:
            return 0
        return (self.shift_per_step * (k - 1)) % self.M_t


def circular_shift(x, m):
    """Left circular shift by ``m`` along the last axis: ``[1,2,3,4,5], 2 -> [3,4,5,1,2]``."""
    return np.roll(x, -int(m), axis=-1)


def phase_matrix(phases, L):
    """Diagonal of the block phase matrix: each phase repeated over L entries."""
    return np.repeat(np.exp(1j * np.asarray(phases)), L, axis=-1)


def _check(state, h):
    if state is None or state.h_hat is None:
        raise ConfigError("TE-SPA state is not initialised")
    if state.L % 2:
        raise ConfigError("block shifting needs an even block length L")
    if state.M_t % state.L:
        raise ConfigError(f"L={state.L} does not divide M_t={state.M_t}")
    if np.shape(h)[-1] != state.M_t:
        raise ValueError(f"channel dimension {np.shape(h)[-1]} != {state.M_t}")


def tespa_step_batch(code, L, h_hat, h, shift, thetas=None, fixed_first=False):
    """One phase-adjustment step for many independent sessions.

    Parameters
    ----------
    h_hat, h : ndarray (n, M_t)
        Previous estimates and current channels.
    shift : int
        Left circular shift applied to both before the search.
    fixed_first : bool
        Pin the first block's phase to 0 and search only blocks 2..T.

    Returns ``(inputs (n, T or T-1), new_h_hat (n, M_t), metric (n,), theta_index (n,))``.
    """
    thetas = theta_grid() if thetas is None else np.atleast_1d(np.asarray(thetas, dtype=float))
    if thetas.size == 0:
        raise ConfigError("the phase grid is empty")
    n, M_t = h.shape
    T = M_t // L
    hs = circular_shift(h, shift).reshape(n, T, L)
    gs = circular_shift(h_hat, shift).reshape(n, T, L)
    z = np.sum(hs.conj() * gs, axis=2)
    h_e = np.sum(np.abs(hs) ** 2, axis=2)
    g_e = np.sum(np.abs(gs) ** 2, axis=2)
    psis = PhaseSet(code.b_out).psis
    rot = np.exp(1j * psis)

    init = None
    first = 0
    if fixed_first:
        first = 1
        init = (h_e[:, :1] + g_e[:, :1]
                - 2.0 * np.real(np.exp(1j * thetas)[None, :] * z[:, :1]))
    corr = z[:, first:, None] * rot[None, None, :]
    w_e = np.broadcast_to(g_e[:, first:, None], corr.shape)
    inputs, metric, k = trellis_search(code, corr, h_e[:, first:], w_e, thetas, init=init)

    phases = psis[encode_batch(code, inputs)] if inputs.shape[1] else np.zeros((n, 0))
    if fixed_first:
        phases = np.concatenate([np.zeros((n, 1)), phases], axis=1)
    rotated = phase_matrix(phases, L) * gs.reshape(n, M_t)
    return inputs, circular_shift(rotated, -shift), metric, k


def tespa_init(h_hat, L, code, block_shift=True):
    """Session state after the initial full quantization (k = 0)."""
    return TespaState(np.asarray(h_hat, dtype=complex), 0, L, code, block_shift)


def _update(state, h_k, thetas, fixed_first):
    _check(state, h_k)
    k = state.k + 1
    inputs, new_hat, metric, ti = tespa_step_batch(
        state.code, state.L, state.h_hat[None], np.asarray(h_k, dtype=complex)[None],
        state.shift_at(k), thetas, fixed_first,
    )
    grid = theta_grid() if thetas is None else np.atleast_1d(thetas)
    fw = FeedbackWord(tuple(int(u) for u in inputs[0]), state.code.b_in, "tespa",
                      float(grid[ti[0]]))
    return fw, replace(state, h_hat=new_hat[0], k=k), float(metric[0])


def tespa_update(state, h_k, thetas=None):
    """Advance the session by one update; returns ``(FeedbackWord, new state, metric)``."""
    return _update(state, h_k, thetas, fixed_first=False)


def tespa_update_fixed_first(state, h_k, thetas=None):
    """As :func:`tespa_update` with the first block's phase pinned to 0.

    Saves ``b_in`` feedback bits; the pinned phase is absorbed by the
    global phase search, so pass a finer ``thetas`` grid to compensate.
    """
    return _update(state, h_k, thetas, fixed_first=True)


def tespa_spatial(u1_hat, h_k, L, code, thetas=None):
    """One-shot adjustment of a quantized dominant eigenvector toward ``h_k``.

    Returns ``(FeedbackWord, h_hat_k, metric)``.
    """
    u1_hat = np.asarray(u1_hat, dtype=complex)
    if not np.isclose(np.linalg.norm(u1_hat), 1.0, atol=1e-9):
        raise ValueError("u1_hat must have unit norm")
    fw, state, metric = tespa_update(tespa_init(u1_hat, L, code, block_shift=False), h_k, thetas)
    return fw, state.h_hat, metric


def reconstruct_update(state, b, fixed_first=False):
    """Base-station side of an update: apply the fed-back phases to ``state.h_hat``."""
    k = state.k + 1
    shift = state.shift_at(k)
    inputs = np.asarray(b.inputs if isinstance(b, FeedbackWord) else b, dtype=np.int64)
    psis = PhaseSet(state.code.b_out).psis
    phases = psis[encode_batch(state.code, inputs[None])[0]] if inputs.size else np.zeros(0)
    if fixed_first:
        phases = np.concatenate([[0.0], phases])
    if phases.size != state.M_t // state.L:
        raise ValueError("feedback word has the wrong number of stages")
    g = circular_shift(state.h_hat, shift)
    new = circular_shift(phase_matrix(phases, state.L) * g, -shift)
    return replace(state, h_hat=new, k=k)


def trace_record(k, fw, theta_index, metric, gain_db):
    return {"k": int(k), "feedback_bits": fw.bitstring() if fw is not None else "",
            "theta_index": int(theta_index), "metric": float(metric), "gain_db": float(gain_db)}


def write_trace(path, records):
    """Session trace as JSON lines, one record per update."""
    with open(path, "w") as f:
        for rec in records:
            f.write(json.dumps(rec) + "\n")


def read_trace(path):
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]
