"""Ungerboeck-style convolutional codes and their trellis.

The same tables serve as the quantizer's search lattice (Viterbi, user side)
and as the reconstructor (encoder, base-station side).

Supported codes are rate ``b/(b+1)`` with ``2**(b+1)`` states::

    next_state(s, u) = 2**b * (s & 1) + u
    label(s, u)      = 2 * rev_b(u ^ (s >> 1)) + (s & 1)

where ``rev_b`` reverses the ``b``-bit pattern.  Branches leaving an even
state carry even labels, branches leaving an odd state carry odd labels, and
the branches entering any state carry distinct labels.  For ``b = 2`` this is
the familiar 8-state trellis::

    state | labels for u = 0..3 | next states
      0   |  0 4 2 6            | 0 1 2 3
      1   |  1 5 3 7            | 4 5 6 7
      2   |  4 0 6 2            | 0 1 2 3
      3   |  5 1 7 3            | 4 5 6 7
      4   |  2 6 0 4            | 0 1 2 3
      5   |  3 7 1 5            | 4 5 6 7
      6   |  6 2 4 0            | 0 1 2 3
      7   |  7 3 5 1            | 4 5 6 7

Input ``01`` from state 0 emits label ``100`` and moves to state 1.
"""
from dataclasses import dataclass
from functools import cached_property
import itertools
import json

import numpy as np

from .errors import ConfigError

SUPPORTED_CODES = {(4, 1), (8, 2), (16, 3)}
MAX_ENUMERATED_PATHS = 2 ** 20


def _bit_reverse(x, width):
    out = 0
    for _ in range(width):
        out = (out << 1) | (x & 1)
        x >>= 1
    return out


@dataclass(frozen=True, eq=False)
class ConvCode:
    """State-transition and output-label tables of a rate b_in/(b_in+1) code."""

    num_states: int
    b_in: int
    next_state: np.ndarray
    output_label: np.ndarray

    @property
    def b_out(self):
        return self.b_in + 1

    @property
    def n_inputs(self):
        return 1 << self.b_in

    @property
    def n_labels(self):
        return 1 << self.b_out

    @cached_property
    def predecessors(self):
        """Per next-state arrays ``(prev_state, input, label)``.

        Shape ``(num_states, n_inputs)``, sorted by ascending previous state so
        that an argmin over the last axis keeps the lowest predecessor on ties.
        """
        incoming = [[] for _ in range(self.num_states)]
        for s in range(self.num_states):
            for u in range(self.n_inputs):
                incoming[self.next_state[s, u]].append((s, u, self.output_label[s, u]))
        width = {len(x) for x in incoming}
        if len(width) != 1:
            raise ConfigError("trellis must have the same in-degree at every state")
        arr = np.array([sorted(x) for x in incoming], dtype=np.int64)
        return arr[..., 0], arr[..., 1], arr[..., 2]

    def transitions(self):
        """Rows of ``(state, input, next_state, label)``."""
        return [
            (s, u, int(self.next_state[s, u]), int(self.output_label[s, u]))
            for s in range(self.num_states)
            for u in range(self.n_inputs)
        ]

    def to_json(self):
        rows = [
            {"state": s, "input": u, "next_state": n, "label": lab}
            for s, u, n, lab in self.transitions()
        ]
        return json.dumps(
            {"num_states": self.num_states, "b_in": self.b_in, "b_out": self.b_out,
             "transitions": rows},
            indent=2,
        )


@dataclass(frozen=True)
class TrellisPath:
    start_state: int
    inputs: tuple
    output_labels: tuple


def build_ungerboeck_code(num_states, b_in):
    """Build one of the supported codes: (4, 1), (8, 2) or (16, 3)."""
    if (num_states, b_in) not in SUPPORTED_CODES:
        raise ConfigError(
            f"unsupported code ({num_states} states, {b_in} input bits); "
            f"choose one of {sorted(SUPPORTED_CODES)}"
        )
    n_in = 1 << b_in
    next_state = np.empty((num_states, n_in), dtype=np.int64)
    label = np.empty((num_states, n_in), dtype=np.int64)
    for s in range(num_states):
        parity = s & 1
        for u in range(n_in):
            next_state[s, u] = n_in * parity + u
            label[s, u] = 2 * _bit_reverse(u ^ (s >> 1), b_in) + parity
    next_state.setflags(write=False)
    label.setflags(write=False)
    return ConvCode(num_states, b_in, next_state, label)


def code_for_rate(b_in):
    """The supported code with ``b_in`` input bits per stage."""
    return build_ungerboeck_code(1 << (b_in + 1), b_in)


def encode(code, inputs):
    """Walk the trellis from state 0 and return the resulting path."""
    inputs = tuple(int(u) for u in inputs)
    state = 0
    labels = []
    for u in inputs:
        if not 0 <= u < code.n_inputs:
            raise ValueError(f"input symbol {u} outside [0, {code.n_inputs})")
        labels.append(int(code.output_label[state, u]))
        state = int(code.next_state[state, u])
    return TrellisPath(0, inputs, tuple(labels))


def encode_batch(code, inputs):
    """Vectorised :func:`encode`: ``inputs`` (n, T) -> labels (n, T)."""
    inputs = np.asarray(inputs, dtype=np.int64)
    if inputs.size and (inputs.min() < 0 or inputs.max() >= code.n_inputs):
        raise ValueError(f"input symbols must lie in [0, {code.n_inputs})")
    labels = np.empty_like(inputs)
    state = np.zeros(inputs.shape[0], dtype=np.int64)
    for t in range(inputs.shape[1]):
        labels[:, t] = code.output_label[state, inputs[:, t]]
        state = code.next_state[state, inputs[:, t]]
    return labels


def enumerate_paths(code, T):
    """Every path of length ``T`` from state 0 (brute-force oracle, small T only)."""
    if (1 << (code.b_in * T)) > MAX_ENUMERATED_PATHS:
        raise ValueError(f"refusing to enumerate 2**{code.b_in * T} paths")
    return [encode(code, u) for u in itertools.product(range(code.n_inputs), repeat=T)]


def viterbi(code, branch_metrics, init_metric=None):
    """Minimum-metric path through the trellis, starting in state 0.

    Parameters
    ----------
    branch_metrics : ndarray, shape (N, T, n_labels)
        Cost of emitting each label at each stage, for N independent searches.
    init_metric : ndarray, shape (N,), optional
        Constant added to every path of the corresponding search.

    Returns
    -------
    inputs : ndarray of int, shape (N, T)
    metric : ndarray, shape (N,)

    Ties keep the lower predecessor state and, at the end, the lower final
    state.
    """
    bm = np.asarray(branch_metrics, dtype=float)
    n, T, _ = bm.shape
    prev, prev_in, prev_lab = code.predecessors
    metric = np.full((n, code.num_states), np.inf)
    metric[:, 0] = 0.0 if init_metric is None else init_metric
    survivors = np.empty((n, T, code.num_states), dtype=np.int8)
    rows = np.arange(n)[:, None]
    for t in range(T):
        cand = metric[:, prev] + bm[:, t][:, prev_lab]
        choice = cand.argmin(axis=2)
        metric = np.take_along_axis(cand, choice[..., None], axis=2)[..., 0]
        survivors[:, t] = choice
    state = metric.argmin(axis=1)
    best = metric[np.arange(n), state]
    inputs = np.empty((n, T), dtype=np.int64)
    for t in range(T - 1, -1, -1):
        j = survivors[rows[:, 0], t, state]
        inputs[:, t] = prev_in[state, j]
        state = prev[state, j]
    return inputs, best
