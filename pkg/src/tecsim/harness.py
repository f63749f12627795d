"""Seeded Monte Carlo experiments and their result files.

Trials are processed in fixed chunks of :data:`CHUNK` consecutive trial
indices.  Every random draw of trial ``i`` comes from substream ``i``, and the
per-trial values are concatenated in index order before averaging, so the
thread count changes the wall time and nothing else.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
import csv
from functools import lru_cache
import json

import numpy as np

from .channel import (ChannelModel, THETA_MODES, dominant_eigenvectors_batch, draw_exp_spatial_batch,
                      draw_iid, gauss_markov_chain, jakes_eta)
from .codebook import MAX_VQ_BITS, design_ed_codebook, lte_dft_codebook, rvq_codebook
from .errors import ConfigError
from .quantizer import make_config, quantize_batch, reconstruct_batch, select_vq_batch, theta_grid
from .rng import stream_rng
from .tespa import tespa_init, tespa_step_batch
from .trellis import code_for_rate

CHUNK = 250
Z95 = 1.959963984540054
COLUMNS = ["sweep", "metric", "value", "halfwidth", "trials", "seed"]

EXPERIMENTS = ("beamforming", "rate", "tespa")
SCHEMES = {
    "beamforming": ("genie", "te_ed", "te_lte", "te_ed_random_map", "te_lte_random_map",
                    "rvq", "rvq_analytic", "ntcq_reference_off"),
    "rate": ("genie", "te_ed", "rvq"),
    "tespa": ("genie", "stale", "tespa_shifted", "tespa_unshifted", "tespa_fixed_first",
              "tespa_spatial", "te_lte", "te_ed", "rvq_analytic"),
}
DEFAULT_SCHEMES = {
    "beamforming": ("genie", "te_ed", "te_lte", "rvq_analytic"),
    "rate": ("genie", "te_ed", "rvq"),
    "tespa": ("tespa_shifted", "tespa_unshifted", "rvq_analytic"),
}
SPATIAL_SCHEMES = ("genie", "tespa_spatial", "te_lte", "te_ed")
TEMPORAL_SCHEMES = ("genie", "stale", "tespa_shifted", "tespa_unshifted", "tespa_fixed_first",
                    "rvq_analytic")


@dataclass
class ExperimentSpec:
    """Everything that determines a run.

    ``sweep`` holds M_t values (beamforming, spatial TE-SPA), SNR points in dB
    (rate) or update indices k (temporal TE-SPA).  ``B`` is feedback bits per
    entry for TEC and RVQ, ``B_spa`` the same for each TE-SPA update, ``B_u1``
    the TEC rate used on the dominant eigenvector in spatial mode.  ``spa_L``
    is the TE-SPA block length (defaults to ``L``).
    """

    experiment: str = "beamforming"
    schemes: tuple = ()
    channel: str = "iid_rayleigh"
    sweep: tuple = (32, 64)
    trials: int = 10000
    seed: int = 0
    codebook_seed: int = 0
    B: float = 0.75
    B_spa: float = 0.5
    B_u1: float = 0.5
    L: int = 4
    spa_L: int = None
    M_t: int = 64
    M_r: int = 1
    K: int = 1
    eta: float = None
    alpha: float = 0.9
    theta_mode: str = "per_realization"
    K_theta: int = 16
    threads: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}")
        if not self.schemes:
            self.schemes = DEFAULT_SCHEMES[self.experiment]
        if isinstance(self.schemes, str):
            self.schemes = tuple(s.strip() for s in self.schemes.split(",") if s.strip())
        self.schemes = tuple(self.schemes)
        self.sweep = tuple(self.sweep)
        if self.spa_L is None:
            self.spa_L = self.L
        if self.eta is None and self.channel == "gauss_markov":
            self.eta = round(jakes_eta(2.5e9, 5e-3, 3 / 3.6), 4)
        self.validate()

    def validate(self):
        bad = [s for s in self.schemes if s not in SCHEMES[self.experiment]]
        if bad:
            raise ConfigError(f"schemes {bad} are not available for {self.experiment!r}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if not self.sweep:
            raise ConfigError("the sweep is empty")
        if self.theta_mode not in THETA_MODES:
            raise ConfigError(f"theta_mode must be one of {THETA_MODES}")
        if self.K_theta < 1:
            raise ConfigError("K_theta must be positive")
        if self.experiment == "beamforming":
            if self.channel != "iid_rayleigh":
                raise ConfigError("the beamforming experiment uses i.i.d. Rayleigh channels")
            for m in self.sweep:
                _check_tec(self, int(m), self.B, self.L)
        elif self.experiment == "rate":
            if self.channel != "iid_rayleigh":
                raise ConfigError("the rate experiment uses i.i.d. Rayleigh channels")
            if self.K > self.M_r:
                raise ConfigError(f"K={self.K} streams need at least K receive antennas (M_r={self.M_r})")
            if self.K > self.M_t:
                raise ConfigError("K cannot exceed M_t")
            _check_tec(self, self.M_t, self.B, self.L)
        else:
            if self.channel == "gauss_markov":
                ChannelModel("gauss_markov", self.M_t, eta=self.eta)
                bad = [s for s in self.schemes if s not in TEMPORAL_SCHEMES]
                if any(int(k) < 0 or int(k) != k for k in self.sweep):
                    raise ConfigError("temporal sweep points are update indices k >= 0")
                _check_tec(self, self.M_t, self.B, self.L)
                _check_spa(self, self.M_t)
            elif self.channel == "exp_spatial":
                ChannelModel("exp_spatial", self.M_t, alpha=self.alpha, theta_mode=self.theta_mode)
                bad = [s for s in self.schemes if s not in SPATIAL_SCHEMES]
                for m in self.sweep:
                    _check_tec(self, int(m), self.B_u1, self.L)
                    _check_tec(self, int(m), self.B, self.L)
                    _check_spa(self, int(m))
            else:
                raise ConfigError("TE-SPA runs on gauss_markov or exp_spatial channels")
            if bad:
                raise ConfigError(f"schemes {bad} do not apply to {self.channel!r} channels")

    def to_text(self):
        """``key = value`` lines that :func:`parse_spec_text` reads back."""
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ", ".join(str(x) for x in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


@dataclass
class ResultRow:
    sweep: float
    metric: str
    value: float
    halfwidth: float
    trials: int
    seed: int


# ---------------------------------------------------------------- spec files

_INT_KEYS = {"trials", "seed", "codebook_seed", "L", "spa_L", "M_t", "M_r", "K", "K_theta", "threads"}
_FLOAT_KEYS = {"B", "B_spa", "B_u1", "eta", "alpha"}
_JAKES_KEYS = ("carrier_hz", "tau_s", "speed_mps")


def _number(text):
    v = float(text)
    return int(v) if v.is_integer() and "." not in text and "e" not in text.lower() else v


def parse_spec_text(text, overrides=None):
    """Build an :class:`ExperimentSpec` from ``key = value`` lines.

    ``#`` starts a comment, lists are comma separated, and ``overrides`` (a
    dict) wins over the file.  ``carrier_hz``, ``tau_s`` and ``speed_mps``
    together set ``eta`` through Jakes' model.
    """
    raw = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        raw[key] = value
    raw.update({k: str(v) for k, v in (overrides or {}).items() if v is not None})

    known = {f.name for f in fields(ExperimentSpec)}
    kw = {}
    jakes = {}
    try:
        for key, value in raw.items():
            if key in _JAKES_KEYS:
                jakes[key] = float(value)
            elif key not in known:
                raise ConfigError(f"unknown key {key!r}")
            elif value in ("", "None", "none"):
                continue
            elif key in _INT_KEYS:
                kw[key] = int(value)
            elif key in _FLOAT_KEYS:
                kw[key] = float(value)
            elif key == "sweep":
                kw[key] = tuple(_number(x.strip()) for x in value.split(",") if x.strip())
            elif key == "schemes":
                kw[key] = tuple(x.strip() for x in value.split(",") if x.strip())
            else:
                kw[key] = value
    except ValueError as exc:
        raise ConfigError(f"bad value: {exc}") from None
    if jakes:
        if len(jakes) != 3:
            raise ConfigError(f"Jakes' model needs all of {_JAKES_KEYS}")
        if "eta" in kw:
            raise ConfigError("give either eta or the Jakes' model parameters, not both")
        kw["eta"] = jakes_eta(jakes["carrier_hz"], jakes["tau_s"], jakes["speed_mps"])
    return ExperimentSpec(**kw)


def load_spec(path, overrides=None):
    with open(path) as f:
        return parse_spec_text(f.read(), overrides)


# ------------------------------------------------------------------- helpers

def _b_in(spec, B, L):
    b = B * L
    if abs(b - round(b)) > 1e-9 or round(b) not in (1, 2, 3):
        raise ConfigError(f"B={B} with L={L} gives {b} input bits per stage; need 1, 2 or 3")
    return int(round(b))


def _check_tec(spec, M_t, B, L):
    uses_tec = any(s.startswith(("te_", "tespa_")) for s in spec.schemes)
    if uses_tec:
        if L < 1 or M_t % L:
            raise ConfigError(f"L={L} does not divide M_t={M_t}")
        b = _b_in(spec, B, L)
        uses_lte = any(s.startswith("te_lte") or s == "tespa_spatial" for s in spec.schemes)
        if uses_lte and (L != 4 or b not in (2, 3)):
            raise ConfigError("the LTE codebook needs L = 4 and B in {1/2, 3/4}")
    if "rvq" in spec.schemes:
        bt = B * M_t
        if abs(bt - round(bt)) > 1e-9:
            raise ConfigError(f"B_tot = {bt} is not an integer")
        if round(bt) > MAX_VQ_BITS:
            raise ConfigError(f"simulated RVQ needs B_tot <= {MAX_VQ_BITS}, got {round(bt)}")


def _check_spa(spec, M_t):
    L = spec.spa_L
    if L < 2 or L % 2:
        raise ConfigError("block shifting needs an even TE-SPA block length")
    if M_t % L:
        raise ConfigError(f"spa_L={L} does not divide M_t={M_t}")
    b = spec.B_spa * L
    if abs(b - round(b)) > 1e-9 or round(b) not in (1, 2, 3):
        raise ConfigError(f"B_spa={spec.B_spa} with spa_L={L} gives {b} bits per stage")


@lru_cache(maxsize=None)
def ed_codebook(L, n_words, rank_k, seed):
    """Cached ED codebook design."""
    return design_ed_codebook(L, n_words, rank_k, rng_seed=seed)


def _tec_config(spec, M_t, B, kind, rank_k=1):
    b = _b_in(spec, B, spec.L)
    n = 1 << (b + 1)
    if kind == "ed":
        cb = ed_codebook(spec.L, n, rank_k, spec.codebook_seed)
    else:
        cb = lte_dft_codebook(spec.L, n)
    return make_config(M_t, cb, code_for_rate(b), "proposed", spec.K_theta)


def _random_maps(seed, first, n, n_labels):
    return np.stack([stream_rng(seed, "mapping", first + i).permutation(n_labels) for i in range(n)])


def _chunks(trials):
    return [(s, min(CHUNK, trials - s)) for s in range(0, trials, CHUNK)]


def _run_chunks(spec, fn):
    """Apply ``fn(first, n) -> {name: values}`` to every chunk and join in order."""
    jobs = _chunks(spec.trials)
    if spec.threads > 1:
        with ThreadPoolExecutor(spec.threads) as pool:
            parts = list(pool.map(lambda j: fn(*j), jobs))
    else:
        parts = [fn(*j) for j in jobs]
    return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}


def gain_db(samples):
    """``(10 log10 mean, 95% half-width)``; the half-width uses the delta method."""
    samples = np.asarray(samples, dtype=float)
    m = samples.mean()
    sd = samples.std(ddof=1) if samples.size > 1 else 0.0
    return 10 * np.log10(m), 10 / np.log(10) * Z95 * sd / (np.sqrt(samples.size) * m)


def mean_ci(samples):
    samples = np.asarray(samples, dtype=float)
    sd = samples.std(ddof=1) if samples.size > 1 else 0.0
    return samples.mean(), Z95 * sd / np.sqrt(samples.size)


def rvq_analytic_gain_db(M_t, B_tot):
    """``10 log10(M_t (1 - 2^(-B_tot / (M_t - 1))))``."""
    if M_t < 2:
        raise ConfigError("the RVQ approximation needs M_t >= 2")
    return float(10 * np.log10(M_t * (1 - 2.0 ** (-B_tot / (M_t - 1)))))


def bf_gain(h, c):
    """Per-trial ``|h^H c|^2`` for rows of ``h`` and ``c``."""
    return np.abs(np.sum(h.conj() * c, axis=-1)) ** 2


def achievable_rate(H, F, snr):
    """Per-trial ``log2 det(I + snr/K F^H H H^H F)``; ``F`` (n, M_t, K) semi-unitary."""
    K = F.shape[-1]
    G = F.conj().transpose(0, 2, 1) @ H
    return _logdet_eye_plus(snr / K * (G @ G.conj().transpose(0, 2, 1)))


def _rvq_select(cb, X):
    # keep the (rows x codewords) inner-product block at about 2**21 entries
    step = max(1, (1 << 21) // cb.n_words)
    return np.concatenate([select_vq_batch(cb, X[i:i + step]) for i in range(0, len(X), step)])


def _logdet_eye_plus(A):
    """``log2 det(I + A)`` over the last two axes; closed form for 1x1 and 2x2."""
    K = A.shape[-1]
    if K == 1:
        return np.log2(1 + A[..., 0, 0].real)
    if K == 2:
        a, d = A[..., 0, 0].real, A[..., 1, 1].real
        return np.log2((1 + a) * (1 + d) - np.abs(A[..., 0, 1]) ** 2)
    return np.linalg.slogdet(np.eye(K) + A)[1] / np.log(2)


def _rvq_rate(W, H, snr):
    """Best achievable rate over semi-unitary codewords ``W`` (N, M_t, K)."""
    N, M, K = W.shape
    Wh = W.transpose(0, 2, 1).reshape(N * K, M).conj()
    out = np.empty(len(H))
    step = max(1, (1 << 18) // N)
    for i in range(0, len(H), step):
        G = (Wh @ H[i:i + step]).reshape(-1, N, K, H.shape[-1])
        A = snr / K * (G @ G.conj().transpose(0, 1, 3, 2))
        out[i:i + step] = _logdet_eye_plus(A).max(axis=1)
    return out


def _row(spec, sweep, metric, value, halfwidth, trials):
    return ResultRow(float(sweep), metric, float(value), float(halfwidth), int(trials), spec.seed)


def _gain_rows(spec, sweep, values, order):
    rows = []
    for name in order:
        if name in values:
            g, hw = gain_db(values[name])
            rows.append(_row(spec, sweep, f"{name}.gain_db", g, hw, len(values[name])))
    return rows


# --------------------------------------------------------------- experiments

def run_beamforming_experiment(spec):
    """Average beamforming gain in dB per M_t for the MISO schemes in ``spec``."""
    if spec.experiment != "beamforming":
        raise ConfigError("spec is not a beamforming experiment")
    spec.validate()
    rows = []
    for M_t in (int(m) for m in spec.sweep):
        model = ChannelModel("iid_rayleigh", M_t, seed=spec.seed)
        cfgs = {}
        for s in spec.schemes:
            if s.startswith("te_"):
                kind = "ed" if s.startswith("te_ed") else "lte"
                cfgs[s] = _tec_config(spec, M_t, spec.B, kind)
        rvq_cb = None
        if "rvq" in spec.schemes:
            rvq_cb = rvq_codebook(M_t, int(round(spec.B * M_t)), spec.seed)

        def chunk(first, n):
            H = draw_iid(model, n, first)[:, :, 0]
            out = {}
            for s in spec.schemes:
                if s == "genie":
                    out[s] = np.sum(np.abs(H) ** 2, axis=1)
                elif s.startswith("te_"):
                    cfg = cfgs[s]
                    maps = None
                    if s.endswith("random_map"):
                        maps = _random_maps(spec.seed, first, n, cfg.code.n_labels)
                    inp, _, _ = quantize_batch(cfg, H, maps)
                    out[s] = bf_gain(H, reconstruct_batch(cfg, inp, maps)[:, :, 0])
                elif s == "rvq":
                    idx = _rvq_select(rvq_cb, H)
                    out[s] = bf_gain(H, rvq_cb.words[idx, :, 0])
            return out

        sim = [s for s in spec.schemes if s not in ("rvq_analytic", "ntcq_reference_off")]
        if sim:
            rows += _gain_rows(spec, M_t, _run_chunks(spec, chunk), spec.schemes)
        if "rvq_analytic" in spec.schemes:
            rows.append(_row(spec, M_t, "rvq_analytic.gain_db",
                             rvq_analytic_gain_db(M_t, spec.B * M_t), 0.0, 0))
    return rows


def run_rate_experiment(spec):
    """Average achievable rate (bps/Hz) per SNR point in dB."""
    if spec.experiment != "rate":
        raise ConfigError("spec is not a rate experiment")
    spec.validate()
    K, M_t = spec.K, spec.M_t
    model = ChannelModel("iid_rayleigh", M_t, spec.M_r, seed=spec.seed)
    snrs = [10 ** (float(s) / 10) for s in spec.sweep]
    cfg = _tec_config(spec, M_t, spec.B, "ed", rank_k=K) if "te_ed" in spec.schemes else None
    W = None
    if "rvq" in spec.schemes:
        W = np.sqrt(K) * rvq_codebook(M_t, int(round(spec.B * M_t)), spec.seed, rank_k=K).words

    def chunk(first, n):
        H = draw_iid(model, n, first)
        U, _ = dominant_eigenvectors_batch(H @ H.conj().transpose(0, 2, 1), K)
        F = {}
        if "genie" in spec.schemes:
            F["genie"] = U
        if cfg is not None:
            inp, _, _ = quantize_batch(cfg, U)
            # scaled rank-K codewords have columns of norm 1/sqrt(K) per block
            F["te_ed"] = np.sqrt(K) * reconstruct_batch(cfg, inp)
        out = {}
        for j, snr in enumerate(snrs):
            for name, f in F.items():
                out[f"{name}@{j}"] = achievable_rate(H, f, snr)
            if W is not None:
                out[f"rvq@{j}"] = _rvq_rate(W, H, snr)
        return out

    vals = _run_chunks(spec, chunk)
    rows = []
    for j, s in enumerate(spec.sweep):
        for name in spec.schemes:
            key = f"{name}@{j}"
            if key in vals:
                m, hw = mean_ci(vals[key])
                rows.append(_row(spec, s, f"{name}.rate_bps_hz", m, hw, len(vals[key])))
    return rows


def _tespa_temporal(spec):
    M_t, L = spec.M_t, spec.spa_L
    model = ChannelModel("gauss_markov", M_t, seed=spec.seed, eta=spec.eta)
    k_max = int(max(spec.sweep))
    cfg = _tec_config(spec, M_t, spec.B, "ed")
    code = code_for_rate(int(round(spec.B_spa * L)))
    thetas = theta_grid(spec.K_theta)
    variants = {"tespa_shifted": (True, False), "tespa_unshifted": (False, False),
                "tespa_fixed_first": (True, True)}

    def chunk(first, n):
        Hs = gauss_markov_chain(model, n, k_max, first)
        inp, _, _ = quantize_batch(cfg, Hs[:, 0])
        h0 = reconstruct_batch(cfg, inp)[:, :, 0]
        out = {}
        for k in range(k_max + 1):
            if "genie" in spec.schemes:
                out[f"genie@{k}"] = np.sum(np.abs(Hs[:, k]) ** 2, axis=1)
            if "stale" in spec.schemes:
                out[f"stale@{k}"] = bf_gain(Hs[:, k], h0)
        for name, (shift, fixed) in variants.items():
            if name not in spec.schemes:
                continue
            state = tespa_init(h0, L, code, block_shift=shift)
            out[f"{name}@0"] = bf_gain(Hs[:, 0], h0)
            h_hat = h0
            for k in range(1, k_max + 1):
                _, h_hat, _, _ = tespa_step_batch(code, L, h_hat, Hs[:, k], state.shift_at(k),
                                                  thetas, fixed)
                out[f"{name}@{k}"] = bf_gain(Hs[:, k], h_hat)
        return out

    sim = [s for s in spec.schemes if s != "rvq_analytic"]
    vals = _run_chunks(spec, chunk) if sim else {}
    rows = []
    for k in spec.sweep:
        k = int(k)
        for name in spec.schemes:
            key = f"{name}@{k}"
            if key in vals:
                g, hw = gain_db(vals[key])
                rows.append(_row(spec, k, f"{name}.gain_db", g, hw, len(vals[key])))
            elif name == "rvq_analytic":
                rows.append(_row(spec, k, "rvq_analytic.gain_db",
                                 rvq_analytic_gain_db(M_t, spec.B * M_t), 0.0, 0))
    return rows


def _tespa_spatial(spec):
    L = spec.spa_L
    code = code_for_rate(int(round(spec.B_spa * L)))
    thetas = theta_grid(spec.K_theta)
    rows = []
    for M_t in (int(m) for m in spec.sweep):
        model = ChannelModel("exp_spatial", M_t, seed=spec.seed, alpha=spec.alpha,
                             theta_mode=spec.theta_mode)
        cfg_u1 = _tec_config(spec, M_t, spec.B_u1, "lte")
        direct = {s: _tec_config(spec, M_t, spec.B, "lte" if s == "te_lte" else "ed")
                  for s in ("te_lte", "te_ed") if s in spec.schemes}

        def chunk(first, n):
            _, H, U1 = draw_exp_spatial_batch(model, n, first)
            out = {}
            if "genie" in spec.schemes:
                out["genie"] = np.sum(np.abs(H) ** 2, axis=1)
            if "tespa_spatial" in spec.schemes:
                inp, _, _ = quantize_batch(cfg_u1, U1)
                u1_hat = reconstruct_batch(cfg_u1, inp)[:, :, 0]
                _, h_hat, _, _ = tespa_step_batch(code, L, u1_hat, H, 0, thetas)
                out["tespa_spatial"] = bf_gain(H, h_hat)
            for s, cfg in direct.items():
                inp, _, _ = quantize_batch(cfg, H)
                out[s] = bf_gain(H, reconstruct_batch(cfg, inp)[:, :, 0])
            return out

        rows += _gain_rows(spec, M_t, _run_chunks(spec, chunk), spec.schemes)
    return rows


def run_tespa_experiment(spec):
    """Gain versus update index (Gauss-Markov) or versus M_t (exponential model)."""
    if spec.experiment != "tespa":
        raise ConfigError("spec is not a TE-SPA experiment")
    spec.validate()
    if spec.channel == "gauss_markov":
        return _tespa_temporal(spec)
    return _tespa_spatial(spec)


def run_experiment(spec):
    return {"beamforming": run_beamforming_experiment, "rate": run_rate_experiment,
            "tespa": run_tespa_experiment}[spec.experiment](spec)


# ------------------------------------------------------------------- results

def emit_results(rows, path, fmt="csv"):
    """Write rows as CSV (columns :data:`COLUMNS`) or as a JSON list of the same records."""
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    records = [asdict(r) for r in rows]
    with open(path, "w", newline="") as f:
        if fmt == "csv":
            w = csv.writer(f, lineterminator="\n")
            w.writerow(COLUMNS)
            for r in records:
                w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in COLUMNS])
        else:
            json.dump([{c: r[c] for c in COLUMNS} for r in records], f, indent=1)
            f.write("\n")
    return path


def parse_results(path, fmt=None):
    """Read a file written by :func:`emit_results` back into rows."""
    if fmt is None:
        fmt = "json" if str(path).endswith(".json") else "csv"
    with open(path, newline="") as f:
        if fmt == "json":
            records = json.load(f)
        else:
            records = list(csv.DictReader(f))
    return [ResultRow(float(r["sweep"]), r["metric"], float(r["value"]), float(r["halfwidth"]),
                      int(r["trials"]), int(r["seed"])) for r in records]


def rows_to_table(rows):
    """``{metric: {sweep: value}}`` view of a result list."""
    table = {}
    for r in rows:
        table.setdefault(r.metric, {})[r.sweep] = r.value
    return table
