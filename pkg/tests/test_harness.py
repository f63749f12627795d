import numpy as np
import pytest

from tecsim.errors import ConfigError
from tecsim.harness import (ExperimentSpec, ResultRow, emit_results, gain_db, load_spec,
                            parse_results, parse_spec_text, rows_to_table, run_beamforming_experiment,
                            run_experiment, run_rate_experiment, run_tespa_experiment,
                            rvq_analytic_gain_db)


def spec(**kw):
    kw.setdefault("trials", 300)
    return ExperimentSpec(**kw)


def test_genie_gain_at_64():
    rows = run_beamforming_experiment(spec(schemes=("genie",), sweep=(64,), trials=10000))
    assert rows[0].value == pytest.approx(10 * np.log10(64), abs=0.1)
    assert rows[0].trials == 10000


def test_rvq_analytic_rows():
    rows = run_beamforming_experiment(spec(schemes=("rvq_analytic",), sweep=(32, 64)))
    for r in rows:
        M = r.sweep
        assert r.value == 10 * np.log10(M * (1 - 2 ** (-0.75 * M / (M - 1))))
        assert r.trials == 0 and r.halfwidth == 0.0
    assert rvq_analytic_gain_db(4, 8) == pytest.approx(10 * np.log10(4 * (1 - 2 ** (-8 / 3))))


def test_reference_scheme_emits_nothing():
    rows = run_beamforming_experiment(spec(schemes=("genie", "ntcq_reference_off"), sweep=(8,)))
    assert [r.metric for r in rows] == ["genie.gain_db"]


def test_gains_below_genie():
    rows = run_beamforming_experiment(spec(schemes=("genie", "te_ed", "te_lte", "te_ed_random_map",
                                                    "te_lte_random_map"), sweep=(16,)))
    t = rows_to_table(rows)
    for name, v in t.items():
        assert v[16.0] <= t["genie.gain_db"][16.0] + 1e-12


def test_thread_count_does_not_change_results():
    a = run_experiment(spec(schemes=("te_ed", "te_lte_random_map"), sweep=(16,), trials=600))
    b = run_experiment(spec(schemes=("te_ed", "te_lte_random_map"), sweep=(16,), trials=600,
                            threads=3))
    assert a == b


def test_halfwidth_shrinks_with_trials():
    h1 = run_experiment(spec(schemes=("te_lte",), sweep=(16,), trials=1000))[0].halfwidth
    h4 = run_experiment(spec(schemes=("te_lte",), sweep=(16,), trials=4000))[0].halfwidth
    assert h1 / h4 == pytest.approx(2.0, rel=0.25)


def test_gain_db_delta_method():
    x = np.array([1.0, 3.0])
    g, hw = gain_db(x)
    assert g == pytest.approx(10 * np.log10(2))
    assert hw == pytest.approx(10 / np.log(10) * 1.959963984540054 * np.sqrt(2) / np.sqrt(2) / 2)


def test_rate_experiment():
    rows = run_rate_experiment(spec(experiment="rate", M_t=16, M_r=2, K=2, sweep=(-60, 10),
                                    trials=200))
    t = rows_to_table(rows)
    assert t["genie.rate_bps_hz"][-60.0] < 1e-4
    for name in ("te_ed.rate_bps_hz", "rvq.rate_bps_hz"):
        assert t[name][10.0] < t["genie.rate_bps_hz"][10.0]


def test_rate_needs_enough_receive_antennas():
    with pytest.raises(ConfigError):
        spec(experiment="rate", M_t=16, M_r=1, K=2, sweep=(0,))


def test_static_channel_tespa_improves():
    rows = run_tespa_experiment(spec(experiment="tespa", channel="gauss_markov", eta=1.0, M_t=16,
                                     B=0.5, schemes=("tespa_shifted", "genie"),
                                     sweep=tuple(range(6)), trials=500))
    g = [r.value for r in rows if r.metric == "tespa_shifted.gain_db"]
    assert all(b >= a - 1e-3 for a, b in zip(g, g[1:]))
    assert g[-1] > g[0]


def test_spatial_mode_rows():
    rows = run_tespa_experiment(spec(experiment="tespa", channel="exp_spatial", sweep=(16,),
                                     schemes=("tespa_spatial", "te_lte", "genie"), spa_L=2))
    assert {r.metric for r in rows} == {"tespa_spatial.gain_db", "te_lte.gain_db", "genie.gain_db"}


@pytest.mark.parametrize("kw", [
    dict(trials=0),
    dict(schemes=("bogus",)),
    dict(sweep=(30,)),
    dict(B=0.3),
    dict(schemes=("rvq",), sweep=(64,)),
    dict(experiment="tespa", channel="gauss_markov", eta=1.5),
    dict(experiment="tespa", channel="gauss_markov", spa_L=3),
    dict(experiment="tespa", channel="iid_rayleigh"),
    dict(experiment="tespa", channel="exp_spatial", schemes=("tespa_shifted",)),
    dict(experiment="nope"),
    dict(schemes=("te_lte",), B=0.25),
])
def test_invalid_specs(kw):
    with pytest.raises(ConfigError):
        spec(**kw)


def test_emit_roundtrip(tmp_path):
    rows = [ResultRow(64.0, "a.gain_db", 0.1 + 0.2, 1 / 3, 10, 7),
            ResultRow(32.0, "b.gain_db", -1e-17, 0.0, 0, 7)]
    for fmt in ("csv", "json"):
        p = tmp_path / f"r.{fmt}"
        emit_results(rows, p, fmt)
        assert parse_results(p) == rows
    assert (tmp_path / "r.csv").read_text().splitlines()[0] == "sweep,metric,value,halfwidth,trials,seed"


def test_empty_rows_give_header_only(tmp_path):
    p = tmp_path / "e.csv"
    emit_results([], p)
    assert p.read_text() == "sweep,metric,value,halfwidth,trials,seed\n"


def test_emit_errors(tmp_path):
    with pytest.raises(ConfigError):
        emit_results([], tmp_path / "x", "xml")
    with pytest.raises(OSError):
        emit_results([], tmp_path / "missing" / "x.csv")


def test_output_is_byte_identical(tmp_path):
    s = spec(schemes=("te_lte", "rvq_analytic"), sweep=(16,), trials=300, seed=11)
    emit_results(run_experiment(s), tmp_path / "a.csv")
    emit_results(run_experiment(s), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_spec_text_parsing(tmp_path):
    text = """
    # comment line
    experiment = tespa   # trailing comment
    channel = gauss_markov
    schemes = tespa_shifted, tespa_unshifted
    carrier_hz = 2.5e9
    tau_s = 5e-3
    speed_mps = 0.8333333333333334
    sweep = 0, 1, 2
    M_t = 16
    B = 0.5
    """
    s = parse_spec_text(text, {"trials": 50, "seed": None})
    assert s.schemes == ("tespa_shifted", "tespa_unshifted")
    assert s.sweep == (0, 1, 2) and s.trials == 50 and s.seed == 0
    assert s.eta == pytest.approx(0.9881, abs=5e-4)
    again = parse_spec_text(s.to_text())
    assert again == s
    p = tmp_path / "s.spec"
    p.write_text(text)
    assert load_spec(p, {"trials": 50}) == s


@pytest.mark.parametrize("text", ["experiment beamforming", "colour = red", "trials = many",
                                  "carrier_hz = 1e9", "eta = 0.9\ncarrier_hz = 1\ntau_s = 1\nspeed_mps = 1"])
def test_spec_text_errors(text):
    with pytest.raises(ConfigError):
        parse_spec_text(text)
