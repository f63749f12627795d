import json

import pytest

from tecsim.cli import main
from tecsim.harness import parse_results, parse_spec_text


def test_beamforming_run(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["beamforming", "--out", str(out), "--trials", "200", "--seed", "3",
               "--set", "sweep=8,16", "--set", "schemes=genie,te_lte"])
    assert rc == 0
    rows = parse_results(out / "results.csv")
    assert len(rows) == 4 and all(r.seed == 3 and r.trials == 200 for r in rows)
    cfg = parse_spec_text((out / "config.txt").read_text())
    assert cfg.sweep == (8, 16) and cfg.trials == 200
    assert "te_lte.gain_db" in capsys.readouterr().out


def test_spec_file_and_json(tmp_path):
    spec = tmp_path / "x.spec"
    spec.write_text("experiment = beamforming\nschemes = rvq, rvq_analytic\nsweep = 4\nB = 1.5\n")
    rc = main(["beamforming", "--spec", str(spec), "--out", str(tmp_path), "--format", "json",
               "--trials", "100", "--threads", "2"])
    assert rc == 0
    data = json.loads((tmp_path / "results.json").read_text())
    assert [d["metric"] for d in data] == ["rvq.gain_db", "rvq_analytic.gain_db"]


def test_tespa_spatial_run(tmp_path):
    rc = main(["tespa", "--out", str(tmp_path), "--trials", "50", "--set", "channel=exp_spatial",
               "--set", "schemes=tespa_spatial,te_lte", "--set", "sweep=16", "--set", "spa_L=2"])
    assert rc == 0


def test_exit_codes(tmp_path, capsys):
    assert main(["rate", "--out", str(tmp_path), "--set", "K=3", "--set", "M_r=2"]) == 2
    assert main(["beamforming", "--out", str(tmp_path), "--set", "B=0.3"]) == 2
    assert main(["beamforming", "--out", str(tmp_path), "--set", "nonsense"]) == 2
    assert main(["beamforming", "--spec", str(tmp_path / "missing.spec")]) == 3
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["beamforming", "--out", str(blocker / "sub"), "--trials", "5"]) == 3
    assert "error" in capsys.readouterr().err


def test_argparse_errors():
    with pytest.raises(SystemExit) as e:
        main(["beamforming", "--format", "xml"])
    assert e.value.code == 2


def test_design_codebook(tmp_path):
    p = tmp_path / "cb.json"
    assert main(["design-codebook", "--words", "8", "--starts", "2", "--out", str(p)]) == 0
    d = json.loads(p.read_text())
    assert d["dim_l"] == 4 and len(d["words"]) == 8
    assert main(["design-codebook", "--kind", "lte", "--words", "16", "--out", str(p)]) == 0
    assert main(["design-codebook", "--kind", "lte", "--words", "12"]) == 2


def test_dump_trellis(capsys):
    assert main(["dump-trellis", "--b-in", "2"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["num_states"] == 8 and len(d["transitions"]) == 32
