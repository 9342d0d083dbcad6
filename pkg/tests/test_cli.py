import json

import numpy as np
import pytest

from matprof.cli import main
from matprof.io import ProfileDocument, load_series, save_series


@pytest.fixture
def series_file(tmp_path, walk):
    p = tmp_path / "t.csv"
    save_series(p, walk(300, seed=1))
    return p


def test_profile_stomp_matches_brute(series_file, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["profile", "--input", str(series_file), "--m", "20", "--algo", "stomp",
                 "--out", str(a)]) == 0
    assert main(["profile", "--input", str(series_file), "--m", "20", "--algo", "brute",
                 "--out", str(b)]) == 0
    pa, pb = ProfileDocument.load(a), ProfileDocument.load(b)
    assert np.abs(pa.P - pb.P).max() <= 1e-6
    assert pa.provenance["input_digest"].startswith("sha256:")


def test_unknown_flag_is_usage_error(series_file, capsys):
    assert main(["profile", "--input", str(series_file), "--m", "20", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err
    assert main([]) == 1
    assert main(["nonsense"]) == 1


def test_data_errors_exit_2(tmp_path, series_file):
    bad = tmp_path / "bad.csv"
    bad.write_text("1\n2\nabc\n")
    assert main(["profile", "--input", str(bad), "--m", "2"]) == 2
    assert main(["profile", "--input", str(tmp_path / "missing.csv"), "--m", "2"]) == 2
    assert main(["profile", "--input", str(series_file), "--m", "1000"]) == 2


def test_synth_is_deterministic(tmp_path, monkeypatch):
    for name in ("a.csv", "b.csv"):
        assert main(["synth", "--seed", "7", "--n", "500", "--m", "30",
                     "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_seeded_profile_is_reproducible(series_file, tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        main(["profile", "--input", str(series_file), "--m", "20", "--algo", "stamp",
              "--budget", "0.3", "--seed", "4", "--threads", "2", "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_motifs_discords_and_mdl(tmp_path, capsys):
    src = tmp_path / "m.tsbin"
    assert main(["synth", "--seed", "3", "--n", "800", "--d", "3", "--dims", "0,1",
                 "--m", "40", "--out", str(src)]) == 0
    assert main(["motifs", "--input", str(src), "--m", "40", "--count", "2", "--k", "2"]) == 0
    motifs = json.loads(capsys.readouterr().out)
    assert len(motifs) == 2 and motifs[0]["k"] == 2
    assert main(["discords", "--input", str(src), "--m", "40", "--count", "1"]) == 0
    assert len(json.loads(capsys.readouterr().out)) == 1
    assert main(["mdl-select", "--input", str(src), "--m", "40", "--bits", "4"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["chosen_k"] in (1, 2, 3) and len(rep["entries"]) == 3


def test_mprofile_constraints(tmp_path, capsys):
    src = tmp_path / "m.tsbin"
    main(["synth", "--kind", "walk", "--seed", "1", "--n", "200", "--d", "3", "--out", str(src)])
    assert main(["mprofile", "--input", str(src), "--m", "16", "--include", "0",
                 "--exclude", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["P"]) == 2 and doc["provenance"]["dims"] == [0, 1]
    assert main(["mprofile", "--input", str(src), "--m", "16", "--include", "1",
                 "--exclude", "1"]) == 2


def test_sdts_train_predict(tmp_path):
    s, lab, d, out = (tmp_path / n for n in ("s.csv", "l.csv", "d.json", "p.csv"))
    assert main(["synth", "--kind", "weak", "--seed", "2", "--m", "60", "--events", "15",
                 "--slop", "0.2", "--amplitude", "30", "--out", str(s),
                 "--labels-out", str(lab)]) == 0
    assert main(["sdts-train", "--input", str(s), "--labels", str(lab), "--m-set", "50,60",
                 "--out-dict", str(d)]) == 0
    assert json.loads(d.read_text())["shapes"]
    assert main(["sdts-predict", "--input", str(s), "--dict", str(d), "--out", str(out)]) == 0
    assert len(load_series(out)) == len(load_series(s))
    assert main(["sdts-train", "--input", str(s), "--labels", str(lab), "--m-set", "50",
                 "--lag", "10", "--out-dict", str(d)]) == 0


def test_converters(tmp_path, capsys, series_file):
    assert main(["dna2ts", "--sequence", "ACGT"]) == 0
    assert capsys.readouterr().out.split() == ["0.0", "2.0", "1.0", "2.0", "0.0"]
    assert main(["dna2ts", "--sequence", "AXG"]) == 2
    out = tmp_path / "d.csv"
    assert main(["downsample", "--input", str(series_file), "--factor", "7",
                 "--out", str(out)]) == 0
    assert len(load_series(out)) == 43


def test_predict_runtime(capsys):
    assert main(["predict-runtime", "--n", "2000", "--calib-n", "1000",
                 "--calib-seconds", "1.5"]) == 0
    assert json.loads(capsys.readouterr().out)["predicted_seconds"] == pytest.approx(6.0)
