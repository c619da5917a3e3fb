import csv
import json
import subprocess
import sys

import pytest

from photoevents.cli import main, read_clusters_csv, write_atomic
from photoevents.data import read_photos


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    cfg = {"synth": {"num_events": 6, "photos_per_event": [4, 8], "seed": 7}}
    (d / "cfg.json").write_text(json.dumps(cfg))
    assert main(["synth", "--config", str(d / "cfg.json"), "--out-photos", str(d / "photos.jsonl"),
                 "--out-interactions", str(d / "inter.jsonl")]) == 0
    assert main(["train", "--config", str(d / "cfg.json"), "--photos", str(d / "photos.jsonl"),
                 "--interactions", str(d / "inter.jsonl"), "--model", str(d / "model.json")]) == 0
    return d


def run_cluster(d, mu, out):
    return main(["cluster", "--photos", str(d / "photos.jsonl"), "--interactions", str(d / "inter.jsonl"),
                 "--model", str(d / "model.json"), "--mu", str(mu), "--out", str(d / out)])


def test_cluster_csv_shape(workdir):
    assert run_cluster(workdir, 0.5, "c.csv") == 0
    rows = list(csv.reader(open(workdir / "c.csv")))
    photos = read_photos(workdir / "photos.jsonl")
    assert rows[0] == ["photo_id", "cluster_id"]
    assert sorted(r[0] for r in rows[1:]) == sorted(photos.ids)


@pytest.mark.parametrize("mu,expect", [(1.0, "singletons"), (1.7, "singletons"), (-0.01, "one")])
def test_threshold_boundaries(workdir, mu, expect):
    assert run_cluster(workdir, mu, f"b{mu}.csv") == 0
    labels = read_clusters_csv(workdir / f"b{mu}.csv")
    n_clusters = len(set(labels.values()))
    assert n_clusters == (len(labels) if expect == "singletons" else 1)


def test_evaluate_truth_csv(workdir):
    photos = read_photos(workdir / "photos.jsonl")
    ids = sorted({p.event_id for p in photos})
    text = "photo_id,cluster_id\n" + "".join(f"{p.photo_id},{ids.index(p.event_id)}\n" for p in photos)
    write_atomic(workdir / "truth.csv", text)
    assert main(["evaluate", "--clusters", str(workdir / "truth.csv"), "--photos", str(workdir / "photos.jsonl"),
                 "--out", str(workdir / "m.json")]) == 0
    report = json.loads((workdir / "m.json").read_text())
    assert report["nmi"] == pytest.approx(1.0, abs=1e-12)
    assert report["bcubed_f1"] == 1.0 and report["mu"] is None


def test_sweep_and_rerun_bytes(workdir):
    args = ["sweep", "--photos", str(workdir / "photos.jsonl"), "--interactions", str(workdir / "inter.jsonl"),
            "--model", str(workdir / "model.json"), "--mu-min", "0.1", "--mu-max", "0.9", "--mu-step", "0.2"]
    assert main(args + ["--out", str(workdir / "s1.json")]) == 0
    assert main(args + ["--out", str(workdir / "s2.json")]) == 0
    data = json.loads((workdir / "s1.json").read_text())
    assert [r["mu"] for r in data] == [0.1, 0.3, 0.5, 0.7, 0.9]
    assert (workdir / "s1.json").read_bytes() == (workdir / "s2.json").read_bytes()


def test_train_is_byte_identical(workdir):
    assert main(["train", "--config", str(workdir / "cfg.json"), "--photos", str(workdir / "photos.jsonl"),
                 "--interactions", str(workdir / "inter.jsonl"), "--model", str(workdir / "model2.json")]) == 0
    assert (workdir / "model.json").read_bytes() == (workdir / "model2.json").read_bytes()


def test_tampered_model_rejected(workdir, capsys):
    model = json.loads((workdir / "model.json").read_text())
    model["config"]["clustering"]["mu"] = 0.9
    (workdir / "bad.json").write_text(json.dumps(model))
    code = main(["cluster", "--photos", str(workdir / "photos.jsonl"), "--model", str(workdir / "bad.json"),
                 "--out", str(workdir / "x.csv")])
    assert code == 1
    assert "digest" in capsys.readouterr().err
    assert not (workdir / "x.csv").exists()


def test_ppr_output(workdir, capsys):
    pid = read_photos(workdir / "photos.jsonl").ids[0]
    assert main(["ppr", "--photos", str(workdir / "photos.jsonl"), "--interactions", str(workdir / "inter.jsonl"),
                 "--photo-id", pid, "--top-k", "5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 5
    kinds = {"user", "photo", "tag"}
    scores = []
    for line in lines:
        kind, key, score = line.split("\t")
        assert kind.lower() in kinds
        scores.append(float(score))
    assert scores == sorted(scores, reverse=True)
    assert lines[0].split("\t")[1] == pid


def test_ablation_small(tmp_path):
    cfg = {"synth": {"num_events": 4, "photos_per_event": [3, 6], "ambiguity": 1.0},
           "clustering": {"mu_min": 0.2, "mu_max": 0.8, "mu_step": 0.3}}
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    assert main(["ablation", "--config", str(tmp_path / "cfg.json"), "--seeds", "0,1",
                 "--out", str(tmp_path / "a.json")]) == 0
    out = json.loads((tmp_path / "a.json").read_text())
    assert out["seeds"] == [0, 1] and len(out["runs"]) == 2
    assert out["mean_delta_nmi"] == pytest.approx(out["mean_social_nmi"] - out["mean_baseline_nmi"])


def test_errors(tmp_path, capsys):
    assert main(["cluster", "--photos", str(tmp_path / "missing.jsonl"), "--model", str(tmp_path / "m.json"),
                 "--out", str(tmp_path / "o.csv")]) == 1
    (tmp_path / "p.jsonl").write_text('{"photo_id": "a"}\n')
    assert main(["evaluate", "--clusters", str(tmp_path / "c.csv"), "--photos", str(tmp_path / "p.jsonl"),
                 "--out", str(tmp_path / "o.json")]) == 1
    assert main(["ablation", "--seeds", "1,x", "--out", str(tmp_path / "a.json")]) == 1
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "photoevents", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "synth" in r.stdout


def test_write_atomic_leaves_no_temp(tmp_path):
    write_atomic(tmp_path / "sub" / "f.txt", "hello\n")
    write_atomic(tmp_path / "sub" / "f.txt", "bye\n")
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["f.txt"]
    assert (tmp_path / "sub" / "f.txt").read_text() == "bye\n"
