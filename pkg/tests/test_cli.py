import json

import numpy as np
from pytest import mark


def test_version(capsys):
    from wavemask import __version__
    from wavemask.cli import main

    assert main(["version"]) == 0
    assert capsys.readouterr().out.strip() == __version__


@mark.parametrize("argv", [[], ["frobnicate"], ["mask", "--saliency", "a.lwt", "--out", "m.lwt"],
                           ["mask", "--saliency", "a.lwt", "--t", "3", "--tau", "0.5", "--out", "m.lwt"]])
def test_usage_errors(argv):
    from wavemask.cli import main

    assert main(argv) == 2


def test_missing_and_corrupt_inputs(tmp_path, capsys):
    from wavemask.cli import main

    assert main(["saliency", "--in", str(tmp_path / "nope.lwt"), "--out", str(tmp_path / "a.lwt")]) == 3

    bad = tmp_path / "bad.lwt"
    bad.write_bytes(b"LWT2" + bytes(12))
    assert main(["saliency", "--in", str(bad), "--out", str(tmp_path / "a.lwt")]) == 3
    assert "byte 0" in capsys.readouterr().err


def test_invalid_arguments_exit_with_4(tmp_path):
    from wavemask.cli import main
    from wavemask.tensor import write_tensor

    latent = tmp_path / "z.lwt"
    write_tensor(latent, np.zeros((1, 12, 12)))
    assert main(["dwt", "--in", str(latent), "--depth", "3", "--out-dir", str(tmp_path / "bands")]) == 4

    write_tensor(tmp_path / "a.lwt", np.zeros((4, 4)))
    argv = ["mask", "--saliency", str(tmp_path / "a.lwt"), "--T", "10", "--t", "11", "--out", str(tmp_path / "m.lwt")]
    assert main(argv) == 4


def test_dwt_idwt_round_trip(tmp_path, np_rng):
    from wavemask.cli import main
    from wavemask.tensor import read_tensor, write_tensor

    src = np_rng.uniform(size=(2, 16, 16)).astype(np.float32).astype(np.float64)
    write_tensor(tmp_path / "x.lwt", src)
    bands = tmp_path / "bands"
    assert main(["dwt", "--in", str(tmp_path / "x.lwt"), "--depth", "2", "--out-dir", str(bands)]) == 0
    assert sorted(p.name for p in bands.iterdir()) == [
        "l1_hh.lwt", "l1_hl.lwt", "l1_lh.lwt", "l2_hh.lwt", "l2_hl.lwt", "l2_lh.lwt", "ll.lwt"
    ]
    assert read_tensor(bands / "ll.lwt").shape == (2, 4, 4)

    assert main(["idwt", "--in-dir", str(bands), "--depth", "2", "--out", str(tmp_path / "y.lwt")]) == 0
    assert np.max(np.abs(read_tensor(tmp_path / "y.lwt") - src)) < 1e-5


def test_mask_matches_library(tmp_path, np_rng):
    from wavemask.cli import main
    from wavemask.masking import make_schedule, mask_at
    from wavemask.saliency import saliency_from_latent
    from wavemask.tensor import read_tensor, write_tensor
    from wavemask.tensor.file_io import encode_tensor

    write_tensor(tmp_path / "z.lwt", np_rng.normal(size=(4, 8, 8)))
    assert main(["saliency", "--in", str(tmp_path / "z.lwt"), "--out", str(tmp_path / "a.lwt"),
                 "--png", str(tmp_path / "a.pgm")]) == 0
    assert (tmp_path / "a.pgm").read_bytes()[:2] == b"P5"

    a = read_tensor(tmp_path / "a.lwt")
    assert np.allclose(a, saliency_from_latent(read_tensor(tmp_path / "z.lwt")).map, atol=1e-7)

    assert main(["mask", "--saliency", str(tmp_path / "a.lwt"), "--T", "1000", "--l", "0.3", "--t", "800",
                 "--out", str(tmp_path / "m.lwt")]) == 0
    expected = encode_tensor(mask_at(a, make_schedule(1000, 0.3), 800).mask)
    assert (tmp_path / "m.lwt").read_bytes() == expected

    assert main(["mask", "--saliency", str(tmp_path / "a.lwt"), "--tau", "0.8",
                 "--out", str(tmp_path / "m_tau.lwt")]) == 0
    assert (tmp_path / "m_tau.lwt").read_bytes() == expected


def test_train_demo_report_and_sample(tmp_path, capsys):
    from wavemask.cli import main
    from wavemask.models import VelocityNet, load_checkpoint

    out = tmp_path / "run"
    assert main(["train-demo", "--mode", "flow", "--steps", "5", "--T", "50", "--out-dir", str(out)]) == 0
    for name in ("train_log.csv", "summary.json", "model.cfg", "manifest.txt", "W1.lwt"):
        assert (out / name).is_file()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["mode"] == "flow"
    assert summary["steps"] == 5
    assert summary["region"]["T"] == 50

    model, recorded = load_checkpoint(out)
    assert isinstance(model, VelocityNet)
    assert recorded["T"] == "50"
    assert recorded["masking"] == "True"

    capsys.readouterr()
    assert main(["region-report", "--ckpt", str(out), "--draws", "1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["T"] == 50
    assert report["lower_bound"] == 0.3

    assert main(["sample", "--ckpt", str(out), "--n", "2", "--steps", "3", "--out-dir", str(tmp_path / "s")]) == 0
    assert sorted(p.name for p in (tmp_path / "s").iterdir()) == ["sample_0000.pgm", "sample_0001.pgm"]


def test_train_demo_vae_rejected_by_sampler(tmp_path):
    from wavemask.cli import main

    out = tmp_path / "vae"
    assert main(["train-demo", "--mode", "vae", "--steps", "3", "--out-dir", str(out)]) == 0
    assert main(["sample", "--ckpt", str(out), "--out-dir", str(tmp_path / "s")]) == 4
    assert main(["sample", "--ckpt", str(tmp_path / "missing"), "--out-dir", str(tmp_path / "s")]) == 3


def test_eval_freq(tmp_path, np_rng, capsys):
    from wavemask.cli import main
    from wavemask.metrics import MetricReport
    from wavemask.tensor import write_netpbm

    for d in ("gen", "real"):
        (tmp_path / d).mkdir()
        for name in ("1.pgm", "2.pgm"):
            write_netpbm(tmp_path / d / name, np_rng.uniform(size=(1, 16, 16)))

    capsys.readouterr()
    assert main(["eval-freq", "--gen", str(tmp_path / "gen"), "--real", str(tmp_path / "real"), "--depth", "2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert list(report) == list(MetricReport._fields)

    (tmp_path / "real" / "2.pgm").unlink()
    assert main(["eval-freq", "--gen", str(tmp_path / "gen"), "--real", str(tmp_path / "real")]) == 4


def test_ablate_bound(tmp_path):
    from wavemask.cli import main

    out = tmp_path / "sweep.json"
    assert main(["ablate-bound", "--bounds", "0.2,0.6", "--steps", "2", "--T", "20", "--out", str(out)]) == 0
    results = json.loads(out.read_text())
    assert [r["lower_bound"] for r in results] == [0.2, 0.6]
    assert main(["ablate-bound", "--bounds", "a,b"]) == 2


def test_unwritable_outputs(tmp_path, np_rng):
    from wavemask.cli import main
    from wavemask.tensor import write_tensor

    write_tensor(tmp_path / "x.lwt", np_rng.uniform(size=(2, 8, 8)))
    bands = tmp_path / "bands"
    assert main(["dwt", "--in", str(tmp_path / "x.lwt"), "--out-dir", str(bands)]) == 0
    # two channels have no 8-bit image format
    assert main(["idwt", "--in-dir", str(bands), "--out", str(tmp_path / "x.pgm")]) == 4

    taken = tmp_path / "taken"
    taken.mkdir()
    assert main(["saliency", "--in", str(tmp_path / "x.lwt"), "--out", str(taken)]) == 3
    assert main(["idwt", "--in-dir", str(bands), "--out", str(tmp_path / "missing" / "y.lwt")]) == 3


def test_ablate_components(tmp_path):
    from wavemask.cli import main

    out = tmp_path / "components.json"
    argv = ["ablate-components", "--steps", "3", "--T", "20", "--n", "1", "--sample-steps", "2", "--out", str(out)]
    assert main(argv) == 0
    results = json.loads(out.read_text())
    assert [(r["alpha"], r["masking"]) for r in results] == [(0.0, False), (0.0, True), (0.25, False), (0.25, True)]
    for r in results:
        assert 0 <= r["metrics"]["ms_ssim"] <= 1
        assert r["region"]["T"] == 20
