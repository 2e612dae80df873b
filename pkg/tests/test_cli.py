import json
import logging

import numpy as np
import pytest

from degrade.model import invert_model
from estimate.initial import estimate_initial
from imaging.io import load_image, save_image
from main import main
from metrics.quality import psnr
from metrics.report import read_metric_csv


@pytest.fixture(autouse=True)
def keep_root_handlers():
    root = logging.getLogger()
    before, level = list(root.handlers), root.level
    yield
    for handler in root.handlers[:]:
        if handler not in before:
            root.removeHandler(handler)
            handler.close()
    root.setLevel(level)


@pytest.fixture
def haze_set(tmp_path):
    out = tmp_path / "haze"
    assert main(["simulate", "--kind", "haze", "--generate", "3", "--size", "32x32", "--out", str(out), "--seed", "7"]) == 0
    return out


def restore_args(data, out, *extra):
    return [
        "restore",
        "--in", str(data / "degraded" / "img_0000.png"),
        "--ref-degraded", str(data / "degraded" / "img_0001.png"),
        "--ref-clean", str(data / "clean" / "img_0001.png"),
        "--out", str(out),
        "--steps", "2",
        *extra,
    ]


def test_simulate_writes_deterministic_triples(tmp_path, haze_set):
    for sub, suffix in (("degraded", ".png"), ("clean", ".png"), ("matrices", ".drmtd"), ("params", ".json")):
        assert sorted(p.name for p in (haze_set / sub).iterdir()) == [f"img_000{i}{suffix}" for i in range(3)]
    again = tmp_path / "again"
    main(["simulate", "--kind", "haze", "--generate", "3", "--size", "32x32", "--out", str(again), "--seed", "7"])
    for name in ("degraded/img_0002.png", "matrices/img_0002.drmtd"):
        assert (haze_set / name).read_bytes() == (again / name).read_bytes()
    params = json.loads((haze_set / "params" / "img_0001.json").read_text())
    assert params["params"]["kind"] == "haze" and params["params"]["seed"] == 8


def test_simulate_from_directory(tmp_path, rng):
    clean = tmp_path / "clean_in"
    clean.mkdir()
    save_image(rng.uniform(size=(20, 24, 3)), clean / "photo.png")
    out = tmp_path / "out"
    assert main(["simulate", "--kind", "rain", "--in", str(clean), "--out", str(out)]) == 0
    assert load_image(out / "degraded" / "photo.png").shape == (20, 24, 3)


def test_usage_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--kind", "haze", "--generate", "2"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--kind", "fog", "--generate", "2", "--out", str(tmp_path)])
    assert info.value.code == 2


def test_restore_writes_outputs_and_metrics(tmp_path, haze_set):
    out = tmp_path / "run" / "restored.png"
    args = restore_args(
        haze_set, out,
        "--gt", str(haze_set / "clean" / "img_0000.png"),
        "--metrics-csv", str(tmp_path / "run" / "metrics.csv"),
        "--dump-intermediate", str(tmp_path / "steps"),
        "--dump-attention", str(tmp_path / "attention"),
    )
    assert main(args) == 0
    assert load_image(out).shape == (32, 32, 3)

    manifest = json.loads((out.parent / "run-manifest.json").read_text())
    assert manifest["solver"]["steps"] == 2
    meta = json.loads((out.parent / "restored.meta.json").read_text())
    assert meta["kind"] in ("rain", "haze", "lowlight")
    assert set(meta["psnr"]) == {"init", "1", "2"}

    rows = read_metric_csv(tmp_path / "run" / "metrics.csv")
    assert [r["step"] for r in rows[:3]] == ["init", "1", "2"]
    for k in (1, 2):
        for part in ("B", "T", "D"):
            assert (tmp_path / "steps" / f"step_{k}_{part}.png").is_file()
        assert (tmp_path / "steps" / f"step_{k}_TD.drmtd").is_file()
    weights = np.loadtxt(tmp_path / "attention" / "attention_step_1.csv", delimiter=",")
    np.testing.assert_allclose(np.atleast_2d(weights).sum(axis=1), 1.0, atol=1e-9)


def test_init_metric_row_scores_the_cursory_image(tmp_path, haze_set):
    out = tmp_path / "restored.png"
    gt_path = haze_set / "clean" / "img_0000.png"
    assert main(restore_args(haze_set, out, "--kind", "haze", "--gt", str(gt_path))) == 0
    O = load_image(haze_set / "degraded" / "img_0000.png")
    cursory = invert_model(O, estimate_initial(O, "haze"))
    meta = json.loads(out.with_name("restored.meta.json").read_text())
    assert meta["psnr"]["init"] == pytest.approx(psnr(cursory, load_image(gt_path)), abs=1e-9)
    assert meta["psnr"]["init"] != pytest.approx(psnr(O, load_image(gt_path)), abs=1e-6)



def test_restore_is_bitwise_reproducible(tmp_path, haze_set):
    outputs = []
    for run_id in ("a", "b"):
        out = tmp_path / run_id / "restored.png"
        assert main(restore_args(haze_set, out, "--kind", "haze", "--dump-intermediate", str(tmp_path / run_id / "steps"))) == 0
        outputs.append(out)
    assert outputs[0].read_bytes() == outputs[1].read_bytes()
    for name in ("step_1_T.png", "step_2_D.png", "step_1_TD.drmtd"):
        assert (outputs[0].parent / "steps" / name).read_bytes() == (outputs[1].parent / "steps" / name).read_bytes()

    replay = tmp_path / "replay" / "restored.png"
    manifest = outputs[0].parent / "run-manifest.json"
    assert main(["restore", "--config", str(manifest), "--out", str(replay),
                 "--dump-intermediate", str(tmp_path / "replay" / "steps")]) == 0
    assert replay.read_bytes() == outputs[0].read_bytes()


def test_restore_resizes_reference_and_draws_from_pool(tmp_path, haze_set):
    big = tmp_path / "big"
    assert main(["simulate", "--kind", "haze", "--generate", "2", "--size", "40x40", "--out", str(big)]) == 0
    out = tmp_path / "pooled.png"
    assert main(["restore", "--in", str(haze_set / "degraded" / "img_0000.png"), "--ref-pool", str(big),
                 "--ref-trials", "2", "--kind", "haze", "--steps", "2", "--out", str(out),
                 "--gt", str(haze_set / "clean" / "img_0000.png")]) == 0
    meta = json.loads(out.with_name("pooled.meta.json").read_text())
    assert len(meta["trials_psnr"]) == 2


def test_restore_missing_input_exits_3(tmp_path, haze_set):
    args = restore_args(haze_set, tmp_path / "x.png")
    args[2] = str(tmp_path / "missing.png")
    assert main(args) == 3


def test_restore_solver_failure_exits_4(tmp_path, haze_set):
    starved = {"kind": "tikhonov", "lambda": 5.0, "cg_max_iter": 1}
    config = tmp_path / "starved.json"
    config.write_text(json.dumps({"solver": {"priors": {"haze": {"B": starved, "T": starved, "D": starved}}}}))
    assert main(restore_args(haze_set, tmp_path / "x.png", "--kind", "haze", "--config", str(config))) == 4
    assert not (tmp_path / "x.png").exists()



def test_restore_without_reference_exits_2(tmp_path, haze_set):
    assert main(["restore", "--in", str(haze_set / "degraded" / "img_0000.png"), "--out", str(tmp_path / "x.png")]) == 2


def test_evaluate_matched_and_unmatched(tmp_path, haze_set):
    out = tmp_path / "eval.csv"
    assert main(["evaluate", "--pred", str(haze_set / "clean"), "--gt", str(haze_set / "clean"),
                 "--params", str(haze_set / "params"), "--out", str(out)]) == 0
    rows = read_metric_csv(out)
    assert [r["image"] for r in rows] == ["img_0000", "img_0001", "img_0002", "mean"]
    assert all(float(r["psnr"]) == 100.0 for r in rows)
    assert {r["kind"] for r in rows} == {"haze"}
    assert out.read_text().startswith("# schema=drm-metrics/1")

    partial = tmp_path / "partial"
    partial.mkdir()
    save_image(load_image(haze_set / "clean" / "img_0000.png"), partial / "img_0000.png")
    assert main(["evaluate", "--pred", str(partial), "--gt", str(haze_set / "clean"), "--out", str(out)]) == 2


def test_verify_exit_codes():
    assert main(["verify", "--instances", "30"]) == 0
    assert main(["verify", "--instances", "30", "--fault", "z-off-by-eps"]) == 1


def test_ablate_writes_one_csv_per_study(tmp_path):
    out = tmp_path / "ablate"
    assert main(["ablate", "--out", str(out), "--size", "32", "--count", "1",
                 "--studies", "reference", "loss_weights", "classifier"]) == 0
    for study, variants in (("reference", ["with", "without"]),
                            ("loss_weights", ["log", "linear", "exp"]),
                            ("classifier", ["heuristic"])):
        lines = (out / f"{study}.csv").read_text().splitlines()
        assert lines[0] == "study,variant,rain,haze,lowlight,average,seconds"
        assert [line.split(",")[1] for line in lines[1:]] == variants
