import numpy as np

from ravden.cli import EXIT_OK, run
from ravden.frames.types import PackedRawFrame
from ravden.frames.io import save_raw
from ravden.mlops.mlflow_manager import MLflowManager


def test_log_run_records_params_and_finite_metrics(tmp_path):
    manager = MLflowManager(tracking_uri=str(tmp_path / "mlruns"), experiment_name="unit")

    logged = manager.log_run(
        "denoise",
        parameters={"stages": 2, "window": (5, 5)},
        metrics={"psnr_raw": 38.5, "perfect": float("inf"), "missing": None},
        tags={"suite": "unit"},
    )

    assert logged
    results = manager.get_experiment_results()
    assert results["total_runs"] == 1
    run_info = results["runs"][0]
    assert run_info["params"] == {"stages": "2", "window": "(5, 5)"}
    assert run_info["metrics"] == {"psnr_raw": 38.5}
    assert run_info["tags"]["command"] == "denoise"
    assert run_info["tags"]["suite"] == "unit"


def test_unknown_experiment(tmp_path):
    manager = MLflowManager(tracking_uri=str(tmp_path / "mlruns"), experiment_name="unit")
    assert "error" in manager.get_experiment_results("nothing-here")


def test_eval_track_flag(tmp_path):
    clean = tmp_path / "clean"
    clean.mkdir()
    rng = np.random.default_rng(0)
    for index in range(3):
        save_raw(clean / f"f{index}.rpf", PackedRawFrame(0.3 + 0.4 * rng.random((4, 16, 16))))
    config = tmp_path / "run.conf"
    config.write_text(f"mlops.tracking_uri = {tmp_path / 'mlruns'}\nmlops.experiment_name = evals\n")

    argv = ["--config", str(config), "--track", "eval", str(clean), str(clean), str(tmp_path / "r.csv")]
    assert run(argv) == EXIT_OK

    results = MLflowManager(str(tmp_path / "mlruns"), "evals").get_experiment_results()
    assert results["total_runs"] == 1
    assert results["runs"][0]["params"]["frames"] == "3"
    assert "ssim_srgb" in results["runs"][0]["metrics"]
