import subprocess
import sys

import pytest

from fsoahead.harness import parse_report, read_trace
from fsoahead.harness.cli import main
from fsoahead.cloudfield import read_raster

TINY_FILE = """\
# small world for quick runs
name = tiny
constellation.n_sats = 600
visibility.min_elevation_deg = 60
cloud.nx = 200
cloud.ny = 200
cloud.downsample = 20
training.hidden = [16, 16]
training.batch_size = 16
training.buffer_capacity = 128
eval.start_s = 200
eval.samples = 20
run.duration_s = 300
"""


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "tiny.txt"
    path.write_text(TINY_FILE)
    return path


def test_run_writes_outputs(scenario_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--config", str(scenario_file), "--out", str(out), "--seed", "3"]) == 0
    assert "A_pred" in capsys.readouterr().out
    rep = parse_report((out / "tiny" / "report.txt").read_text())
    assert rep["seed"] == 3 and rep["config.training.seed"] == "3"
    assert read_trace(out / "tiny" / "trace.csv")["_echo"]["cloud.seed"] == "3"


def test_run_duration_and_set_overrides(scenario_file, tmp_path):
    out = tmp_path / "o"
    args = ["run", "--config", str(scenario_file), "--out", str(out), "--duration", "260", "--set", "beacons.count=4"]
    assert main(args) == 0
    rep = parse_report((out / "tiny" / "report.txt").read_text())
    assert rep["config.run.duration_s"] == "260" and rep["feature_count"] == 4 * 4 + 5


def test_sweep_over_directory(tmp_path, capsys):
    scen = tmp_path / "scen"
    scen.mkdir()
    for n in (4, 8):
        (scen / f"b{n}.txt").write_text(TINY_FILE.replace("name = tiny", f"name = b{n}") + f"beacons.count = {n}\n")
    (scen / "notes.md").write_text("ignored")
    out = tmp_path / "out"
    assert main(["sweep", "--config", str(scen), "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "b4:" in printed and "b8:" in printed
    table = (out / "table.csv").read_text().splitlines()
    assert table[1].startswith("4,") and table[2].startswith("8,")


def test_sweep_rejects_duplicate_names(scenario_file, tmp_path):
    (tmp_path / "again.txt").write_text(TINY_FILE)
    assert main(["sweep", "--config", str(tmp_path)]) == 1


def test_cloud_demo_frames(tmp_path, scenario_file, capsys):
    out = tmp_path / "frames"
    assert main(["cloud-demo", "--config", str(scenario_file), "--out", str(out), "--duration", "20", "--every", "10"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("step,cover") and len(lines) == 4
    frames = sorted(out.iterdir())
    assert [f.name for f in frames] == ["frame_000000.bin", "frame_000010.bin", "frame_000020.bin"]
    assert read_raster(frames[-1])["step"] == 20


def test_models_prints_closed_forms(capsys):
    assert main(["models", "--thickness-km", "0.3", "--elevation-deg", "90"]) == 0
    out = capsys.readouterr().out
    assert "fso_attenuation_db = 90" in out and "rf_attenuation_db = 0.9" in out
    assert main(["models", "--sat-altitude-km", "2000", "--offset-m", "1000"]) == 0
    assert "lookahead_s = 36.08" in capsys.readouterr().out
    assert main(["models", "--visibility-km", "10", "--wavelength-nm", "550"]) == 0
    assert "kim_attenuation_per_km = 0.391" in capsys.readouterr().out
    assert main(["models", "--frequency-ghz", "100", "--liquid-water", "0.5", "--elevation-deg", "30"]) == 0
    assert "itu_specific_attenuation = 5.4966" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--set", "bogus.key=1"],
        ["run", "--set", "noequals"],
        ["run", "--config", "/nonexistent/scenario.txt"],
        ["run", "--set", "beacons.radius_m=300"],
        ["models"],
        ["models", "--frequency-ghz", "10", "--eps-imag", "0"],
        ["frobnicate"],
        ["run", "--seed", "abc"],
    ],
)
def test_config_errors_exit_1(argv):
    with pytest.raises(SystemExit) as exc:
        sys.exit(main(argv))
    assert exc.value.code == 1


def test_runtime_fault_exits_2(scenario_file, capsys):
    # one satellite never clears the 60 degree mask in 300 s: nothing to evaluate
    assert main(["run", "--config", str(scenario_file), "--set", "constellation.n_sats=1"]) == 2
    assert "runtime fault" in capsys.readouterr().err


@pytest.mark.filterwarnings("ignore:overflow encountered")
def test_diverging_training_exits_2(scenario_file):
    assert main(["run", "--config", str(scenario_file), "--set", "training.learning_rate=1e6"]) == 2


def test_module_entry_point():
    done = subprocess.run(
        [sys.executable, "-m", "fsoahead.harness.cli", "models", "--thickness-km", "0.1"],
        capture_output=True,
        text=True,
    )
    assert done.returncode == 0 and "fso_attenuation_db = 30" in done.stdout
