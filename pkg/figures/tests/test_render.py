"""Figure pipeline: five paper-style figures from toolkit exports, rendered
deterministically; error paths for missing/malformed inputs.

Inputs are produced through the producing package's command line (its
external interface) at desk scale, or taken from a full acceptance run when
its artifacts are present.
"""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from wrfrft_figures import InputError, parse_spec, render
from wrfrft_figures.cli import main as figures_main

REPO = Path(__file__).resolve().parents[2]
ACCEPT = REPO / "out" / "acceptance"

TINY_CONFIG = """
[radar]
fc = 6e9
bandwidth = 10e6
fs = 50e6
prf = 200.0
tp = 1e-5
t0 = 0.0
t1 = 0.64

[[targets]]
r0 = 300.0
v = 30.0
a = 15.0
tb = 0.16
te = 0.4

[noise]
snr_db = 10.0
seed = 2

[grid]
num_cells = 128

[grid.bounds]
eta0 = [0.12, 0.22]
eta1 = [0.36, 0.46]
r0 = [285.0, 330.0]
v = [17.5, 55.0]
a = [12.56, 19.88]

[grid.coarsen]
eta0 = 4.0
eta1 = 4.0
r0 = 1.0
v = 320.0
a = 40.0

[run]
plan = "single-run"
methods = ["wrfrft", "grft"]
outdir = "OUTDIR"
trials = 3
snr_db_list = [6.0, 10.0]
pfa = 0.001
"""


def run_producer(args):
    proc = subprocess.run([sys.executable, "-m", "wrfrft.cli", *args],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def exports(tmp_path_factory):
    """CSV and matrix exports generated through the producer CLI."""
    base = tmp_path_factory.mktemp("exports")
    out = base / "run"
    cfg = base / "scenario.toml"
    cfg.write_text(TINY_CONFIG.replace("OUTDIR", str(out)))
    run_producer(["synth", "--config", str(cfg)])
    run_producer(["search", "--config", str(cfg), "--echo", str(out / "echo.bin"),
                  "--slices"])
    run_producer(["profile", "--config", str(cfg), "--echo", str(out / "echo.bin"),
                  "--span", "6"])
    run_producer(["rmse", "--config", str(cfg)])
    run_producer(["pd", "--config", str(cfg)])
    # a small amplitude map of the echo itself for the trajectory figure
    import wrfrft
    echo = wrfrft.load_echo_file(out / "echo.bin")
    wrfrft.save_matrix_file(np.abs(echo.data).astype(np.float32), out / "pc_map.bin",
                            axes={"cell": np.arange(echo.num_cells),
                                  "pulse": np.arange(echo.num_pulses)})
    return out


def spec_file(tmp_path, name, body):
    p = tmp_path / name
    p.write_text(body)
    return p


def render_cli(spec_path):
    return figures_main(["render", "--spec", str(spec_path)])


def five_specs(src, outdir):
    """The five paper-style figures, as spec texts."""
    def q(p):
        return str(p).replace("\\", "/")
    return {
        "trajectory": f"""
[figure]
kind = "heatmap"
inputs = ["{q(src / 'pc_map.bin')}"]
output = "{q(outdir / 'fig_trajectory.png')}"
title = "compressed echo amplitude"
""",
        "slice": f"""
[figure]
kind = "heatmap"
inputs = ["{q(src / 'slice_rv.bin')}"]
output = "{q(outdir / 'fig_slice_rv.png')}"
title = "range-velocity peak slice"
db_scale = true
""",
        "profile": f"""
[figure]
kind = "curve"
inputs = ["{q(src / 'profile_eta0.csv')}"]
output = "{q(outdir / 'fig_profile_eta0.png')}"
title = "window-start profile"
mark_max = true
""",
        "rmse": f"""
[figure]
kind = "multi-curve"
inputs = ["{q(src / 'rmse.csv')}"]
output = "{q(outdir / 'fig_rmse_v.png')}"
metric = "rmse_v_mps"
title = "velocity estimation error"
""",
        "pd": f"""
[figure]
kind = "multi-curve"
inputs = ["{q(src / 'pd.csv')}"]
output = "{q(outdir / 'fig_pd.png')}"
metric = "pd"
title = "detection probability"
""",
    }


def test_five_figures_render_and_rerun_identically(exports, tmp_path):
    outdir = tmp_path / "figs"
    for name, body in five_specs(exports, outdir).items():
        sp = spec_file(tmp_path, f"{name}.toml", body)
        assert render_cli(sp) == 0, name
        out = parse_spec(sp.read_text()).output
        first = Path(out).read_bytes()
        assert len(first) > 1000
        assert render_cli(sp) == 0
        assert Path(out).read_bytes() == first, f"{name}: rerun differs"
    print("[PASS] criterion 11: five figures rendered deterministically")


def test_acceptance_artifacts_render_when_present(tmp_path):
    wanted = ["pc_map.bin", "slice_rv.bin", "profile_eta0.csv", "rmse.csv", "pd.csv"]
    if not all((ACCEPT / f).exists() for f in wanted):
        pytest.skip("full acceptance artifacts not generated in this checkout")
    outdir = tmp_path / "figs"
    for name, body in five_specs(ACCEPT, outdir).items():
        sp = spec_file(tmp_path, f"{name}.toml", body)
        assert render_cli(sp) == 0, name


def test_missing_input_is_a_clean_error(tmp_path, capsys):
    body = f"""
[figure]
kind = "curve"
inputs = ["{(tmp_path / 'not_there.csv').as_posix()}"]
output = "{(tmp_path / 'x.png').as_posix()}"
"""
    sp = spec_file(tmp_path, "missing.toml", body)
    assert render_cli(sp) == 1
    err = capsys.readouterr().err
    assert "not_there.csv" in err
    assert not (tmp_path / "x.png").exists()


def test_malformed_matrix_is_a_clean_error(tmp_path):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"garbage" * 10)
    body = f"""
[figure]
kind = "heatmap"
inputs = ["{bad.as_posix()}"]
output = "{(tmp_path / 'y.png').as_posix()}"
"""
    assert render_cli(spec_file(tmp_path, "bad.toml", body)) == 1


def test_unknown_kind_rejected(tmp_path):
    body = f"""
[figure]
kind = "sculpture"
inputs = ["a.csv"]
output = "z.png"
"""
    with pytest.raises(InputError):
        parse_spec(body)


def test_missing_spec_file_exit_code(tmp_path):
    assert figures_main(["render", "--spec", str(tmp_path / "nope.toml")]) == 1
