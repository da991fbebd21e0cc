import json
import signal
import socket
import subprocess
import sys
import time

import pytest

from gaitfuzz import cli

GOOD = """\
controller hip_swing {
  input delta range -1.2 .. 1.2 unit none {
    start lshoulder(-1.0, -0.5)
    center tri(-1.0, 0.0, 1.0)
    end rshoulder(0.5, 1.0)
  }
  output velocity {
    slow 10
    fast 160
    stay 0
  }
  rule if delta is start then velocity is slow
  rule if delta is center then velocity is fast
  rule if delta is end then velocity is stay
}
bind level hip_swing hip_swing metric delta_scaled
"""

BAD_TWO_ERRORS = GOOD.replace("center tri(-1.0, 0.0, 1.0)", "center tri(1, 0, 2)").replace(
    "slow 10", "slow 10\n    slow 11"
)


class TestValidate:
    def test_valid_exit_zero_silent(self, tmp_path, capsys):
        p = tmp_path / "ok.fzc"
        p.write_text(GOOD)
        assert cli.main(["validate", "--controllers", str(p)]) == 0
        out = capsys.readouterr()
        assert out.out == "" and out.err == ""

    def test_two_errors_two_lines(self, tmp_path, capsys):
        p = tmp_path / "bad.fzc"
        p.write_text(BAD_TWO_ERRORS)
        assert cli.main(["validate", "--controllers", str(p)]) == 1
        err = capsys.readouterr().err.strip().splitlines()
        assert len(err) == 2
        for line in err:
            assert line.startswith(str(p) + ":")
            assert ": error: " in line and line.endswith("]")

    def test_missing_file_exit_two(self, tmp_path):
        assert cli.main(["validate", "--controllers", str(tmp_path / "nope.fzc")]) == 2


class TestSimulate:
    def test_flat_walk_csv(self, tmp_path, capsys):
        out = tmp_path / "curves.csv"
        rc = cli.main([
            "simulate", "--terrain", "flat", "--step-length", "0.60",
            "--steps", "6", "--out", str(out), "--format", "csv",
        ])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("cycle_percent,left_hip")
        assert len(lines) > 100  # at least one full cycle of samples
        table = capsys.readouterr().out
        assert "left_hip" in table and "peak" in table

    def test_byte_identical_runs(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["simulate", "--step-length", "0.6", "--steps", "4", "--format", "csv"]
        assert cli.main(argv + ["--out", str(a)]) == 0
        assert cli.main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_stairs_json(self, tmp_path):
        out = tmp_path / "stairs.json"
        rc = cli.main([
            "simulate", "--terrain", "stairs:0.17x0.28", "--steps", "4",
            "--out", str(out), "--format", "json",
        ])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["meta"]["terrain"]["kind"] == "stairs"

    def test_domain_error_exit_one(self, tmp_path, capsys):
        rc = cli.main([
            "simulate", "--step-length", "0.95", "--steps", "1",
            "--out", str(tmp_path / "x.csv"),
        ])
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_bad_controllers_exit_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.fzc"
        bad.write_text(BAD_TWO_ERRORS)
        rc = cli.main([
            "simulate", "--controllers", str(bad), "--steps", "1",
            "--out", str(tmp_path / "x.csv"),
        ])
        assert rc == 1

    def test_env_var_default(self, tmp_path, monkeypatch, capsys):
        bad = tmp_path / "bad.fzc"
        bad.write_text("controller nope {")
        monkeypatch.setenv(cli.ENV_CONTROLLERS, str(bad))
        rc = cli.main(["simulate", "--steps", "1", "--out", str(tmp_path / "x.csv")])
        assert rc == 1

    def test_dims_inline_json(self, tmp_path):
        out = tmp_path / "c.csv"
        dims = json.dumps({"thigh": 0.5, "shank": 0.5})
        rc = cli.main([
            "simulate", "--dims", dims, "--step-length", "0.6", "--steps", "3",
            "--out", str(out),
        ])
        assert rc == 0

    def test_plot_alongside(self, tmp_path):
        out = tmp_path / "c.csv"
        fig = tmp_path / "c.svg"
        rc = cli.main([
            "simulate", "--steps", "4", "--out", str(out), "--plot", str(fig),
        ])
        assert rc == 0
        assert fig.exists() and b"<svg" in fig.read_bytes()


@pytest.fixture(scope="module")
def curves_json(tmp_path_factory):
    path = tmp_path_factory.mktemp("render") / "curves.json"
    rc = cli.main(["simulate", "--steps", "5", "--out", str(path), "--format", "json"])
    assert rc == 0
    return path


class TestRender:
    def test_svg_polylines(self, curves_json, tmp_path):
        out = tmp_path / "fig.svg"
        rc = cli.main(["render", "--in", str(curves_json), "--out", str(out)])
        assert rc == 0
        assert b"<svg" in out.read_bytes()

    def test_stick_frames(self, curves_json, tmp_path):
        out = tmp_path / "fig.svg"
        rc = cli.main([
            "render", "--in", str(curves_json), "--out", str(out), "--stick-frames", "8",
        ])
        assert rc == 0
        assert out.stat().st_size > 10000

    def test_joint_filter(self, curves_json, tmp_path):
        out = tmp_path / "fig.svg"
        rc = cli.main([
            "render", "--in", str(curves_json), "--out", str(out), "--joints", "hip,knee",
        ])
        assert rc == 0

    def test_empty_series_exit_one(self, tmp_path, capsys):
        empty = tmp_path / "empty.json"
        empty.write_text(json.dumps({"series": {}, "cycles": [[0, 1]]}))
        rc = cli.main(["render", "--in", str(empty), "--out", str(tmp_path / "f.svg")])
        assert rc == 1

    def test_malformed_input_exit_one(self, tmp_path):
        broken = tmp_path / "broken.json"
        broken.write_text("{not json")
        rc = cli.main(["render", "--in", str(broken), "--out", str(tmp_path / "f.svg")])
        assert rc == 1

    def test_missing_input_exit_two(self, tmp_path):
        rc = cli.main(["render", "--in", str(tmp_path / "nope.json"), "--out", "f.svg"])
        assert rc == 2


class TestCompare:
    def test_identical_files_zero(self, curves_json, capsys):
        rc = cli.main([
            "compare", "--a", str(curves_json), "--b", str(curves_json),
            "--joints", "hip,knee",
        ])
        assert rc == 0
        out = capsys.readouterr().out
        for line in out.splitlines()[1:]:
            assert float(line.split()[-1]) == 0.0

    def test_step_lengths_differ(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        cli.main(["simulate", "--step-length", "0.6", "--steps", "5", "--out", str(a), "--format", "json"])
        cli.main(["simulate", "--step-length", "0.7", "--steps", "5", "--out", str(b), "--format", "json"])
        capsys.readouterr()
        rc = cli.main(["compare", "--a", str(a), "--b", str(b), "--joints", "hip"])
        assert rc == 0
        out = capsys.readouterr().out
        values = [float(line.split()[-1]) for line in out.splitlines()[1:]]
        assert all(v > 0 for v in values)

    def test_missing_joint_warns_exit_zero(self, curves_json, tmp_path, capsys):
        partial = tmp_path / "partial.json"
        doc = json.loads(curves_json.read_text())
        doc["series"].pop("left_ball")
        partial.write_text(json.dumps(doc))
        rc = cli.main([
            "compare", "--a", str(curves_json), "--b", str(partial), "--joints", "ball",
        ])
        assert rc == 0
        assert "warning" in capsys.readouterr().out


class TestServe:
    def test_port_in_use_exit_one(self):
        sock = socket.socket()
        sock.bind(("127.0.0.1", 0))
        port = sock.getsockname()[1]
        sock.listen(1)
        try:
            proc = subprocess.run(
                [sys.executable, "-m", "gaitfuzz.cli", "serve", "--port", str(port)],
                capture_output=True, timeout=30,
            )
            assert proc.returncode == 1
            assert b"cannot bind" in proc.stderr
        finally:
            sock.close()

    def test_sigint_clean_shutdown(self):
        sock = socket.socket()
        sock.bind(("127.0.0.1", 0))
        port = sock.getsockname()[1]
        sock.close()
        proc = subprocess.Popen(
            [sys.executable, "-m", "gaitfuzz.cli", "serve", "--port", str(port)],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE,
        )
        try:
            import urllib.request

            deadline = time.time() + 20
            while time.time() < deadline:
                try:
                    with urllib.request.urlopen(
                        f"http://127.0.0.1:{port}/healthz", timeout=0.5
                    ) as resp:
                        if resp.status == 200:
                            break
                except OSError:
                    time.sleep(0.1)
            else:
                pytest.fail("service never came up")
            proc.send_signal(signal.SIGINT)
            rc = proc.wait(timeout=20)
            assert rc == 0
        finally:
            if proc.poll() is None:
                proc.kill()


class TestUsage:
    def test_no_subcommand_exit_two(self):
        with pytest.raises(SystemExit) as err:
            cli.main([])
        assert err.value.code == 2

    def test_bad_terrain_exit_one(self, tmp_path, capsys):
        rc = cli.main([
            "simulate", "--terrain", "escalator", "--steps", "1",
            "--out", str(tmp_path / "x.csv"),
        ])
        assert rc == 1
        assert "unknown terrain" in capsys.readouterr().err


class TestConfigFile:
    def test_fields_used(self, tmp_path):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({
            "dims": {"thigh": 0.5, "shank": 0.5},
            "dt": 1 / 120,
            "terrain": {"kind": "stairs", "riser": 0.17, "tread": 0.28},
            "step_length": 0.6,
            "seedless": True,
        }))
        out = tmp_path / "c.json"
        rc = cli.main([
            "simulate", "--config", str(cfg), "--steps", "3",
            "--out", str(out), "--format", "json",
        ])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["meta"]["terrain"]["kind"] == "stairs"
        assert doc["meta"]["dims"]["thigh"] == 0.5

    def test_flags_override_file(self, tmp_path):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({"step_length": 0.4, "terrain": "flat"}))
        out = tmp_path / "c.json"
        rc = cli.main([
            "simulate", "--config", str(cfg), "--step-length", "0.7",
            "--steps", "3", "--out", str(out), "--format", "json",
        ])
        assert rc == 0
        assert json.loads(out.read_text())["meta"]["step_length"] == 0.7

    def test_controller_file_field(self, tmp_path):
        bad = tmp_path / "bad.fzc"
        bad.write_text("controller x {")
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({"controller_file": str(bad)}))
        rc = cli.main([
            "simulate", "--config", str(cfg), "--steps", "1",
            "--out", str(tmp_path / "x.csv"),
        ])
        assert rc == 1

    def test_unknown_field_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({"sedless": True}))
        rc = cli.main([
            "simulate", "--config", str(cfg), "--steps", "1",
            "--out", str(tmp_path / "x.csv"),
        ])
        assert rc == 1
        assert "unknown config fields" in capsys.readouterr().err
