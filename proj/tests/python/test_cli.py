import os
import subprocess
import pytest

MWL = os.environ.get("MWL_BIN")
pytestmark = pytest.mark.skipif(not MWL, reason="MWL_BIN not set")


def run(*args):
    return subprocess.run([MWL, *args], capture_output=True, text=True)


def short_config(tmp_path, extra=""):
    cfg = tmp_path / "short.ini"
    cfg.write_text("[sim]\nduration = 1.5\n" + extra)
    return str(cfg)


def test_single_writes_manifest_and_replays(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    r = run("single", "--preset", "cascade-vib", "--config", short_config(tmp_path),
            "--seed", "3", "--out", str(out_a), "--emit-svg")
    assert r.returncode in (0, 1), r.stderr
    assert (out_a / "manifest.ini").exists()
    assert (out_a / "series.svg").exists()
    r2 = run("single", "--config", str(out_a / "manifest.ini"), "--out", str(out_b))
    assert r2.returncode == r.returncode
    for name in ("series.csv", "trials.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_mc_worker_invariance(tmp_path):
    cfg = short_config(tmp_path)
    a = run("mc", "--preset", "mwlest-noiseless", "--config", cfg, "--trials", "4",
            "--workers", "1", "--out", str(tmp_path / "a"))
    b = run("mc", "--config", str(tmp_path / "a" / "manifest.ini"), "--workers", "3",
            "--out", str(tmp_path / "b"))
    assert a.returncode == 0 and b.returncode == 0, a.stderr + b.stderr
    assert (tmp_path / "a" / "trials.csv").read_bytes() == (tmp_path / "b" / "trials.csv").read_bytes()


def test_sweep(tmp_path):
    r = run("sweep", "--preset", "mwlest-noise", "--config", short_config(tmp_path),
            "--trials", "2", "--noise-deg", "0", "2", "--out", str(tmp_path / "s"))
    assert r.returncode == 0, r.stderr
    lines = (tmp_path / "s" / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("sigma_deg,")
    assert len(lines) == 3


@pytest.mark.parametrize(
    "args",
    [
        [],
        ["bogus"],
        ["single", "--preset", "nope"],
        ["single", "--trials", "abc"],
        ["sweep", "--noise-deg"],
    ],
)
def test_usage_errors(tmp_path, args):
    r = run(*args, *(["--out", str(tmp_path / "x")] if args and args[0] in ("single", "sweep") else []))
    assert r.returncode == 2


def test_config_errors(tmp_path):
    bad_key = tmp_path / "k.ini"
    bad_key.write_text("[gains]\nk_zeta = 1\n")
    r = run("single", "--config", str(bad_key), "--out", str(tmp_path / "o"))
    assert r.returncode == 2
    assert "gains.k_zeta" in r.stderr
    bad_val = tmp_path / "v.ini"
    bad_val.write_text("[gains]\nk_chi = fast\n")
    assert run("single", "--config", str(bad_val), "--out", str(tmp_path / "o")).returncode == 2
    missing = run("single", "--config", str(tmp_path / "none.ini"), "--out", str(tmp_path / "o"))
    assert missing.returncode == 2


def test_diverged_single_exits_one(tmp_path):
    # A huge depth gain with a coarse step makes the observer blow up.
    cfg = tmp_path / "blowup.ini"
    cfg.write_text("[sim]\nduration = 1.5\ndt = 0.05\n[gains]\nk_chi = 1e7\nk_tau = 1e4\n")
    r = run("single", "--preset", "mwlest-noiseless", "--config", str(cfg), "--out", str(tmp_path / "d"))
    assert r.returncode == 1, r.stdout + r.stderr
    assert "diverged" in (tmp_path / "d" / "summary.txt").read_text()
