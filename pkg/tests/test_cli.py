import json
import subprocess
import sys

import pytest

from dnacap.cli import main
from dnacap.codec import CodecConfig
from dnacap.fileio import read_samples


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_capacity(capsys):
    rc, out, err = run(capsys, "capacity", "--beta", "2", "--c", "1")
    assert rc == 0
    assert out.splitlines() == ["0.3160602794", "0.6321205588", "0.5"]
    assert "capacity" in err


def test_capacity_domain_error(capsys):
    rc, out, err = run(capsys, "capacity", "--beta", "0", "--c", "1")
    assert rc == 1 and out == ""
    assert "beta" in err


def test_usage_errors_exit_2(capsys):
    for argv in (["nosuch"], ["capacity", "--beta", "2"], ["capacity", "--beta", "2", "--c", "1", "--zzz", "3"]):
        with pytest.raises(SystemExit) as ei:
            main(argv)
        assert ei.value.code == 2


def test_typecount_modes(capsys):
    assert run(capsys, "typecount", "--a", "3", "--b", "2", "--exact")[1] == "6\n"
    assert run(capsys, "typecount", "--a", "3", "--b", "2")[1] == "6\n"
    out = run(capsys, "typecount", "--a", "3", "--b", "2", "--log-bound")[1]
    assert float(out) == pytest.approx(3.386294361, rel=1e-9)
    rc, out, _ = run(capsys, "typecount", "--a", "2", "--b", "2", "--enumerate")
    assert out.splitlines() == ["x1,x2", "0,2", "1,1", "2,0"]
    rc, _, err = run(capsys, "typecount", "--a", "3", "--b", "0", "--log-bound")
    assert rc == 1


def test_tail(capsys):
    rc, out, _ = run(capsys, "tail", "--m", "10000", "--c", "1", "--delta", str(0.36787944117144233 / 2))
    assert out == "0.003078284351\n"
    rc, out2, _ = run(capsys, "tail", "--m", "10000", "--c", "1", "--delta", "0.1", "--displayed-form")
    rc, out3, _ = run(capsys, "tail", "--m", "10000", "--c", "1", "--delta", "0.1")
    assert float(out2) == pytest.approx(float(out3) / 2, rel=1e-9)
    rc, _, err = run(capsys, "tail", "--m", "10", "--c", "2", "--delta", "0.001")
    assert rc == 1 and "too small" in err


def test_bounds(capsys):
    rc, out, _ = run(capsys, "bounds", "--m", "1000000", "--beta", "2", "--c", "1", "--delta", "0.01")
    assert rc == 0
    assert float(out.splitlines()[0]) > 0.3160602794


def test_coupon_requires_seed(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["coupon", "--m", "10", "--c", "1", "--trials", "3"])
    assert ei.value.code == 2


def test_coupon(capsys, tmp_path):
    csvp = tmp_path / "q.csv"
    rc, out, _ = run(capsys, "coupon", "--m", "100", "--c", "1", "--trials", "20", "--seed", "5",
                     "--delta", "0.1", "--out", str(csvp))
    assert rc == 0
    doc = json.loads(out)
    assert doc["tails"][0]["delta"] == 0.1
    assert csvp.read_text().splitlines()[0] == "trial,M,N,Q,fraction"


def test_encode_channel_decode_pipeline(capsys, tmp_path):
    cfg = CodecConfig(256, 32, 16, 180)
    (tmp_path / "cfg.json").write_text(cfg.to_json())
    payload = bytes(range(256)) * 2
    (tmp_path / "data.bin").write_bytes(payload)
    assert run(capsys, "encode", "--config", str(tmp_path / "cfg.json"), "--in", str(tmp_path / "data.bin"),
               "--out", str(tmp_path / "pool.dnap"))[0] == 0
    assert run(capsys, "channel", "--in", str(tmp_path / "pool.dnap"), "--c", "2", "--seed", "7",
               "--out", str(tmp_path / "s.dnas"))[0] == 0
    assert run(capsys, "decode", "--config", str(tmp_path / "cfg.json"), "--in", str(tmp_path / "s.dnas"),
               "--out", str(tmp_path / "out.bin"))[0] == 0
    assert (tmp_path / "out.bin").read_bytes() == payload
    # a pool file decodes as if every molecule were sampled once
    assert run(capsys, "decode", "--config", str(tmp_path / "cfg.json"), "--in", str(tmp_path / "pool.dnap"),
               "--out", str(tmp_path / "out2.bin"))[0] == 0
    assert (tmp_path / "out2.bin").read_bytes() == payload


def test_channel_genie_and_determinism(capsys, tmp_path):
    cfg = CodecConfig(64, 30, 8, 40)
    (tmp_path / "cfg.json").write_text(cfg.to_json())
    (tmp_path / "d").write_bytes(b"xyz")
    run(capsys, "encode", "--config", str(tmp_path / "cfg.json"), "--in", str(tmp_path / "d"),
        "--out", str(tmp_path / "p.dnap"))
    for name in ("a", "b"):
        run(capsys, "channel", "--in", str(tmp_path / "p.dnap"), "--c", "1", "--seed", "3",
            "--out", str(tmp_path / f"{name}.dnas"), "--genie")
    assert (tmp_path / "a.dnas").read_bytes() == (tmp_path / "b.dnas").read_bytes()
    s = read_samples(tmp_path / "a.dnas", 64)
    assert s.tagged and len(s) == 64


def test_decode_failure_leaves_no_output(capsys, tmp_path):
    cfg = CodecConfig(256, 32, 16, 250)
    (tmp_path / "cfg.json").write_text(cfg.to_json())
    (tmp_path / "d").write_bytes(b"abc")
    run(capsys, "encode", "--config", str(tmp_path / "cfg.json"), "--in", str(tmp_path / "d"),
        "--out", str(tmp_path / "p.dnap"))
    run(capsys, "channel", "--in", str(tmp_path / "p.dnap"), "--c", "0.5", "--seed", "1",
        "--out", str(tmp_path / "s.dnas"))
    rc, _, err = run(capsys, "decode", "--config", str(tmp_path / "cfg.json"), "--in", str(tmp_path / "s.dnas"),
                     "--out", str(tmp_path / "out.bin"))
    assert rc == 1 and "deficit" in err
    assert not (tmp_path / "out.bin").exists()
    assert not list(tmp_path.glob(".out.bin*"))


def test_encode_too_large(capsys, tmp_path):
    cfg = CodecConfig(16, 30, 8, 4)
    (tmp_path / "cfg.json").write_text(cfg.to_json())
    (tmp_path / "d").write_bytes(bytes(100))
    rc, _, err = run(capsys, "encode", "--config", str(tmp_path / "cfg.json"), "--in", str(tmp_path / "d"),
                     "--out", str(tmp_path / "p.dnap"))
    assert rc == 1 and not (tmp_path / "p.dnap").exists()


def test_experiment_subcommand(capsys, tmp_path):
    spec = {"experiments": [
        {"kind": "capacity-curve", "grid": {"beta": [1, 2], "c": [1]}},
        {"kind": "erasure", "seed": 3, "trials": 5, "grid": {"M": [200], "c": [1]}},
    ]}
    (tmp_path / "spec.json").write_text(json.dumps(spec))
    rc, out, _ = run(capsys, "experiment", "--spec", str(tmp_path / "spec.json"), "--out", str(tmp_path / "o"))
    assert rc == 0
    assert json.loads(out)["pass"] is True
    assert (tmp_path / "o" / "erasure.csv").exists()


def test_experiment_missing_seed_is_error(capsys, tmp_path):
    (tmp_path / "spec.json").write_text(json.dumps({"kind": "erasure", "grid": {"M": [10], "c": [1]}}))
    rc, _, err = run(capsys, "experiment", "--spec", str(tmp_path / "spec.json"), "--out", str(tmp_path / "o"))
    assert rc == 1 and "seed" in err


def test_console_script_module_entry():
    res = subprocess.run([sys.executable, "-m", "dnacap.cli", "capacity", "--beta", "2", "--c", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "0.3160602794"
