import subprocess
import sys

import pytest

from kih.cli import main

E1 = "00" * 31 + "01"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path, capsys):
    inst, seed, seed1 = tmp_path / "inst.kih", tmp_path / "seed.kih", tmp_path / "seed1.kih"
    assert run(capsys, "instance", "--preset", "TOY", "--entropy", E1, "--out", str(inst))[0] == 0
    assert run(capsys, "keygen", "--instance", str(inst), "--entropy", "02", "--out", str(seed))[0] == 0
    assert run(capsys, "keygen", "--instance", str(inst), "--entropy", "03", "--out", str(seed1))[0] == 0
    return tmp_path, str(inst), str(seed), str(seed1)


def test_selftest_toy(capsys):
    code, out, _ = run(capsys, "selftest", "--preset", "TOY")
    assert code == 0
    assert out.count(": pass") == 8


def test_eval_and_eval_prime(files, capsys):
    _, inst, seed, _ = files
    code, out, _ = run(capsys, "eval", "--instance", inst, "--seed", seed, "--input", "1001")
    assert code == 0 and "output.shape: 5x5" in out
    code, out, _ = run(capsys, "eval-prime", "--instance", inst, "--seed", seed, "--z0", "10", "--z1", "1Z")
    assert code == 0 and "z1: 1Z" in out


def test_eval_length_error(files, capsys):
    _, inst, seed, _ = files
    code, _, err = run(capsys, "eval", "--instance", inst, "--seed", seed, "--input", "100")
    assert code == 5 and "LengthError" in err


def test_eval_bad_file(files, capsys):
    tmp, _, seed, _ = files
    bad = tmp / "bad.kih"
    bad.write_bytes(b"garbage")
    code, _, err = run(capsys, "eval", "--instance", str(bad), "--seed", seed, "--input", "1001")
    assert code == 3 and "FormatError" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["defect", "--trials", "0"])
    assert exc.value.code == 2
    assert run(capsys, "bench", "--sizes", "")[0] == 2


def test_invariant_exit_code(capsys):
    assert run(capsys, "defect", "--preset", "TOY", "--tree", "balanced:3", "--trials", "1")[0] == 4


def test_defect_byte_identical(capsys):
    argv = ["defect", "--trials", "50", "--tree", "balanced:2", "--preset", "TOY", "--entropy", E1]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    _, c, _ = run(capsys, *argv, "--jobs", "3")
    assert a == b == c
    assert "balanced:2.trials: 50" in a


def test_env_preset(monkeypatch, capsys):
    monkeypatch.setenv("KIH_PRESET", "DESK")
    _, out, _ = run(capsys, "defect", "--trials", "1", "--entropy", "01", "--tree", "balanced:2")
    assert "preset.q: 65536" in out


def test_cprf_commands(files, capsys):
    tmp, inst, seed, seed1 = files
    ck = str(tmp / "ck.kih")
    assert run(capsys, "cprf", "constrain", "--instance", inst, "--seed", seed, "--side", "left", "--mode", "ones",
               "--x0", "10", "--out", ck)[0] == 0
    code, out, _ = run(capsys, "cprf", "eval", "--instance", inst, "--seed", seed1, "--key", ck, "--target", "01")
    assert code == 0 and "output.sha256" in out
    zk = str(tmp / "zk.kih")
    run(capsys, "cprf", "constrain", "--instance", inst, "--seed", seed, "--side", "right", "--mode", "zeros",
        "--x0", "10", "--out", zk)
    assert run(capsys, "cprf", "eval", "--instance", inst, "--seed", seed1, "--key", zk, "--target", "1Z")[0] == 0
    assert run(capsys, "cprf", "eval", "--instance", inst, "--seed", seed1, "--key", zk, "--target", "10")[0] == 5


def test_ue_store_flow(tmp_path, capsys):
    st = str(tmp_path / "store")
    assert run(capsys, "ue", "setup", "--preset", "TOY", "--store", st, "--entropy", "0a")[0] == 0
    assert run(capsys, "ue", "enc", "--store", st, "--id", "01", "--message", "1,2,3")[0] == 0
    code, out, _ = run(capsys, "ue", "dec", "--store", st, "--id", "01")
    assert code == 0 and "message: 1 2 3 0" in out
    assert run(capsys, "ue", "next", "--store", st, "--entropy", "0b")[0] == 0
    assert run(capsys, "ue", "dec", "--store", st, "--id", "01")[0] == 5
    code, out, _ = run(capsys, "ue", "upd", "--store", st)
    assert code == 0 and "updated: 1" in out
    code, out, _ = run(capsys, "ue", "upd", "--store", st)
    assert "updated: 0" in out and "skipped: 1" in out
    assert run(capsys, "ue", "dec", "--store", st, "--id", "01")[0] == 0
    assert run(capsys, "ue", "enc", "--store", st, "--id", "01", "--message", "9")[0] == 3
    assert run(capsys, "ue", "enc", "--store", st, "--id", "01", "--robust", "1")[0] == 5


def test_ue_demo_deterministic(capsys):
    argv = ["ue", "demo", "--preset", "TOY", "--entropy", "0c", "--epochs", "2", "--trials", "4"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv, "--jobs", "2")
    assert a == b
    assert "consistency.chain_length: 2" in a and "unidirectionality.reversions.total" in a


def test_bench_command(capsys):
    code, out, _ = run(capsys, "bench", "--preset", "TOY", "--sizes", "2,4", "--reps", "1", "--entropy", "01")
    assert code == 0 and "T04.recompute_counts_exact: true" in out


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "kih.cli", "selftest", "--preset", "TOY"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and "ue: pass" in proc.stdout


def test_run_config_validation():
    import argparse

    from kih.cli import RunConfig

    with pytest.raises(argparse.ArgumentTypeError):
        RunConfig("defect", trials=0)
    cfg = RunConfig("defect", preset="DESK", entropy_seed=b"\x01")
    assert cfg.params.n == 4
    assert cfg.entropy().uniform(3, 100) == cfg.entropy().uniform(3, 100)
