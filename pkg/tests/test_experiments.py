import pytest

from kih.bench import bench, bench_size
from kih.entropy import Entropy
from kih.errors import ParamsError, PreconditionError
from kih.harness import defect_report, summarize, DefectSample
from kih.modmath import Params
from kih.presets import ENV_VAR, PRESETS, describe, get_preset
from kih.report import fmt_value, format_report, histogram, run_trials


def test_presets():
    assert (PRESETS["TOY"].n, PRESETS["TOY"].q, PRESETS["TOY"].p) == (1, 16, 4)
    assert get_preset("desk").tree == "balanced:8"
    assert get_preset("TOY", "leftspine:3").tree == "leftspine:3"
    with pytest.raises(ParamsError):
        get_preset("HUGE")


def test_preset_env_default(monkeypatch):
    monkeypatch.setenv(ENV_VAR, "DESK")
    assert get_preset() == PRESETS["DESK"]
    monkeypatch.delenv(ENV_VAR)
    assert get_preset() == PRESETS["TOY"]


def test_describe():
    d = describe(PRESETS["LARGE"])
    assert d["expansion"] == 4 and d["input_bits"] == 32 and d["output_shape"] == "528x528"


def test_report_format():
    text = format_report({"b": 1.5, "a": [1, 2], "c": {2: 3, 1: 4}, "d": True})
    assert text == "a: 1 2\nb: 1.500000\nc: 1:4 2:3\nd: true\n"
    assert histogram([2, 1, 2]) == {1: 1, 2: 2}
    assert fmt_value("x") == "x"


def _square(x):
    return x * x


def test_run_trials_order_preserved():
    assert run_trials(_square, list(range(20)), jobs=3) == [x * x for x in range(20)]


def test_summarize_counts():
    s = [DefectSample("0000", "0001", 1, True, 1), DefectSample("0010", "0001", 2, False, 0)]
    out = summarize("t", s)
    assert out["t.defect.hist"] == {1: 1, 2: 1}
    assert out["t.bound_le_1.fraction"] == 0.5
    assert out["t.selectors_agree.bound_le_1"] == 1 and out["t.selectors_differ.bound_le_1"] == 0


def test_defect_report_deterministic_serial_vs_parallel():
    toy = get_preset("TOY")
    a = format_report(defect_report(toy, 12, Entropy("01"), ["balanced:2", "rightspine:3"], verify=True))
    b = format_report(defect_report(toy, 12, Entropy("01"), ["balanced:2", "rightspine:3"], jobs=3))
    assert a.replace("oracle.verified: true\n", "") == b


def test_bench_counts_exact():
    r = bench_size(get_preset("TOY"), 4, Entropy(b"b"), reps=1)
    assert r["counts_exact"] and r["max_recomputed"] == 2


def test_bench_empty_sizes():
    with pytest.raises(PreconditionError):
        bench(get_preset("TOY"), [], Entropy(b"b"))


def test_bench_report_fields():
    r = bench(Params(n=1, q=256, p=16), [2, 4], Entropy(b"b"), reps=1)
    assert r["T04.recompute_counts_exact"] and r["T04.max_recomputed_nodes"] == 2
    assert {"T02.fresh_seconds", "T04.incremental_speedup", "T04.ratio_vs_T02", "T04.linear_ratio_vs_T02"} <= set(r)
