"""Homomorphism-defect experiments over tree shapes.

For each shape: sample a public instance, then per trial two seeds, an input
``x`` and an input ``y`` sharing ``x``'s left half, and measure
``||F'_{S1+S2}(x_lh, x_rh (+) y_rh) - F_S1(x) - F_S2(y)||``. Results are
reported as distributions; no bound is asserted.
"""
from __future__ import annotations

from dataclasses import dataclass

from .kihprf import PrfInstance, homomorphism_defect, keygen, sample_instance
from .modmath import Params
from .oracle import Oracle, to_lists
from .report import histogram, run_trials

DEFAULT_SHAPES = ("balanced:2", "balanced:4", "leftspine:3", "rightspine:3")


@dataclass(frozen=True)
class DefectSample:
    x: str
    y: str
    defect: int
    selectors_agree: bool
    zbar_count: int


def draw_tuple(inst: PrfInstance, entropy):
    k = inst.tree.leaves
    s1 = keygen(inst.params, entropy)
    s2 = keygen(inst.params, entropy)
    x = entropy.bits(2 * k)
    y = x[:k] + entropy.bits(k)
    return s1, s2, x, y


def _trial(args) -> DefectSample:
    inst, entropy, verify = args
    k = inst.tree.leaves
    s1, s2, x, y = draw_tuple(inst, entropy)
    d = homomorphism_defect(inst, s1, s2, x, y)
    if verify:
        ref = Oracle(inst).defect(to_lists(s1.S), to_lists(s2.S), x, y)
        if ref != d:
            raise AssertionError(f"oracle disagrees on defect for x={x} y={y}: {d} vs {ref}")
    zbars = sum(a == b == "0" for a, b in zip(x[k:], y[k:]))
    return DefectSample(x, y, d, x[k] == y[k], zbars)


def shape_samples(params: Params, shape: str, trials: int, entropy, jobs: int = 1,
                  verify: bool = False) -> list[DefectSample]:
    inst = sample_instance(params.with_tree(shape), entropy.child(f"instance/{shape}"))
    args = [(inst, entropy.child(f"{shape}/{j}"), verify) for j in range(trials)]
    return run_trials(_trial, args, jobs)


def summarize(shape: str, samples: list[DefectSample]) -> dict:
    n = len(samples)
    defects = [s.defect for s in samples]
    agree = [s.defect for s in samples if s.selectors_agree]
    differ = [s.defect for s in samples if not s.selectors_agree]
    out = {
        f"{shape}.trials": n,
        f"{shape}.defect.hist": histogram(defects),
        f"{shape}.defect.max": max(defects),
        f"{shape}.defect.mean": sum(defects) / n,
        f"{shape}.bound_le_1.fraction": sum(d <= 1 for d in defects) / n,
        f"{shape}.selectors_agree.count": len(agree),
        f"{shape}.selectors_agree.bound_le_1": sum(d <= 1 for d in agree),
        f"{shape}.selectors_differ.count": len(differ),
        f"{shape}.selectors_differ.bound_le_1": sum(d <= 1 for d in differ),
    }
    return out


def defect_report(params: Params, trials: int, entropy, shapes=DEFAULT_SHAPES, jobs: int = 1,
                  verify: bool = False) -> dict:
    fields = {"preset.n": params.n, "preset.q": params.q, "preset.p": params.p, "shapes": list(shapes)}
    for shape in shapes:
        fields.update(summarize(shape, shape_samples(params, shape, trials, entropy, jobs, verify)))
    if verify:
        fields["oracle.verified"] = True
    return fields
