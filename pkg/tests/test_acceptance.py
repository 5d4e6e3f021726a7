"""Acceptance criteria, each run at its stated tolerance.

Every test records one pass/fail line; they are printed together at the end
of the pytest session. Run alone with ``pytest tests/test_acceptance.py``.
"""

import time

import pytest

from spectral_ous import MatrixModel, NormOracle, SpinModel
from spectral_ous.compression import eq7_residual
from spectral_ous.harness import SuiteConfig, find_counterexample, run_suite
from spectral_ous.kernels import BACKEND
from spectral_ous.report import encode_report
from spectral_ous.rng import ShiftRegisterRNG
from spectral_ous.spin import jb_condition_gap, psi_gram

pytestmark = pytest.mark.acceptance

MATRIX = [f"matrix:{n}" for n in range(2, 7)]
SPIN = [f"spin:{p}:{n}" for p in (2, 3, 5) for n in range(2, 9)]
BOTH = ["matrix:4", "spin:2:3", "spin:3:2", "spin:5:4"]

_START = {}


@pytest.fixture(scope="module", autouse=True)
def stopwatch():
    _START.setdefault("t", time.perf_counter())
    yield


def _run(model, suite, trials, seed=0):
    return run_suite(SuiteConfig(model=model, seed=seed, trials=trials, suites=(suite,)))


def _check(rep, key):
    """Look up a check by its unprefixed name (merged reports prefix the suite)."""
    (name,) = [k for k in rep.checks if k.rsplit("/", 1)[-1] == key]
    return rep.checks[name]


def _worst(reports, key):
    return max(_check(r, key).max_residual for r in reports)


def test_compression_axioms(criteria):
    t0 = time.perf_counter()
    reps = [_run(m, "compression-axioms", 1000) for m in MATRIX + SPIN]
    elapsed = time.perf_counter() - t0
    worst = max(r.max_residual for r in reps)
    ok = all(r.verdict == "pass" for r in reps) and worst <= 1e-8 and elapsed < 10.0
    criteria.record("compression axioms", ok,
                    f"{len(reps)} models x 1000 trials, max residual {worst:.2e} (<= 1e-8), "
                    f"{elapsed:.1f}s (< 10s, {BACKEND} kernels)")
    assert ok


def test_base_identity_and_complementarity(criteria):
    reps = [_run(m, "base-identity", 500) for m in MATRIX + ["spin:2:3", "spin:3:2", "spin:5:4"]]
    keys = ("base_identity", "complementary_pair", "complementarity_image", "complementarity_kernel")
    worst = max(_worst(reps, k) for k in keys)
    ok = worst <= 1e-9 and all(r.verdict == "pass" for r in reps)
    criteria.record("base identity and complementarity", ok,
                    f"{len(reps)} models x 500 triples, max residual {worst:.2e} (<= 1e-9)")
    assert ok


def test_orthogonal_decomposition(criteria):
    reps = {m: _run(m, "decomposition", 500) for m in BOTH}
    agree = _worst(reps.values(), "spectral_vs_search")
    ortho = _check(reps["matrix:4"], "orthogonal_parts").max_residual
    ok = agree <= 1e-9 and ortho <= 1e-9 and all(r.verdict == "pass" for r in reps.values())
    criteria.record("orthogonal decomposition", ok,
                    f"spectral vs search max {agree:.2e}, a+ o a- max {ortho:.2e} (<= 1e-9)")
    assert ok


def test_rickart(criteria):
    reps = [_run(m, "rickart", 200) for m in ("matrix:4", "matrix:6", "spin:3:2", "spin:2:4")]
    mism = _worst(reps, "biconditional_P(a)")
    star = _worst(reps, "star_equals_1_minus_support")
    clause = sum(r.details["rickart"]["commutation_clause_witnesses"] for r in reps)
    ok = mism == 0 and star <= 1e-9 and all(r.verdict == "pass" for r in reps)
    criteria.record("Rickart biconditional", ok,
                    f"4 models x 200 elements, {int(mism)} mismatches over P(a), "
                    f"a* vs 1-s(a) {star:.2e} (<= 1e-9), {clause} commutation-clause witnesses")
    assert ok


def test_rs_integral(criteria):
    reps = [_run(m, "rs-integral", 100) for m in BOTH]
    over = _worst(reps, "error_minus_mesh")
    inc = _worst(reps, "monotone_in_mesh")
    ok = all(r.verdict == "pass" for r in reps)
    criteria.record("RS integral", ok,
                    f"meshes 1..0.125, max(error - mesh) {over:.2e}, max increase on halving {inc:.1e}")
    assert ok


def test_functional_calculus(criteria):
    reps = [_run(m, "calculus", 200) for m in BOTH]
    mult = _worst(reps, "multiplicative")
    push = _worst(reps, "pushforward")
    ok = all(r.verdict == "pass" for r in reps) and push <= 1e-9
    criteria.record("functional calculus laws", ok,
                    f"multiplicative max {mult:.2e} (<= 1e-8 scaled), pushforward max {push:.2e} (<= 1e-9)")
    assert ok


def test_jb_characterization(criteria):
    jb = [_run(m, "jb-condition", 1000) for m in ("matrix:4", "spin:2:3")]
    eq7 = _worst(jb, "eq7")
    c = 2 ** (-2 / 3)
    l3 = SpinModel(NormOracle.lp(3, 2))
    _, defect = jb_condition_gap(l3.atom([c, c]), l3.atom([1.0, 0.0]))
    oracle = abs(2 ** (-1 / 3) - 2 ** (-2 / 3))
    found = {}
    for p in (1.5, 3, 5):
        rep = find_counterexample(SuiteConfig(model=f"spin:{p}:2", trials=100), "eq7", threshold=0.05)
        found[p] = rep.max_residual
    ok = (eq7 <= 1e-9 and all(r.verdict == "pass" for r in jb)
          and abs(defect - 0.1637) <= 1e-3 and abs(defect - oracle) <= 1e-12
          and all(v >= 0.05 for v in found.values()))
    criteria.record("JB characterization", ok,
                    f"eq7 max {eq7:.2e} on 1000 pairs (matrix, l2); l3 witness defect {defect:.4f}; "
                    + ", ".join(f"l{p}: {v:.3f}" for p, v in found.items()) + " (>= 0.05 in 100)")
    assert ok


def test_psi_reconstruction(criteria):
    import numpy as np
    gram, l2_defect = psi_gram(NormOracle.lp(2, 4), list(np.eye(4)), samples=200)
    gram_err = float(np.max(np.abs(gram - np.eye(4))))
    found = {}
    for model in ("spin:1.5:2", "spin:3:2", "spin:5:3"):
        rep = find_counterexample(SuiteConfig(model=model, trials=10_000), "psi-linearity")
        found[model] = (rep.max_residual, rep.details["first_witness_trial"])
    ok = gram_err <= 1e-9 and l2_defect <= 1e-8 and all(
        v >= 0.01 and first is not None for v, first in found.values())
    criteria.record("psi reconstruction", ok,
                    f"l2 Gram error {gram_err:.1e}, l2 defect {l2_defect:.1e}; "
                    + ", ".join(f"{m}: {v:.3f} at trial {f}" for m, (v, f) in found.items()))
    assert ok


def test_support_limit(criteria):
    reps = [_run(m, "support-limit", 200) for m in BOTH + ["matrix:6"]]
    bound = _worst(reps, "distance_bound")
    mono = _worst(reps, "monotone")
    ok = all(r.verdict == "pass" for r in reps)
    criteria.record("support limit", ok,
                    f"n = 2..64, max(distance - bound) {bound:.1e}, monotonicity deficit {mono:.1e}")
    assert ok


def test_commute_equivalence(criteria):
    reps = [_run(m, "commute-equivalence", 1000) for m in ("matrix:3", "matrix:6")]
    dis = sum(int(_check(r, "disagreements").max_residual) for r in reps)
    commuting = sum(r.details["commute-equivalence"]["commuting_pairs"] for r in reps)
    ok = dis == 0 and commuting > 0
    criteria.record("extended vs operator commutation", ok,
                    f"2 x 1000 pairs, {dis} disagreements, {commuting} commuting pairs")
    assert ok


def test_determinism_and_runtime(criteria):
    same = True
    for m in ("matrix:4", "spin:2:3", "spin:3:2"):
        cfg = SuiteConfig(model=m, seed=7, trials=20)
        same &= encode_report(run_suite(cfg)) == encode_report(run_suite(cfg))
    elapsed = time.perf_counter() - _START["t"]
    ok = same and elapsed < 120.0
    criteria.record("determinism and runtime", ok,
                    f"byte-identical reruns: {same}; acceptance run {elapsed:.1f}s (< 120s)")
    assert ok


def test_l3_witness_also_breaks_eq7():
    # sanity companion: the same pair shows up in the order-unit residual
    c = 2 ** (-2 / 3)
    l3 = SpinModel(NormOracle.lp(3, 2))
    assert eq7_residual(l3.atom([c, c]), l3.atom([1.0, 0.0])) > 0.08
    assert MatrixModel(2).descriptor == "matrix:2"
    assert ShiftRegisterRNG(0).seed == 0
