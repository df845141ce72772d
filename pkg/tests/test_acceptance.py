"""Acceptance gate: one test per criterion, each printing a single pass/fail line."""

import io
import time

import numpy as np
import pytest

from catalog_runs import default_suite
from pqtwistor.algebra import UNITS, pq_mul, s_split, standard_triple
from pqtwistor.catalog import catalog_get, catalog_list
from pqtwistor.checks import (
    check_cor_t27,
    check_idric,
    check_ltor,
    check_prop_t25,
    check_theorem_four,
    check_zamkovoy_pq,
)
from pqtwistor.cli import main
from pqtwistor.geometry import PointFrame
from pqtwistor.oracle import QUANTITIES, run_oracle
from test_algebra import PRODUCT_TABLE, proj02_trial, random_admissible


@pytest.fixture
def announce(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return emit


def test_criterion_1_algebra(announce):
    start = time.perf_counter()
    exact = 0
    for a in range(4):
        for b in range(4):
            sign, idx = PRODUCT_TABLE[a][b]
            exact += np.array_equal(pq_mul(UNITS[a], UNITS[b]).as_array(), sign * UNITS[idx].as_array())
    rng = np.random.default_rng(1)
    T = standard_triple(1)
    proj = max(proj02_trial(rng, T) for _ in range(1000))
    split = 0.0
    for _ in range(100):
        T2, S0, s, S = random_admissible(rng, 2)
        out = s_split(S, T2)
        split = max(split, np.max(np.abs(out.s - s)), np.max(np.abs(out.S0 - S0)))
    elapsed = time.perf_counter() - start
    ok = exact == 16 and proj < 1e-10 and split < 1e-10 and elapsed < 1.0
    announce(1, ok, f"exact products {exact}/16, proj02 max {proj:.2e}, s_split max {split:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_2_oracle_agreement(announce):
    start = time.perf_counter()
    worst = {}
    for name in ("flat-r4", "conf-flat", "prod-surfaces"):
        spec = catalog_get(name)
        for p in spec.sample(20, 2024):
            for q in QUANTITIES:
                rec = run_oracle(spec, q, p, 1e-5)
                worst[name, q] = max(worst.get((name, q), 0.0), rec["max_rel_dev"])
    elapsed = time.perf_counter() - start
    top = max(worst, key=worst.get)
    ok = max(worst.values()) < 1e-5 and elapsed < 10.0
    announce(2, ok, f"worst relative deviation {worst[top]:.2e} ({top[0]}, {top[1]}) over 300 comparisons, {elapsed:.2f} s")
    assert ok


def test_criterion_3_curvature_split(announce):
    comm, control = 0.0, np.inf
    for name in ("flat-r8-pqkt", "conf-flat"):
        spec = catalog_get(name)
        for p in spec.sample(spec.sample_points, 0):
            pf = PointFrame(spec, p)
            comm = max(comm, pf.curvature_split()[2])
            # rho_2 with the opposite sign
            control = min(control, pf.curvature_split((1, -1, 1))[2])
    ok = comm < 1e-7 and control > 1e-2
    announce(3, ok, f"max commutator {comm:.2e}; wrong rho-sign control min {control:.3f}")
    assert ok


def test_criterion_4_theorem_four(announce):
    start = time.perf_counter()
    total = agree = 0
    pairs = {}
    for name, npts in (("conf-flat", 100), ("prod-surfaces", 100)):
        spec = catalog_get(name)
        rep = check_theorem_four(spec, spec.sample(npts, 4))
        for res in rep.residuals:
            if res is None:
                continue
            asd, idric = res["W+"] < 1e-7, res["idric"] < 1e-7
            total += 1
            agree += asd == idric
            pairs.setdefault(name, set()).add((asd, idric))
    elapsed = time.perf_counter() - start
    ok = (
        total >= 200
        and agree == total
        and pairs == {"conf-flat": {(True, True)}, "prod-surfaces": {(False, False)}}
        and elapsed < 30.0
    )
    announce(4, ok, f"agreement {agree}/{total}, indicator pairs {pairs}, {elapsed:.2f} s")
    assert ok


def test_criterion_5_sheet_symmetry(announce):
    spec = catalog_get("flat-r4-s1")
    rep = check_ltor(spec, spec.sample(spec.sample_points, 0), nsamples_J=64)
    zm, zp = rep.max_residual("Z-"), rep.max_residual("Z+")
    ratio = max(zm, zp) / min(zm, zp)
    free = 0.0
    for name in ("flat-r4", "conf-flat", "prod-surfaces"):
        s = catalog_get(name)
        r = check_ltor(s, s.sample(s.sample_points, 0), nsamples_J=64)
        free = max(free, r.max_residual("Z-"), r.max_residual("Z+"))
    ok = zm > 0 and zp > 0 and ratio < 10 and free < 1e-10
    announce(5, ok, f"Z- max {zm:.3e}, Z+ max {zp:.3e}, ratio {ratio:.2f}; torsion-free max {free:.1e}")
    assert ok


def test_criterion_6_s_field_bundles(announce):
    bundle = ("s-relation", "eq5", "eq5'", "torsion02-diff")
    expected = {"flat-r4-srel": "below", "flat-r4-s1": "above", "flat-r4-s0": "below"}
    got = {}
    lo_hi = {}
    for name in expected:
        spec = catalog_get(name)
        pts = spec.sample(spec.sample_points, 0)
        t25 = check_prop_t25(spec, pts, nsamples_J=64)
        t27 = check_cor_t27(spec, pts, nsamples_J=64)
        tol = t25.tolerance
        values = []
        for r25, r27 in zip(t25.residuals, t27.residuals):
            values += [r25["s-relation"], r25["eq5"], r25["eq5'"], r27["torsion02-diff"]]
        lo, hi = min(values), max(values)
        lo_hi[name] = (lo, hi)
        got[name] = "below" if hi < tol else "above" if lo > 10 * tol else "mixed"
    ok = got == expected
    detail = ", ".join(f"{n} {got[n]} [{lo_hi[n][0]:.1e}, {lo_hi[n][1]:.1e}]" for n in expected)
    announce(6, ok, f"bundle {'/'.join(bundle)}: {detail}")
    assert ok


def test_criterion_7_cor_cur_prerequisites(announce):
    spec = catalog_get("flat-r8-pqkt")
    pts = spec.sample(spec.sample_points, 0)
    lt, idr = check_ltor(spec, pts), check_idric(spec, pts)
    lt_max = max(lt.max_residual(k) for k in lt.judged)
    id_max = max(idr.max_residual(k) for k in idr.judged)
    ok = lt.verdict == "holds" and idr.verdict == "holds" and lt_max < 1e-8 and id_max < 1e-7
    announce(7, ok, f"ltor max {lt_max:.1e} ({lt.verdict}), idric max {id_max:.1e} ({idr.verdict})")
    assert ok


def test_criterion_8_span_integrability(announce):
    flat_max = 0.0
    for name in ("frame-hpc-4d", "flat-r8"):
        spec = catalog_get(name)
        rep = check_zamkovoy_pq(spec, spec.sample(spec.sample_points, 0))
        flat_max = max(flat_max, rep.max_residual("literal"))
    spec = catalog_get("perturbed-J")
    rep = check_zamkovoy_pq(spec, spec.sample(spec.sample_points, 0))
    generic = min(r["literal"] for r in rep.residuals if r is not None)
    ok = flat_max < 1e-8 and generic > 1e-3
    announce(8, ok, f"integrable max {flat_max:.1e}; perturbed-J min {generic:.3f} over {len(rep.residuals)} points")
    assert ok


def test_criterion_9_determinism(announce, tmp_path):
    outputs = []
    for i in range(2):
        path = tmp_path / f"run{i}.json"
        main(["check", "--example", "prod-surfaces", "--seed", "11", "--json", str(path)], out=io.StringIO())
        outputs.append(path.read_bytes())
    docs, elapsed = default_suite()
    ok = outputs[0] == outputs[1] and len(docs) == len(catalog_list()) and elapsed < 120.0
    announce(9, ok, f"byte-identical JSON {outputs[0] == outputs[1]}; full catalog ({len(docs)} entries) in {elapsed:.1f} s")
    assert ok
