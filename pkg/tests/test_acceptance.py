import decimal
import glob
import json
import math
import random
import time
from math import comb
from pathlib import Path

import numpy as np

import nevlab
from conftest import ACCEPTANCE_LINES, random_form
from nevlab.curves import Curve
from nevlab.errors import BoundaryZero, HypothesisViolated
from nevlab.filtration import (
    filtration_profile,
    quotient_dim_combinatorial,
    quotient_dim_rank,
    ratio_bound_check,
    theorem_constants,
)
from nevlab.forms import linear_form
from nevlab.harness import ExperimentConfig, defect_table, run_verify
from nevlab.nevanlinna import characteristic, counting, isolate_zeros, jensen_check
from nevlab.poly import ExpPoly, Poly
from nevlab.position import build_general_position, check_subgeneral_position, dim_at_most
from nevlab.scalars import QI

SUITES = Path(nevlab.__file__).parent / "suites"


def record(k, ok, detail):
    line = f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _substituted_L0(n, N, q, eps, d):
    # direct substitution with the decimal module, kept apart from the package code
    L = (n + 1) * d + 2 * (N - n + 1) * (n + 1) ** 3 * math.ceil(1 / eps) * d
    u = comb(L + n, n)
    B = u * (u - 1) * comb(q, n)
    with decimal.localcontext() as ctx:
        ctx.prec = 60
        x = decimal.Decimal(eps) / (3 * (n + 1) * (N - n + 1))
        p0 = int(((B - 1) / (1 + x).ln()).to_integral_value(rounding=decimal.ROUND_FLOOR)) ** 2
    return L, u, B, p0, u * p0 ** (B - 2) - 1


def test_c01_constants_reproduction():
    t0 = time.perf_counter()
    c = theorem_constants(1, 1, 3, 1, [1, 1, 1])
    dt = time.perf_counter() - t0
    L, u, B, p0, L0 = _substituted_L0(1, 1, 3, 1, 1)
    ok = (
        (c.L, c.u, c.B_bound, c.p0) == (18, 19, 1026, 44209201)
        and (L, u, B, p0) == (c.L, c.u, c.B_bound, c.p0)
        and c.L0 == 19 * 44209201 ** 1024 - 1 == L0
        and dt < 1.0
    )
    record(1, ok, f"L={c.L} u={c.u} B={c.B_bound} p0={c.p0} L0 has {c.L0_digits} digits, {dt:.3f}s")


def _complete_intersection(rng, n, d):
    # n forms of degree d in n+1 variables whose common zero set is certified finite
    while True:
        fam = [random_form(rng, n, d, height=6) for _ in range(n)]
        if dim_at_most(fam, 0, seed=rng.randrange(1 << 30)).certified:
            return fam


def test_c02_quotient_dimension_oracles():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    families = mismatches = checks = 0
    for n in (1, 2, 3):
        for d in (1, 2, 3):
            for _ in range(3):
                fam = _complete_intersection(rng, n, d)
                families += 1
                for L in range(9):
                    checks += 1
                    if quotient_dim_rank(fam, L) != quotient_dim_combinatorial(n, d, L):
                        mismatches += 1
    dt = time.perf_counter() - t0
    ok = families >= 20 and mismatches == 0 and dt < 120
    record(2, ok, f"{families} families, {checks} comparisons, {mismatches} mismatches, {dt:.1f}s")


def test_c03_combinatorial_tail():
    t0 = time.perf_counter()
    bad = 0
    count = 0
    for n in range(1, 5):
        for d in range(1, 5):
            for L in range(n * (d - 1), 21):
                count += 1
                if quotient_dim_combinatorial(n, d, L) != d ** n:
                    bad += 1
    dt = time.perf_counter() - t0
    record(3, bad == 0 and dt < 1.0, f"{count} cases, {bad} off d^n, {dt:.3f}s")


def test_c04_filtration_bounds():
    from fractions import Fraction

    t0 = time.perf_counter()
    cases = bad = 0
    for n in (1, 2, 3):
        for N in range(n, 6):
            for d in (1, 2, 3):
                for eps in (Fraction(1), Fraction(1, 2), Fraction(1, 4)):
                    cases += 1
                    rep = ratio_bound_check(n, N, d, eps)
                    prof = filtration_profile(n, d, rep.L)
                    if not (prof.A >= d ** n * comb(rep.L // d, n + 1) and rep.ratio <= n + 1 + eps / (2 * (N - n + 1))):
                        bad += 1
    dt = time.perf_counter() - t0
    record(4, bad == 0 and dt < 60, f"{cases} cases, {bad} violations, {dt:.1f}s")


def test_c05_general_position_pipeline():
    t0 = time.perf_counter()
    rng = random.Random(7)
    shapes = [(n, N, d) for n in (1, 2) for N in range(n, 5) for d in (1, 2)]
    tried = ok_count = 0
    while tried < 28:
        n, N, d = shapes[tried % len(shapes)]
        fam = [random_form(rng, n, d, height=4) for _ in range(N + 1)]
        if not check_subgeneral_position(fam, N).certified:
            continue
        tried += 1
        recipe = build_general_position(fam, seed=tried)
        again = check_subgeneral_position(list(recipe.forms), n)
        if again.certified and len(recipe.forms) == n + 1:
            ok_count += 1
    dt = time.perf_counter() - t0
    record(5, ok_count == tried >= 25 and dt < 300, f"{ok_count}/{tried} families re-certified, {dt:.1f}s")


def test_c06_jensen_oracle():
    t0 = time.perf_counter()
    rng = random.Random(99)
    worst = 0.0
    done = 0
    while done < 100:
        deg = rng.randint(1, 8)
        coeffs = [complex(rng.randint(-9, 9), rng.randint(-9, 9)) for _ in range(deg)] + [complex(rng.randint(1, 9), 0)]
        p = Poly([QI.coerce(c) for c in coeffs])
        r = rng.uniform(0.5, 4.0)
        try:
            worst = max(worst, jensen_check(p, r))
        except BoundaryZero:
            continue
        done += 1
    dt = time.perf_counter() - t0
    record(6, worst < 1e-8 and dt < 30, f"max residual {worst:.2e} over {done} polynomials, {dt:.1f}s")


def test_c07_closed_forms():
    z = Poly.z()
    line = Curve([1, z])
    radii = np.geomspace(1.5, 1e4, 20)
    err_line = max(abs(characteristic(line, r) - 0.5 * math.log((1 + r * r) / 2)) for r in radii)
    expc = Curve([ExpPoly.coerce(1), ExpPoly.exp(1)])
    ratio = characteristic(expc, 20.0) / 20.0
    rel = abs(ratio - 1 / math.pi) * math.pi
    para = Curve([1, z * z])
    x1 = linear_form([0, 1])
    err_count = max(abs(counting(para, x1, r) - 2 * math.log(r)) for r in radii)
    ok = err_line < 1e-8 and rel <= 0.05 and err_count < 1e-10
    record(
        7,
        ok,
        f"T_line err {err_line:.1e}; T_exp(20)/20 = {ratio:.5f} vs 1/pi = {1 / math.pi:.5f} ({100 * rel:.1f}% off); N err {err_count:.1e}",
    )


def test_c08_argument_principle():
    t0 = time.perf_counter()
    g = ExpPoly.exp(1) - 1
    got = [isolate_zeros(g, r).degree() for r in (1, 7, 13)]
    dt = time.perf_counter() - t0
    record(8, got == [1, 3, 5] and dt < 60, f"counts {got} at r = 1, 7, 13, {dt:.1f}s")


def test_c09_end_to_end():
    t0 = time.perf_counter()
    fixed = run_verify(ExperimentConfig.load(SUITES / "fixed_lines.json"))
    moving = run_verify(ExperimentConfig.load(SUITES / "exppoly_moving.json"))
    try:
        run_verify(ExperimentConfig.load(SUITES / "violated.json"))
        third = "ran"
    except HypothesisViolated as exc:
        third = f"HypothesisViolated({exc.kind})"
    margin = fixed.tail["min_rhs_over_T"] - fixed.tail["threshold"]
    dt = time.perf_counter() - t0
    ok = (
        fixed.verdict == "PASS"
        and moving.verdict == "PASS"
        and third.startswith("HypothesisViolated")
        and fixed.tail["tau"] == moving.tail["tau"] == 0.05
        and margin >= 0.5
        and dt < 600
    )
    record(9, ok, f"{fixed.verdict}/{moving.verdict}/{third}, fixed-line tail margin {margin:.3f}, {dt:.1f}s")


def test_c10_defect_relation():
    results = []
    for path in sorted(glob.glob(str(SUITES / "*.json"))):
        data = json.loads(Path(path).read_text())
        if "curve" not in data:
            continue
        cfg = ExperimentConfig.from_json(data)
        table = defect_table(cfg)
        results.append((Path(path).stem, table["sum"], table["bound"]))
    ok = bool(results) and all(s <= b + 0.1 for _, s, b in results)
    record(10, ok, ", ".join(f"{name} {s:g}<={b}+0.1" for name, s, b in results))


def test_c11_determinism():
    texts = [run_verify(ExperimentConfig.load(SUITES / "exppoly_moving.json", seed=5)).dumps() for _ in range(2)]
    texts += [run_verify(ExperimentConfig.load(SUITES / "fixed_lines.json", seed=5)).dumps() for _ in range(2)]
    ok = texts[0] == texts[1] and texts[2] == texts[3]
    record(11, ok, "byte-identical JSON for repeated runs of two suites")
