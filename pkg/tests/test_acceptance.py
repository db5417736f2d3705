"""Acceptance criteria 1-10, one test (and one reported line) per criterion."""

import io
import math
import runpy
import time
from pathlib import Path

import numpy as np
import pytest

from felldeform import tolerances as tol
from felldeform.calculus import (commutator_limit_scan, derivative_limit_scan, log_log_slope,
                                 poisson_bracket, taylor_scan)
from felldeform.checks import AXIOM_HBARS, axiom_checks, lens_checks, spectral_checks
from felldeform.cli import cmd_field_scan, main, make_config
from felldeform.deform import GradedElement
from felldeform.fiber import Fiber
from felldeform.grading import GroupIndex
from felldeform.models import (build_heisenberg, build_lens, build_sphere, build_torus,
                               heis_bracket_oracle, heis_closed_form_residuals, monomial,
                               random_theta)
from felldeform.models.sphere import monomial_exponents
from felldeform.models.torus import torus_mode
from felldeform.report import read_csv

pytestmark = pytest.mark.slow

GOLDEN = Path(__file__).resolve().parent / "golden"
load_cases = runpy.run_path(str(GOLDEN.parent.parent / "scripts" / "regenerate_goldens.py"))["load_cases"]
HBARS_LOG = np.logspace(-4, -1, 25)
TWO_PI_I = 2j * np.pi

BUILDERS = {
    "torus": lambda: build_torus(0.3),
    "sphere": lambda: build_sphere(0.3),
    "lens": lambda: build_lens(3, 1, 0.3),
    "heisenberg": lambda: build_heisenberg(1, 0.11, 0.23),
}


def test_criterion_01_fell_axioms(criterion):
    details, ok = [], True
    for name, build in BUILDERS.items():
        model = build()
        start = time.perf_counter()
        res = {r.name: r.residual for r in axiom_checks(model, np.random.default_rng(1), 20, AXIOM_HBARS)}
        elapsed = time.perf_counter() - start
        worst = max(res["associativity"], res["anti_multiplicativity"])
        ok &= worst <= 1e-10 and elapsed <= 30.0
        details.append(f"{name} {worst:.1e} in {elapsed:.1f}s")
    assert criterion(1, ok, "; ".join(details))


def test_criterion_02_sphere_relations(criterion):
    from felldeform.models import sphere_fixed_generators

    worst = 0.0
    for theta in (0.0, 0.25, 0.3):
        _, _, rel = sphere_fixed_generators(build_sphere(theta))
        worst = max(worst, rel.worst())
    assert criterion(2, worst <= 1e-12, f"worst relation residual {worst:.1e} over theta in {{0, 0.25, 0.3}}")


def _torus_modes(geom):
    for k1 in range(-2, 3):
        for k2 in range(-2, 3):
            yield Fiber(GroupIndex([k1]), torus_mode(geom, k1, k2), geom), k2


def test_criterion_03_taylor_bound(criterion):
    worst_excess, worst_oracle, cases = -np.inf, 0.0, 0

    sphere = build_sphere(0.3)
    monos = [(monomial(sphere.geometry, *e), e[0] - e[1]) for e in monomial_exponents(2)]
    torus = build_torus(0.3)
    # theta_t moves phi by hbar t (sphere) and p2 by -hbar t (torus)
    modes = [(f, -k2) for f, k2 in _torus_modes(torus.geometry)]

    for model, fibers in ((sphere, monos), (torus, modes)):
        for f, _ in fibers:
            for g, a in fibers:
                res, bound = taylor_scan(f, g, HBARS_LOG, model.theta, model.calculus)
                t = f.grading[0]
                norm_fg = float(np.max(np.abs(f.samples * g.samples)))
                for h, r, b in zip(HBARS_LOG, res, bound):
                    exact = abs((np.exp(TWO_PI_I * h * t * a) - 1) / h - TWO_PI_I * t * a) * norm_fg
                    worst_oracle = max(worst_oracle, abs(r - exact))
                    worst_excess = max(worst_excess, r - b)
                    cases += 1
    ok = worst_excess <= 1e-9 and worst_oracle <= 1e-9
    assert criterion(3, ok, f"{cases} cases; max(residual - bound) {worst_excess:.1e}; "
                            f"oracle gap {worst_oracle:.1e}")


def _slope(scan):
    return log_log_slope(scan["hbar"], scan["residual_l1"])


def test_criterion_04_derivative_limit(criterion):
    m = build_sphere(0.3)
    W, Z = m.generator("W"), m.generator("Z")
    scan = derivative_limit_scan(W, Z, HBARS_LOG, m.theta, m.calculus)
    oracle = [abs((np.exp(TWO_PI_I * h) - 1) / h - TWO_PI_I) * 0.5 for h in scan["hbar"]]
    gap = max(abs(r - o) for r, o in zip(scan["residual_l1"], oracle))
    limit = scan["residual_over_hbar"][-1]
    assert scan["hbar"][-1] == pytest.approx(1e-4)

    rng = np.random.default_rng(4)
    pairs = [("sphere W,Z", m, W, Z),
             ("sphere Z,Z*", m, Z, m.star(Z, 0.0))]
    t = build_torus(0.3)
    pairs.append(("torus U,V", t, t.generator("U"), t.generator("V")))
    pairs.append(("torus random", t, t.random_element(rng), t.random_element(rng)))
    pairs.append(("sphere random", m, m.random_element(rng), m.random_element(rng)))
    h = build_heisenberg()
    pairs.append(("heisenberg B,A", h, h.generator("B"), h.generator("A")))
    slopes = {}
    for name, model, f, g in pairs:
        slopes[name] = _slope(derivative_limit_scan(f, g, HBARS_LOG, model.theta, model.calculus))
    worst_slope = max(abs(s - 1.0) for s in slopes.values())
    ok = abs(limit - math.pi ** 2) <= 1e-3 and gap <= 1e-9 and worst_slope <= tol.SLOPE_TOL
    assert criterion(4, ok, f"residual/hbar {limit:.7f} vs pi^2; oracle gap {gap:.1e}; "
                            f"slopes {min(slopes.values()):.4f}..{max(slopes.values()):.4f}")


def _monomial_bracket_oracle(geom, e1, e2):
    # d_x multiplies z^i zbar^j w^k wbar^l by 2 pi i (i - j + k - l), d_y by 2 pi i (i - j)
    t1, a1 = e1[0] - e1[1] + e1[2] - e1[3], e1[0] - e1[1]
    t2, a2 = e2[0] - e2[1] + e2[2] - e2[3], e2[0] - e2[1]
    prod = monomial(geom, *e1).samples * monomial(geom, *e2).samples
    return TWO_PI_I ** 2 * (t1 * a2 - a1 * t2) * prod


def test_criterion_05_poisson(criterion):
    m = build_sphere(0.3)
    exps = list(monomial_exponents(2))
    sphere_gap = 0.0
    for e1 in exps:
        for e2 in exps:
            f = GradedElement.single(monomial(m.geometry, *e1))
            g = GradedElement.single(monomial(m.geometry, *e2))
            pb = poisson_bracket(f, g, m.calculus)
            want = _monomial_bracket_oracle(m.geometry, e1, e2)
            got = pb.term(f.support[0] + g.support[0]).samples
            sphere_gap = max(sphere_gap, float(np.max(np.abs(got - want))))

    h = build_heisenberg(1, 0.11, 0.23)
    rng = np.random.default_rng(5)
    heis_gap = 0.0
    for kf, kg in ((1, 0), (0, 1), (1, 1), (1, -1)):
        f, g = random_theta(kf, 1, rng), random_theta(kg, 1, rng)
        fe = GradedElement.single(f.fiber(h.geometry))
        ge = GradedElement.single(g.fiber(h.geometry))
        pb = poisson_bracket(fe, ge, h.calculus).term([kf + kg]).samples
        heis_gap = max(heis_gap, float(np.max(np.abs(pb - heis_bracket_oracle(f, g, h)))))

    W, Z = m.generator("W"), m.generator("Z")
    s_sphere = _slope(commutator_limit_scan(W, Z, HBARS_LOG, m.theta, m.calculus))
    s_heis = _slope(commutator_limit_scan(h.generator("B"), h.generator("A"), HBARS_LOG, h.theta, h.calculus))
    ok = (sphere_gap <= tol.BRACKET and heis_gap <= tol.BRACKET
          and abs(s_sphere - 1) <= tol.SLOPE_TOL and abs(s_heis - 1) <= tol.SLOPE_TOL)
    assert criterion(5, ok, f"bracket gaps sphere {sphere_gap:.1e}, heisenberg {heis_gap:.1e}; "
                            f"commutator slopes {s_sphere:.4f}, {s_heis:.4f}")


def test_criterion_06_heisenberg_closed_forms(criterion):
    h = build_heisenberg(1, 0.11, 0.23)
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(10):
        f, g, k = random_theta(0, 1, rng), random_theta(1, 1, rng), random_theta(1, 1, rng)
        worst = max(worst, heis_closed_form_residuals(h, f, g, k).worst())
    assert criterion(6, worst <= 1e-10, f"worst of four product formulas over 10 triples {worst:.1e}")


def test_criterion_07_spectral_exactness(criterion):
    worst = {"decompose_reconstruct": 0.0, "projection_orthogonality": 0.0, "expectation_positivity": 0.0}
    for name, build in BUILDERS.items():
        model = build()
        rng = np.random.default_rng(7)
        for _ in range(3):
            for r in spectral_checks(model, rng):
                worst[r.name] = max(worst[r.name], r.residual)
    ok = all(v <= 1e-12 for v in worst.values())
    assert criterion(7, ok, "; ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def _field_scan(*args):
    buf = io.StringIO()
    cmd_field_scan(make_config(["field-scan", "--model", "sphere", "--theta", "0.3", *args]), buf)
    return read_csv(buf.getvalue())


def test_criterion_08_field_continuity(criterion):
    full = _field_scan()
    l1_const = len(set(full["l1_norm"])) == 1
    bracketed = all(lo <= l1 + tol.BRACKET for lo, l1 in zip(full["lower_bound"], full["l1_norm"]))

    single = _field_scan("--phi", "Z")
    lb = single["lower_bound"]
    lb_spread = max(lb) - min(lb)

    # the Rayleigh columns do not depend on the trial set, so one trial suffices here
    moduli = {}
    for n in (11, 21, 41):
        rep = _field_scan("--hbar-count", str(n), "--trials", "1")
        moduli[n] = [float(rep.metadata[f"modulus_xi_{i}"]) for i in range(2)]
    ratios = [moduli[b][i] / moduli[a][i] for a, b in ((11, 21), (21, 41)) for i in range(2)]
    halves = all(abs(r - 0.5) <= tol.HALVING_TOL * 0.5 for r in ratios)
    ok = l1_const and bracketed and lb_spread <= 1e-10 and halves
    assert criterion(8, ok, f"L1 constant {l1_const}; single-fiber lower bound spread {lb_spread:.1e}; "
                            f"halving ratios {', '.join(f'{r:.3f}' for r in ratios)}")


def test_criterion_09_lens_fixed_points(criterion):
    equiv = comm = 0.0
    covered = {}
    for p, q in ((3, 1), (5, 2)):
        model = build_lens(p, q, 0.3)
        res = {r.name: r.residual for r in lens_checks(model, np.random.default_rng(9), 3)}
        equiv = max(equiv, res["lens_product_equivariance"], res["lens_star_equivariance"])
        comm = max(comm, res["lens_projection_commutes"])
        rng = np.random.default_rng(9)
        covered[(p, q)] = sorted({t[0] for _ in range(3) for t in model.invariant_element(rng).support})
    # invariant elements must reach beyond B_0, or the equivariance check says little
    nontrivial = all(any(t != 0 for t in ts) for ts in covered.values())
    ok = equiv <= 1e-10 and comm <= 1e-12 and nontrivial
    assert criterion(9, ok, f"equivariance {equiv:.1e}; projection commutation {comm:.1e}; "
                            f"invariant gradings {covered}")


def test_criterion_10_goldens(criterion, tmp_path):
    same = []
    for name, args in load_cases():
        first, second = tmp_path / f"a_{name}", tmp_path / f"b_{name}"
        main([*args, "--out", str(first)])
        main([*args, "--out", str(second)])
        same.append(first.read_bytes() == second.read_bytes() == (GOLDEN / name).read_bytes())
    assert criterion(10, all(same), f"{sum(same)}/{len(same)} goldens byte-identical across reruns; "
                                    "suite runtime checked at session end")
