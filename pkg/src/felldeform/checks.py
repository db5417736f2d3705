"""Named residual checks per model; the body of ``felldeform verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import tolerances as tol
from .calculus import poisson_bracket
from .deform import GradedElement, axiom_residuals
from .fiber import fiber_norm
from .models import (LensModel, ModelSpec, heis_bracket_oracle, heis_closed_form_residuals,
                     random_theta, sphere_fixed_generators)
from .spectral import conditional_expectation, reconstruct, spectral_projection

AXIOM_HBARS = (0.0, 0.1, 0.3, 1 / math.sqrt(2))


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


def l1(a: GradedElement) -> float:
    return float(sum(fiber_norm(f) for f in a))


def axiom_checks(model: ModelSpec, rng: np.random.Generator, triples: int,
                 hbars=AXIOM_HBARS) -> list[CheckResult]:
    assoc = anti = cstar = 0.0
    for _ in range(triples):
        a, b, c = (model.random_element(rng) for _ in range(3))
        for h in hbars:
            r = axiom_residuals(a, b, c, model.theta, h)
            assoc = max(assoc, r.associativity)
            anti = max(anti, r.anti_multiplicativity)
            cstar = max(cstar, r.cstar_identity)
    return [
        CheckResult("associativity", assoc, tol.INTERPOLATION),
        CheckResult("anti_multiplicativity", anti, tol.INTERPOLATION),
        CheckResult("cstar_identity", cstar, tol.INTERPOLATION),
    ]


def spectral_checks(model: ModelSpec, rng: np.random.Generator, cutoff: int = 4) -> list[CheckResult]:
    a = model.random_element(rng, support=[[k] for k in (-2, -1, 0, 1, 2)])
    f = reconstruct(a, model.gauge)
    back = model.decompose(f, cutoff)
    recon = float(np.max(np.abs(reconstruct(back, model.gauge) - f)))
    ortho = 0.0
    for t in range(-cutoff, cutoff + 1):
        pt = model.gauge.to_ambient(spectral_projection(f, [t], model.gauge))
        for s in range(-cutoff, cutoff + 1):
            ps = spectral_projection(pt, [s], model.gauge).samples
            ref = model.gauge.to_fiber(pt, [s]) if s == t else 0.0
            ortho = max(ortho, float(np.max(np.abs(ps - ref))))
    pe = conditional_expectation(np.conj(f) * f, model.gauge).samples
    margin = min(float(np.min(pe.real)), 0.0) - float(np.max(np.abs(pe.imag)))
    return [
        CheckResult("decompose_reconstruct", recon, tol.EXACT_PHASE),
        CheckResult("projection_orthogonality", ortho, tol.EXACT_PHASE),
        CheckResult("expectation_positivity", -margin, tol.EXACT_PHASE),
    ]


def torus_checks(model: ModelSpec) -> list[CheckResult]:
    U, V = model.generator("U"), model.generator("V")
    h = model.hbar
    VU, UV = model.product(V, U), model.product(U, V)
    phase = np.exp(2j * np.pi * h)
    sq = model.product(VU, VU) - model.product(UV, UV).scale(phase ** 2)
    return [
        CheckResult("torus_commutation", l1(VU - UV.scale(phase)), tol.EXACT_PHASE),
        CheckResult("torus_square_phase", l1(sq), tol.EXACT_PHASE),
    ]


def sphere_checks(model: ModelSpec) -> list[CheckResult]:
    _, _, rel = sphere_fixed_generators(model)
    out = [CheckResult(f"sphere_{k}", v, tol.EXACT_PHASE) for k, v in rel.as_dict().items()]
    Z, W = model.generator("Z"), model.generator("W")
    bracket = poisson_bracket(W, Z, model.calculus)
    want = model.product(W, Z, 0.0).scale((2j * np.pi) ** 2)
    out.append(CheckResult("sphere_bracket", l1(bracket - want), tol.BRACKET))
    return out


def lens_checks(model: LensModel, rng: np.random.Generator, trials: int = 2) -> list[CheckResult]:
    idem = equiv = star = comm = 0.0
    for _ in range(trials):
        x = model.random_element(rng)
        px = model.average(x)
        idem = max(idem, l1(model.average(px) - px))
        a, b = model.invariant_element(rng), model.invariant_element(rng)
        equiv = max(equiv, l1(model.average(model.product(a, b)) - model.product(a, b)),
                    l1(model.average(model.product(a, b)) - model.product(model.average(a), model.average(b))))
        star = max(star, l1(model.average(model.star(a)) - model.star(model.average(a))))
        f = reconstruct(x, model.gauge)
        for t in range(-2, 3):
            lhs = model.average_samples(spectral_projection(f, [t], model.gauge).samples)
            rhs = spectral_projection(model.average_samples(f), [t], model.gauge).samples
            comm = max(comm, float(np.max(np.abs(lhs - rhs))))
    return [
        CheckResult("lens_idempotent", idem, tol.EXACT_PHASE),
        CheckResult("lens_product_equivariance", equiv, tol.INTERPOLATION),
        CheckResult("lens_star_equivariance", star, tol.INTERPOLATION),
        CheckResult("lens_projection_commutes", comm, tol.EXACT_PHASE),
    ]


def heisenberg_checks(model: ModelSpec, rng: np.random.Generator, trials: int = 3) -> list[CheckResult]:
    c = model.params["c"]
    worst = 0.0
    for _ in range(trials):
        f, g, h = random_theta(0, c, rng), random_theta(1, c, rng), random_theta(1, c, rng)
        worst = max(worst, heis_closed_form_residuals(model, f, g, h).worst())
    f, g = random_theta(1, c, rng), random_theta(0, c, rng)
    fe = GradedElement.single(f.fiber(model.geometry))
    ge = GradedElement.single(g.fiber(model.geometry))
    pb = poisson_bracket(fe, ge, model.calculus)
    bracket = float(np.max(np.abs(pb.term([1]).samples - heis_bracket_oracle(f, g, model))))
    # group law: theta^hbar applied twice equals theta^{2 hbar}
    x = model.random_fiber([1], rng)
    twice = model.theta(model.theta(x, [1], 0.37), [1], 0.37)
    once = model.theta(x, [1], 0.74)
    return [
        CheckResult("heisenberg_closed_forms", worst, tol.INTERPOLATION),
        CheckResult("heisenberg_bracket", bracket, tol.BRACKET),
        CheckResult("heisenberg_group_law", float(np.max(np.abs(twice.samples - once.samples))),
                    tol.INTERPOLATION),
    ]


def run_checks(model: ModelSpec, seed: int = 0, triples: int = 3) -> list[CheckResult]:
    """The invariant suite for ``model``: shared checks, then model-specific ones."""
    rng = np.random.default_rng(seed)
    out = [CheckResult("actions_commute", model.commuting_residual(rng), tol.INTERPOLATION)]
    out += axiom_checks(model, rng, triples)
    out += spectral_checks(model, rng)
    if model.name == "torus":
        out += torus_checks(model)
    elif model.name in ("sphere", "lens"):
        out += sphere_checks(model)
        if isinstance(model, LensModel):
            out += lens_checks(model, rng)
    elif model.name == "heisenberg":
        out += heisenberg_checks(model, rng)
    return out
