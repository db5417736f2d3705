"""Quantum Heisenberg manifolds as deformations of C(M^c).

An element of weight K = c k is stored through its reduction
g(x, y) = f[x, y, 0], with f[x, y, z] = e^{2 pi i K z} g(x, y) and
g(x + 1, y) = e^{-2 pi i K y} g(x, y).  Test functions are theta sums

    g(x, y) = sum_m exp(-pi a (x + m - x0)^2) e^{2 pi i (r + m K) y} e^{2 pi i mx x},

which have this quasi-periodicity for any weight and closed-form
derivatives, so they double as oracles at off-grid points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..calculus import FlowCalculus
from ..deform import DeformingAction, GradedElement
from ..fiber import Axis, Fiber, GridGeometry
from ..flows import HeisenbergFlow
from ..grading import GroupIndex
from ..spectral import GaugeAction
from .base import ModelSpec

M_RANGE = np.arange(-8, 9)
NZ = 32


def heisenberg_geometry(c: int, n: int = 64) -> GridGeometry:
    return GridGeometry((Axis("x", n), Axis("y", n)), twist=(0, 1), twist_rates=(float(c),))


def ambient_geometry(c: int, n: int = 64, nz: int = NZ) -> GridGeometry:
    return GridGeometry((Axis("x", n), Axis("y", n), Axis("z", nz, length=1.0 / c)))


@dataclass(frozen=True)
class ThetaTerm:
    coef: complex
    a: float
    x0: float
    r: int
    mx: int = 0


@dataclass(frozen=True)
class ThetaSum:
    """A weight-K quasi-periodic function given by theta terms; evaluable anywhere."""

    k: int
    c: int
    terms: tuple[ThetaTerm, ...]

    @property
    def weight(self) -> float:
        return float(self.c * self.k)

    def _eval(self, X, Y, mode: str):
        K = self.weight
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        out = np.zeros(np.broadcast(X, Y).shape, dtype=np.complex128)
        for term in self.terms:
            for m in M_RANGE:
                u = X + m - term.x0
                val = np.exp(-math.pi * term.a * u * u) * np.exp(2j * math.pi * ((term.r + m * K) * Y + term.mx * X))
                if mode == "x":
                    val = val * (-2 * math.pi * term.a * u + 2j * math.pi * term.mx)
                elif mode == "y":
                    val = val * (2j * math.pi * (term.r + m * K))
                out += term.coef * val
        return out

    def __call__(self, X, Y):
        return self._eval(X, Y, "")

    def dx(self, X, Y):
        return self._eval(X, Y, "x")

    def dy(self, X, Y):
        return self._eval(X, Y, "y")

    def fiber(self, geometry: GridGeometry) -> Fiber:
        X, Y = geometry.meshes()
        return Fiber(GroupIndex([self.k]), self(X, Y), geometry)


def random_theta(k: int, c: int, rng: np.random.Generator, count: int = 2) -> ThetaSum:
    terms = []
    for _ in range(count):
        coef = (rng.standard_normal() + 1j * rng.standard_normal()) / math.sqrt(2 * count)
        terms.append(ThetaTerm(coef, a=float(rng.uniform(3.0, 6.0)), x0=float(rng.uniform()),
                               r=int(rng.integers(-2, 3)), mx=int(rng.integers(-1, 2))))
    return ThetaSum(k, c, tuple(terms))


def canonical_theta(k: int, c: int) -> ThetaSum:
    return ThetaSum(k, c, (ThetaTerm(1.0, a=4.0, x0=0.5, r=0),))


def build_heisenberg(c: int = 1, mu: float = 0.11, nu: float = 0.23, n: int = 64,
                     nz: int = NZ) -> ModelSpec:
    if int(c) != c or c < 1:
        raise ValueError(f"c must be a positive integer, got {c}")
    c = int(c)
    geom = heisenberg_geometry(c, n)
    amb = ambient_geometry(c, n, nz)
    flow = HeisenbergFlow(geom, c, mu, nu)
    Z = amb.mesh("z")

    def to_ambient(fiber: Fiber) -> np.ndarray:
        return np.exp(2j * np.pi * fiber.twist * Z) * fiber.samples[:, :, None]

    def to_fiber(samples: np.ndarray, t) -> np.ndarray:
        return samples[:, :, 0]

    gauge = GaugeAction(flow, amb, ((2,),), to_fiber=to_fiber, to_ambient=to_ambient)

    def sampler(t: GroupIndex, rng: np.random.Generator) -> Fiber:
        return random_theta(t[0], c, rng).fiber(geom)

    def canonical(t: GroupIndex) -> Fiber:
        f = canonical_theta(t[0], c).fiber(geom)
        return f.scaled(1.0 / float(np.max(np.abs(f.samples))))

    gens = {
        "A": GradedElement.single(canonical(GroupIndex([0]))),
        "B": GradedElement.single(canonical(GroupIndex([1]))),
        "C": GradedElement.single(ThetaSum(1, c, (ThetaTerm(1.0, 5.0, 0.2, 1, 1),)).fiber(geom)),
    }
    return ModelSpec(
        name="heisenberg", geometry=geom, gauge=gauge, theta=DeformingAction(flow),
        calculus=FlowCalculus(flow), generators=gens,
        params={"c": c, "mu": float(mu), "nu": float(nu)}, hbar=1.0,
        fiber_sampler=sampler, canonical_fiber=canonical,
    )


@dataclass(frozen=True)
class HeisClosedForms:
    """L1 residuals of the engine's products against the four closed forms."""

    ab: float        # a x b = f g
    ba: float        # b x a = g f(x + 2 mu, y + 2 nu)
    bstar_c: float   # b^d x c = conj g(x - 2 mu, y - 2 nu) h(x - 2 mu, y - 2 nu)
    b_cstar: float   # b x c^d = g conj h

    def worst(self) -> float:
        return max(self.ab, self.ba, self.bstar_c, self.b_cstar)


def _samples(model: ModelSpec, obj, X, Y, shift=(0.0, 0.0)):
    if isinstance(obj, ThetaSum):
        return obj(X + shift[0], Y + shift[1]), obj.k
    fib = obj if isinstance(obj, Fiber) else next(iter(obj))
    if shift == (0.0, 0.0):
        return fib.samples, fib.grading[0]
    from ..fiber import pullback

    return pullback(fib, {"x": shift[0], "y": shift[1]}).samples, fib.grading[0]


def _as_element(model: ModelSpec, obj) -> GradedElement:
    if isinstance(obj, ThetaSum):
        return GradedElement.single(obj.fiber(model.geometry))
    if isinstance(obj, Fiber):
        return GradedElement.single(obj)
    return obj


def heis_closed_form_residuals(model: ModelSpec, f, g, h, hbar: float | None = None) -> HeisClosedForms:
    """Compare a x b, b x a, b^d x c, b x c^d with their closed forms.

    ``f`` must have grading 0 and ``g``, ``h`` grading 1.  Each may be a
    ThetaSum (closed forms then use exact off-grid values) or a Fiber.
    """
    hb = model.hbar if hbar is None else float(hbar)
    mu, nu = model.params["mu"], model.params["nu"]
    X, Y = model.geometry.meshes()
    a, b, c = (_as_element(model, o) for o in (f, g, h))
    for name, el, want in (("f", a, 0), ("g", b, 1), ("h", c, 1)):
        if el.support != [GroupIndex([want])]:
            raise ValueError(f"{name} must be a single fiber of grading {want}, got {el.support}")
    fs, _ = _samples(model, f, X, Y)
    gs, _ = _samples(model, g, X, Y)
    hs, _ = _samples(model, h, X, Y)
    f_fwd, _ = _samples(model, f, X, Y, (2 * hb * mu, 2 * hb * nu))
    g_back, _ = _samples(model, g, X, Y, (-2 * hb * mu, -2 * hb * nu))
    h_back, _ = _samples(model, h, X, Y, (-2 * hb * mu, -2 * hb * nu))

    def res(el: GradedElement, t: int, want: np.ndarray) -> float:
        keys = set(el.terms) | {GroupIndex([t])}
        total = 0.0
        for key in keys:
            ref = want if key == GroupIndex([t]) else 0.0
            total += float(np.max(np.abs(el.term(key).samples - ref)))
        return total

    prod = lambda x, y: model.product(x, y, hb)  # noqa: E731
    star = lambda x: model.star(x, hb)  # noqa: E731
    return HeisClosedForms(
        ab=res(prod(a, b), 1, fs * gs),
        ba=res(prod(b, a), 1, gs * f_fwd),
        bstar_c=res(prod(star(b), c), 0, np.conj(g_back) * h_back),
        b_cstar=res(prod(b, star(c)), 0, gs * np.conj(hs)),
    )


def heis_bracket_oracle(f: ThetaSum, g: ThetaSum, model: ModelSpec) -> np.ndarray:
    """2 c^{-1} (d3 f (mu d1 + nu d2) g - (mu d1 + nu d2) f d3 g) on the reduced grid."""
    c, mu, nu = model.params["c"], model.params["mu"], model.params["nu"]
    X, Y = model.geometry.meshes()
    d3f = 2j * math.pi * f.weight
    d3g = 2j * math.pi * g.weight
    tang_g = mu * g.dx(X, Y) + nu * g.dy(X, Y)
    tang_f = mu * f.dx(X, Y) + nu * f.dy(X, Y)
    return (2.0 / c) * (d3f * f(X, Y) * tang_g - tang_f * d3g * g(X, Y))
