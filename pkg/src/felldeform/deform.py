"""The theta-deformed product and involution on finite sums of fibers.

For a_t in B_t and b_s in B_s:

    a_t x b_s   = a_t theta_t(b_s)
    a_t^diamond = theta_t^{-1}(a_t^*)

extended bilinearly (resp. conjugate-linearly) to finite sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .fiber import Fiber, GridGeometry, fiber_norm, fiber_star, owned_fiber, zero_fiber
from .flows import Flow
from .grading import GroupIndex, as_index

ZERO_DROP = 1e-15


class GradedElement:
    """A finite sum sum_t b_t delta_t with b_t in B_t, all on one grid."""

    __slots__ = ("terms", "geometry", "d")

    def __init__(self, terms: Mapping | Iterable[Fiber], geometry: GridGeometry, d: int = 1):
        if isinstance(terms, Mapping):
            fibers = list(terms.values())
            for k, f in terms.items():
                if as_index(k) != f.grading:
                    raise ValueError(f"key {k} does not match fiber grading {f.grading}")
        else:
            fibers = list(terms)
        acc: dict[GroupIndex, np.ndarray] = {}
        for f in fibers:
            if f.geometry != geometry:
                raise ValueError("fiber lives on a different grid")
            if f.grading.d != d:
                raise ValueError(f"grading {f.grading} is not in Z^{d}")
            if f.grading in acc:
                acc[f.grading] = acc[f.grading] + f.samples
            else:
                acc[f.grading] = f.samples
        # arrays reaching here are either read-only fiber samples or fresh sums
        self.geometry = geometry
        self.d = d
        self.terms: dict[GroupIndex, Fiber] = {}
        for t in sorted(acc):
            s = acc[t]
            if s.size and np.max(np.abs(s)) >= ZERO_DROP:
                self.terms[t] = owned_fiber(t, s, geometry)

    @classmethod
    def single(cls, fiber: Fiber) -> "GradedElement":
        return cls([fiber], fiber.geometry, fiber.grading.d)

    @classmethod
    def zero(cls, geometry: GridGeometry, d: int = 1) -> "GradedElement":
        return cls([], geometry, d)

    @property
    def support(self) -> list[GroupIndex]:
        return list(self.terms)

    def term(self, t) -> Fiber:
        t = as_index(t)
        return self.terms.get(t) or zero_fiber(t, self.geometry)

    def __iter__(self):
        return iter(self.terms.values())

    def __len__(self):
        return len(self.terms)

    def _like(self, fibers) -> "GradedElement":
        return GradedElement(fibers, self.geometry, self.d)

    def __add__(self, other: "GradedElement") -> "GradedElement":
        return self._like([*self.terms.values(), *other.terms.values()])

    def __sub__(self, other: "GradedElement") -> "GradedElement":
        return self + (-other)

    def __neg__(self) -> "GradedElement":
        return self._like(-f for f in self.terms.values())

    def scale(self, c: complex) -> "GradedElement":
        return self._like(f.scaled(c) for f in self.terms.values())

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __repr__(self):
        parts = ", ".join(f"{tuple(t) if t.d > 1 else t[0]}: |{fiber_norm(f):.3g}|"
                          for t, f in self.terms.items())
        return f"GradedElement({{{parts}}})"


class DeformingAction:
    """The family theta^hbar of Z^d actions, theta^hbar_t = phi_(0, hbar t)."""

    def __init__(self, flow: Flow):
        self.flow = flow
        self.d = flow.d

    def __call__(self, fiber: Fiber, t, hbar: float) -> Fiber:
        t = as_index(t)
        if hbar == 0.0 or t.is_zero():
            return fiber
        u = np.concatenate([np.zeros(self.d), hbar * np.asarray(t, dtype=float)])
        return self.flow.apply(fiber, u)


def _check_pair(a: GradedElement, b: GradedElement):
    if a.geometry != b.geometry or a.d != b.d:
        raise ValueError("graded elements belong to different models")


def deformed_product(a: GradedElement, b: GradedElement, theta: DeformingAction,
                     hbar: float) -> GradedElement:
    """sum_{t,s} a_t theta^hbar_t(b_s), accumulated at t + s in sorted key order."""
    _check_pair(a, b)
    acc: dict[GroupIndex, np.ndarray] = {}
    for t, at in a.terms.items():
        for s, bs in b.terms.items():
            prod = at.samples * theta(bs, t, hbar).samples
            u = t + s
            acc[u] = acc[u] + prod if u in acc else prod
    return GradedElement([owned_fiber(u, acc[u], a.geometry) for u in sorted(acc)], a.geometry, a.d)


def ambient_product(a: GradedElement, b: GradedElement) -> GradedElement:
    """The undeformed (pointwise) product of finite sums."""
    _check_pair(a, b)
    acc: dict[GroupIndex, np.ndarray] = {}
    for t, at in a.terms.items():
        for s, bs in b.terms.items():
            u = t + s
            prod = at.samples * bs.samples
            acc[u] = acc[u] + prod if u in acc else prod
    return GradedElement([owned_fiber(u, acc[u], a.geometry) for u in sorted(acc)], a.geometry, a.d)


def deformed_star(a: GradedElement, theta: DeformingAction, hbar: float) -> GradedElement:
    """Termwise theta^hbar_{-t}(a_t^*), landing in B_{-t}."""
    return a._like(theta(fiber_star(at), -t, hbar) for t, at in a.terms.items())


def ambient_star(a: GradedElement) -> GradedElement:
    return a._like(fiber_star(at) for at in a.terms.values())


def l1_distance(a: GradedElement, b: GradedElement) -> float:
    _check_pair(a, b)
    keys = set(a.terms) | set(b.terms)
    return float(sum(np.max(np.abs(a.term(t).samples - b.term(t).samples)) for t in keys))


@dataclass(frozen=True)
class AxiomResiduals:
    associativity: float
    anti_multiplicativity: float
    cstar_identity: float
    submultiplicativity: float

    def worst(self) -> float:
        return max(self.associativity, self.anti_multiplicativity,
                   self.cstar_identity, self.submultiplicativity)


def axiom_residuals(a: GradedElement, b: GradedElement, c: GradedElement,
                    theta: DeformingAction, hbar: float) -> AxiomResiduals:
    """Fell-bundle axiom residuals of the deformed operations.

    ``cstar_identity`` compares ||theta_t(a_t^diamond x a_t)|| with ||a_t||^2
    for every fiber of a, b, c: theta is isometric, and pulling the product
    back keeps both sups on the same grid points (a grid sup is only
    translation invariant for aligned shifts).  ``submultiplicativity`` is the
    worst excess of ||a_t x b_s|| over ||a_t|| ||b_s||; off-grid translates can
    lift a grid sup slightly, so it is only exactly zero for aligned shifts.
    """
    _check_pair(a, b)
    _check_pair(b, c)
    prod = lambda x, y: deformed_product(x, y, theta, hbar)  # noqa: E731
    star = lambda x: deformed_star(x, theta, hbar)  # noqa: E731

    assoc = l1_distance(prod(prod(a, b), c), prod(a, prod(b, c)))
    anti = l1_distance(star(prod(a, b)), prod(star(b), star(a)))

    cstar = 0.0
    for elem in (a, b, c):
        for t, at in elem.terms.items():
            single = GradedElement.single(at)
            sq = prod(star(single), single).term(t - t)
            back = theta(sq, t, hbar)
            cstar = max(cstar, abs(fiber_norm(back) - fiber_norm(at) ** 2))

    sub = 0.0
    for t, at in a.terms.items():
        for s, bs in b.terms.items():
            p = at.samples * theta(bs, t, hbar).samples
            sub = max(sub, _sup(p) - fiber_norm(at) * fiber_norm(bs))
    return AxiomResiduals(assoc, anti, cstar, max(sub, 0.0))


class CommutingAction:
    """A fiberwise automorphism alpha (one group element of H) to be extended.

    ``apply`` maps a Fiber to a Fiber of the same grading.  The commutation
    with gauge and deforming actions is checked by ``validate`` before any
    extension is computed.
    """

    def __init__(self, apply: Callable[[Fiber], Fiber], name: str = "alpha"):
        self.apply = apply
        self.name = name
        self._validated: set = set()

    def __call__(self, fiber: Fiber) -> Fiber:
        return self.apply(fiber)

    def validate(self, probes: Iterable[Fiber], gauge, theta: DeformingAction,
                 hbars: Iterable[float] = (0.0, 0.1, 1 / 3, 0.7), tol: float = 1e-10,
                 gauge_points: Iterable = ()) -> float:
        worst = 0.0
        hbars = tuple(hbars)
        for f in probes:
            af = self.apply(f)
            if af.grading != f.grading:
                raise ValueError(f"{self.name} does not preserve the grading of {f.grading}")
            for x in gauge_points:
                worst = max(worst, _sup(gauge.apply(af, x).samples - self.apply(gauge.apply(f, x)).samples))
            for hbar in hbars:
                for n in (1, -1, 2):
                    t = as_index([n] + [0] * (f.grading.d - 1))
                    worst = max(worst, _sup(theta(af, t, hbar).samples - self.apply(theta(f, t, hbar)).samples))
        if worst > tol:
            raise ValueError(f"{self.name} does not commute with the gauge/deforming actions "
                             f"(residual {worst:.3e} > {tol:g})")
        self._validated.add(hbars)
        return worst

    @property
    def validated(self) -> bool:
        return bool(self._validated)


def _sup(arr: np.ndarray) -> float:
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def extend_action(alpha: CommutingAction, a: GradedElement, theta: DeformingAction | None = None,
                  hbar: float | None = None) -> GradedElement:
    """Apply alpha termwise; on finite sums this is the extension to the deformed algebra.

    ``theta``/``hbar`` are accepted for signature symmetry with the other
    operations; the action itself never depends on them.
    """
    if not alpha.validated:
        raise ValueError(f"{alpha.name} has not been validated against the model's actions")
    return a._like(alpha(f) for f in a.terms.values())


def support_sum(a: GradedElement, b: GradedElement) -> set[GroupIndex]:
    return {t + s for t in a.terms for s in b.terms}
