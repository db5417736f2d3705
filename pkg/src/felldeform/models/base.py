"""The common shape of a model: grid, gauge action, deforming action, generators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from ..calculus import FlowCalculus
from ..deform import DeformingAction, GradedElement, deformed_product, deformed_star
from ..fiber import Fiber, GridGeometry
from ..grading import GroupIndex, TorusPoint, as_index
from ..spectral import GaugeAction, decompose, reconstruct

DEFAULT_HBARS = (0.0, 0.1, 1 / 3, 0.7)


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """A worked example of deformation data, ready for computation.

    ``hbar`` is the model's standing deformation parameter (theta for the
    torus and sphere families, 1 for the Heisenberg family); every operation
    also accepts an explicit hbar.
    """

    name: str
    geometry: GridGeometry
    gauge: GaugeAction
    theta: DeformingAction
    calculus: FlowCalculus
    generators: Mapping[str, GradedElement]
    params: Mapping[str, float]
    hbar: float
    fiber_sampler: Callable[[GroupIndex, np.random.Generator], Fiber] = field(repr=False)
    canonical_fiber: Callable[[GroupIndex], Fiber] = field(repr=False)

    @property
    def d(self) -> int:
        return self.theta.d

    def _h(self, hbar):
        return self.hbar if hbar is None else float(hbar)

    def generator(self, name: str) -> GradedElement:
        try:
            return self.generators[name]
        except KeyError:
            known = ", ".join(sorted(self.generators))
            raise ValueError(f"unknown generator {name!r} for model {self.name} (known: {known})") from None

    def product(self, a: GradedElement, b: GradedElement, hbar: float | None = None) -> GradedElement:
        return deformed_product(a, b, self.theta, self._h(hbar))

    def star(self, a: GradedElement, hbar: float | None = None) -> GradedElement:
        return deformed_star(a, self.theta, self._h(hbar))

    def element(self, fibers: Iterable[Fiber]) -> GradedElement:
        return GradedElement(list(fibers), self.geometry, self.d)

    def single(self, fiber: Fiber) -> GradedElement:
        return GradedElement.single(fiber)

    def unit(self) -> GradedElement:
        one = np.ones(self.geometry.shape, dtype=np.complex128)
        return self.element([Fiber(GroupIndex([0] * self.d), one, self.geometry)])

    def constant(self, c: complex) -> GradedElement:
        return self.unit().scale(c)

    def random_fiber(self, t, rng: np.random.Generator) -> Fiber:
        return self.fiber_sampler(as_index(t), rng)

    def random_element(self, rng: np.random.Generator,
                       support: Sequence | None = None) -> GradedElement:
        """Sum of random band-limited fibers, one per grading in ``support``."""
        if support is None:
            support = [GroupIndex([k] + [0] * (self.d - 1)) for k in (-1, 0, 1)]
        return self.element(self.random_fiber(t, rng) for t in support)

    def canonical_element(self, t) -> GradedElement:
        return self.single(self.canonical_fiber(as_index(t)))

    def canonical_sections(self, k: int = 1) -> list[GradedElement]:
        """Canonical unit-norm single-term sections at gradings 1..k and -1..-k."""
        out = []
        for n in range(1, k + 1):
            for sign in (1, -1):
                out.append(self.canonical_element([sign * n] + [0] * (self.d - 1)))
        return out

    def ambient(self, a: GradedElement) -> np.ndarray:
        return reconstruct(a, self.gauge)

    def decompose(self, samples: np.ndarray, cutoff: int = 8) -> GradedElement:
        return decompose(samples, self.gauge, cutoff)

    def commuting_residual(self, rng: np.random.Generator, hbars: Sequence[float] = DEFAULT_HBARS,
                           gradings: Sequence[int] = (-1, 0, 1),
                           points: Sequence[float] = (0.25, 1 / 3, 0.7)) -> float:
        """max |gamma_x theta^hbar_n f - theta^hbar_n gamma_x f| over probe fibers."""
        worst = 0.0
        for k in gradings:
            f = self.random_fiber([k] + [0] * (self.d - 1), rng)
            for x in points:
                xp = TorusPoint([x] * self.d)
                for hbar in hbars:
                    for n in (1, -1, 2):
                        t = GroupIndex([n] + [0] * (self.d - 1))
                        lhs = self.gauge.apply(self.theta(f, t, hbar), xp)
                        rhs = self.theta(self.gauge.apply(f, xp), t, hbar)
                        worst = max(worst, float(np.max(np.abs(lhs.samples - rhs.samples))))
        return worst

    def describe(self) -> dict[str, object]:
        meta: dict[str, object] = {"model": self.name}
        meta.update(self.params)
        meta["grid"] = "x".join(str(n) for n in self.geometry.shape)
        return meta
