"""The rotation algebra as a deformation of C(T^2).

gamma rotates the first circle, theta^hbar_n rotates the second by -n hbar.
With U = e^{2 pi i p1} in B_1 and V = e^{2 pi i p2} in B_0 this gives
V x U = e^{2 pi i hbar} U x V.
"""

from __future__ import annotations

import numpy as np

from ..calculus import FlowCalculus
from ..deform import DeformingAction, GradedElement
from ..fiber import Axis, Fiber, GridGeometry
from ..flows import TranslationFlow
from ..grading import GroupIndex
from ..spectral import GaugeAction
from .base import ModelSpec

BAND = 3


def torus_geometry(n: int = 64) -> GridGeometry:
    return GridGeometry((Axis("p1", n), Axis("p2", n)))


def torus_mode(geometry: GridGeometry, k1: int, k2: int) -> np.ndarray:
    P1, P2 = geometry.meshes()
    return np.exp(2j * np.pi * (k1 * P1 + k2 * P2))


def build_torus(theta: float, n: int = 64) -> ModelSpec:
    geom = torus_geometry(n)
    flow = TranslationFlow(geom, [{"p1": 1.0}, {"p2": -1.0}])
    gauge = GaugeAction(flow, geom, ((0,),))

    def sampler(t: GroupIndex, rng: np.random.Generator) -> Fiber:
        coef = (rng.standard_normal(2 * BAND + 1) + 1j * rng.standard_normal(2 * BAND + 1)) / np.sqrt(4 * BAND + 2)
        samples = sum(c * torus_mode(geom, t[0], m) for c, m in zip(coef, range(-BAND, BAND + 1)))
        return Fiber(t, samples, geom)

    def canonical(t: GroupIndex) -> Fiber:
        return Fiber(t, torus_mode(geom, t[0], 0), geom)

    U = GradedElement.single(Fiber(GroupIndex([1]), torus_mode(geom, 1, 0), geom))
    V = GradedElement.single(Fiber(GroupIndex([0]), torus_mode(geom, 0, 1), geom))
    return ModelSpec(
        name="torus", geometry=geom, gauge=gauge, theta=DeformingAction(flow),
        calculus=FlowCalculus(flow), generators={"U": U, "V": V},
        params={"theta": float(theta)}, hbar=float(theta),
        fiber_sampler=sampler, canonical_fiber=canonical,
    )
