"""The theta-deformed 3-sphere and the quantum lens spaces.

Chart (alpha, phi, psi) with z = cos(alpha) e^{2 pi i phi},
w = sin(alpha) e^{2 pi i psi}.  gamma_x shifts phi and psi together,
theta_n shifts phi alone, so theta_n(z, w) = (e^{2 pi i n hbar} z, w).
alpha is never moved, so its coordinate degeneracies are harmless.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..calculus import FlowCalculus
from ..deform import DeformingAction, GradedElement
from ..fiber import Axis, Fiber, GridGeometry, translate_samples
from ..flows import TranslationFlow
from ..grading import GroupIndex
from ..spectral import GaugeAction
from .base import ModelSpec

MAX_DEGREE = 3


def sphere_geometry(n_alpha: int = 17, n: int = 64) -> GridGeometry:
    return GridGeometry((
        Axis("alpha", n_alpha, periodic=False, length=math.pi / 2, endpoint=True),
        Axis("phi", n),
        Axis("psi", n),
    ))


def sphere_coords(geometry: GridGeometry) -> tuple[np.ndarray, np.ndarray]:
    A, P, S = geometry.meshes()
    z = np.cos(A) * np.exp(2j * np.pi * P)
    w = np.sin(A) * np.exp(2j * np.pi * S)
    return z, w


def monomial(geometry: GridGeometry, i: int, j: int, k: int, l: int) -> Fiber:
    """z^i zbar^j w^k wbar^l, a fiber of grading i - j + k - l."""
    z, w = sphere_coords(geometry)
    samples = z ** i * np.conj(z) ** j * w ** k * np.conj(w) ** l
    samples = np.broadcast_to(samples, geometry.shape)
    return Fiber(GroupIndex([i - j + k - l]), samples, geometry)


def monomial_exponents(max_degree: int):
    for e in itertools.product(range(max_degree + 1), repeat=4):
        if sum(e) <= max_degree:
            yield e


def _canonical(geometry: GridGeometry, t: GroupIndex) -> Fiber:
    n = t[0]
    return monomial(geometry, n, 0, 0, 0) if n >= 0 else monomial(geometry, 0, -n, 0, 0)


def _sphere_parts(theta: float, n_alpha: int, n: int):
    geom = sphere_geometry(n_alpha, n)
    flow = TranslationFlow(geom, [{"phi": 1.0, "psi": 1.0}, {"phi": 1.0}])
    gauge = GaugeAction(flow, geom, ((1, 2),))
    by_grading: dict[int, list] = {}
    for e in monomial_exponents(MAX_DEGREE):
        by_grading.setdefault(e[0] - e[1] + e[2] - e[3], []).append(e)

    def sampler(t: GroupIndex, rng: np.random.Generator) -> Fiber:
        choices = by_grading.get(t[0])
        if not choices:
            raise ValueError(f"no degree-{MAX_DEGREE} monomials of grading {t[0]}")
        picks = rng.choice(len(choices), size=min(3, len(choices)), replace=False)
        acc = np.zeros(geom.shape, dtype=np.complex128)
        for p in picks:
            c = (rng.standard_normal() + 1j * rng.standard_normal()) / math.sqrt(2 * len(picks))
            acc += c * monomial(geom, *choices[p]).samples
        return Fiber(t, acc, geom)

    gens = {
        "Z": GradedElement.single(monomial(geom, 1, 0, 0, 0)),
        "W": GradedElement.single(monomial(geom, 0, 0, 1, 0)),
    }
    return dict(
        geometry=geom, gauge=gauge, theta=DeformingAction(flow), calculus=FlowCalculus(flow),
        generators=gens, hbar=float(theta), fiber_sampler=sampler,
        canonical_fiber=lambda t: _canonical(geom, t),
    )


def build_sphere(theta: float, n_alpha: int = 17, n: int = 64) -> ModelSpec:
    return ModelSpec(name="sphere", params={"theta": float(theta)}, **_sphere_parts(theta, n_alpha, n))


@dataclass(frozen=True)
class SphereRelations:
    """L1 residuals of the sphere's defining relations and of the fixed-point relations."""

    commutation: float          # W x Z - e^{2 pi i theta} Z x W
    normality_z: float          # Z^d x Z - Z x Z^d
    normality_w: float
    unit_sum: float             # Z^d x Z + W^d x W - 1
    h_selfadjoint: float        # H^d - H
    m_normal: float             # M^d x M - M x M^d
    mh_commute: float           # M x H - H x M
    sphere_equation: float      # M^d x M + H x H - H
    base_point: float           # (H, M) against (w wbar, w zbar)

    def as_dict(self) -> dict[str, float]:
        return dict(self.__dict__)

    def worst(self) -> float:
        return max(self.__dict__.values())


def _l1(a: GradedElement) -> float:
    return float(sum(np.max(np.abs(f.samples)) for f in a))


def sphere_fixed_generators(model: ModelSpec, hbar: float | None = None):
    """H = W^d x W and M = W x Z^d, both in B_0, plus the relation residuals."""
    h = model.hbar if hbar is None else hbar
    Z, W = model.generator("Z"), model.generator("W")
    prod = lambda a, b: model.product(a, b, h)  # noqa: E731
    star = lambda a: model.star(a, h)  # noqa: E731
    H = prod(star(W), W)
    M = prod(W, star(Z))
    one = model.unit()
    phase = np.exp(2j * np.pi * h)

    z, w = sphere_coords(model.geometry)
    base = max(float(np.max(np.abs(H.term([0]).samples - w * np.conj(w)))),
               float(np.max(np.abs(M.term([0]).samples - w * np.conj(z)))))
    rel = SphereRelations(
        commutation=_l1(prod(W, Z) - prod(Z, W).scale(phase)),
        normality_z=_l1(prod(star(Z), Z) - prod(Z, star(Z))),
        normality_w=_l1(prod(star(W), W) - prod(W, star(W))),
        unit_sum=_l1(prod(star(Z), Z) + prod(star(W), W) - one),
        h_selfadjoint=_l1(star(H) - H),
        m_normal=_l1(prod(star(M), M) - prod(M, star(M))),
        mh_commute=_l1(prod(M, H) - prod(H, M)),
        sphere_equation=_l1(prod(star(M), M) + prod(H, H) - H),
        base_point=base,
    )
    return H, M, rel


@dataclass(frozen=True, eq=False)
class LensModel(ModelSpec):
    """The sphere model plus tau(z, w) = (rho z, rho^q w), rho = e^{2 pi i / p}."""

    p: int = 1
    q: int = 0

    def tau_shifts(self, k: int) -> dict[str, float]:
        return {"phi": (k / self.p) % 1.0, "psi": (k * self.q / self.p) % 1.0}

    def tau_samples(self, samples: np.ndarray, k: int = 1) -> np.ndarray:
        return translate_samples(samples, self.geometry, 0.0, self.tau_shifts(k))

    def tau(self, a: GradedElement, k: int = 1) -> GradedElement:
        return a._like(Fiber(f.grading, self.tau_samples(f.samples, k), f.geometry) for f in a)

    def average_samples(self, samples: np.ndarray) -> np.ndarray:
        p = abs(self.p)
        return sum(self.tau_samples(samples, k) for k in range(p)) / p

    def average(self, a: GradedElement) -> GradedElement:
        """Pi_tau = (1/|p|) sum_k tau^k, termwise."""
        return a._like(Fiber(f.grading, self.average_samples(f.samples), f.geometry) for f in a)

    def invariant_element(self, rng: np.random.Generator) -> GradedElement:
        # for q = 1 the invariant gradings are multiples of p, so reach out to |t| = 3
        return self.average(self.random_element(rng, support=[[k] for k in range(-MAX_DEGREE, MAX_DEGREE + 1)]))


def build_lens(p: int, q: int, theta: float, n_alpha: int = 17, n: int = 64) -> LensModel:
    p, q = int(p), int(q)
    if p == 0:
        raise ValueError("lens space needs p != 0")
    if math.gcd(p, q) != 1:
        raise ValueError(f"lens space needs gcd(p, q) = 1, got p={p}, q={q}")
    return LensModel(name="lens", params={"p": p, "q": q, "theta": float(theta)},
                     p=p, q=q, **_sphere_parts(theta, n_alpha, n))

