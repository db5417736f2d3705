"""Gauge action, spectral projections P_t and Fourier decomposition.

The Haar integral over T^d in P_t is replaced by the average over the
aligned lattice (Z/N_1) x ... x (Z/N_d).  For band-limited input the
integrand is a trigonometric polynomial in x, so the average is exact.
The average equals a mask on the discrete Fourier coefficients of the
gauge axes, which is how ``spectral_projection`` evaluates it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .deform import GradedElement
from .fiber import Fiber, GridGeometry, fiber_norm, translate_samples
from .flows import Flow
from .grading import GroupIndex, TorusPoint, as_index, pairing


def _identity_to_fiber(samples: np.ndarray, t: GroupIndex) -> np.ndarray:
    return samples


def _identity_to_ambient(fiber: Fiber) -> np.ndarray:
    return fiber.samples


@dataclass(frozen=True)
class GaugeAction:
    """gamma of T^d, acting on fibers through ``flow`` and on ambient samples by shifts.

    ``axes[j]`` lists the ambient axes that dual coordinate x_j translates by
    one full period per unit of x_j.  Every axis in ``axes[j]`` has the same
    sample count N_j, which fixes the aligned lattice.  ``to_fiber`` and
    ``to_ambient`` convert between ambient samples of a grading-t element and
    its fiber representation (identity unless fibers are reduced, as on the
    Heisenberg manifold).
    """

    flow: Flow
    ambient: GridGeometry
    axes: tuple[tuple[int, ...], ...]
    to_fiber: Callable = field(default=_identity_to_fiber, compare=False)
    to_ambient: Callable = field(default=_identity_to_ambient, compare=False)

    def __post_init__(self):
        for group in self.axes:
            ns = {self.ambient.axes[i].n for i in group}
            if len(ns) != 1:
                raise ValueError("gauge axes of one dual coordinate need equal sample counts")
            for i in group:
                if not self.ambient.axes[i].periodic:
                    raise ValueError("gauge axes must be periodic")

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def fiber_geometry(self) -> GridGeometry:
        return self.flow.geometry

    @property
    def lattice(self) -> tuple[int, ...]:
        return tuple(self.ambient.axes[g[0]].n for g in self.axes)

    def apply(self, fiber: Fiber, x) -> Fiber:
        """gamma_x on a fiber."""
        x = x if isinstance(x, TorusPoint) else TorusPoint(x)
        u = np.concatenate([np.asarray(x, dtype=float), np.zeros(self.d)])
        return self.flow.apply(fiber, u)

    def apply_ambient(self, samples: np.ndarray, x) -> np.ndarray:
        """gamma_x on ambient samples; an index roll when x lies on the lattice."""
        x = x if isinstance(x, TorusPoint) else TorusPoint(x)
        shifts: dict[int, float] = {}
        for xj, group in zip(x, self.axes):
            for i in group:
                shifts[i] = shifts.get(i, 0.0) + xj * self.ambient.axes[i].length
        return translate_samples(samples, self.ambient, 0.0, shifts)

    def _check_nyquist(self, t: GroupIndex):
        if t.d != self.d:
            raise ValueError(f"grading {t} has the wrong dimension for a T^{self.d} action")
        for tj, n in zip(t, self.lattice):
            if abs(tj) >= n // 2:
                raise ValueError(f"grading {tj} is beyond the Nyquist range |t| < {n // 2}")

    def _freq_sums(self) -> list[np.ndarray]:
        """For each dual coordinate, the gauge-frequency sum of every ambient Fourier mode."""
        out = []
        nd = self.ambient.ndim
        for group in self.axes:
            total = np.zeros([1] * nd, dtype=np.int64)
            for i in group:
                n = self.ambient.axes[i].n
                shape = [1] * nd
                shape[i] = n
                total = total + np.fft.fftfreq(n, d=1.0 / n).astype(np.int64).reshape(shape)
            out.append(total)
        return out


def _gauge_fft(samples: np.ndarray, gauge: GaugeAction) -> tuple[np.ndarray, tuple[int, ...]]:
    fft_axes = tuple(sorted({i for g in gauge.axes for i in g}))
    return np.fft.fftn(samples, axes=fft_axes), fft_axes


def _mask(gauge: GaugeAction, t: GroupIndex, sums) -> np.ndarray:
    m = True
    for tj, n, s in zip(t, gauge.lattice, sums):
        m = m & (np.mod(s - tj, n) == 0)
    return m


def spectral_projection(f: np.ndarray, t, gauge: GaugeAction) -> Fiber:
    """P_t(f) = average over the aligned lattice of <x,t>^{-1} gamma_x(f)."""
    t = as_index(t)
    gauge._check_nyquist(t)
    f = np.asarray(f, dtype=np.complex128)
    spec, axes = _gauge_fft(f, gauge)
    proj = np.fft.ifftn(np.where(_mask(gauge, t, gauge._freq_sums()), spec, 0.0), axes=axes)
    return Fiber(t, gauge.to_fiber(proj, t), gauge.fiber_geometry)


def lattice_average(f: np.ndarray, t, gauge: GaugeAction) -> np.ndarray:
    """The projection evaluated literally as a lattice sum of rolled copies (reference path)."""
    t = as_index(t)
    gauge._check_nyquist(t)
    f = np.asarray(f, dtype=np.complex128)
    acc = np.zeros_like(f)
    lattice = gauge.lattice
    for ks in itertools.product(*(range(n) for n in lattice)):
        x = TorusPoint(k / n for k, n in zip(ks, lattice))
        acc += np.conj(pairing(x, t)) * gauge.apply_ambient(f, x)
    return acc / float(np.prod(lattice))


def reconstruct(a: GradedElement, gauge: GaugeAction) -> np.ndarray:
    """Ambient samples of sum_t a_t."""
    out = np.zeros(gauge.ambient.shape, dtype=np.complex128)
    for fib in a:
        out = out + gauge.to_ambient(fib)
    return out


def _index_box(d: int, cutoff: int):
    for ks in itertools.product(range(-cutoff, cutoff + 1), repeat=d):
        yield GroupIndex(ks)


def decompose(f: np.ndarray, gauge: GaugeAction, cutoff: int = 8, rtol: float = 1e-13) -> GradedElement:
    """Terms P_t(f) for max|t_j| <= cutoff; projections at round-off level are dropped.

    ``rtol`` is relative to sup|f|: Fourier round-off leaves ~1e-16 noise in
    projections that vanish exactly.
    """
    f = np.asarray(f, dtype=np.complex128)
    for n in gauge.lattice:
        if cutoff >= n // 2:
            raise ValueError(f"cutoff {cutoff} is beyond the Nyquist range {n // 2 - 1}")
    spec, axes = _gauge_fft(f, gauge)
    sums = gauge._freq_sums()
    floor = rtol * max(1.0, float(np.max(np.abs(f))) if f.size else 0.0)
    fibers = []
    for t in _index_box(gauge.d, cutoff):
        proj = np.fft.ifftn(np.where(_mask(gauge, t, sums), spec, 0.0), axes=axes)
        fib = Fiber(t, gauge.to_fiber(proj, t), gauge.fiber_geometry)
        if fiber_norm(fib) > floor:
            fibers.append(fib)
    return GradedElement(fibers, gauge.fiber_geometry, gauge.d)


def conditional_expectation(f: np.ndarray, gauge: GaugeAction) -> Fiber:
    """P_e: projection onto the fixed-point fiber B_0."""
    return spectral_projection(f, [0] * gauge.d, gauge)


def schwartz_seminorm(a: GradedElement, h: Callable[[GroupIndex], complex]) -> float:
    """max over the support of |h(t)| ||a_t||."""
    best = 0.0
    for t, fib in a.terms.items():
        best = max(best, abs(h(t)) * fiber_norm(fib))
    return best


def gauge_eigen_residual(fiber: Fiber, gauge: GaugeAction, points: Sequence | None = None) -> float:
    """max_x sup|gamma_x(b) - <x,t> b| over lattice points (all of them by default)."""
    if points is None:
        lattice = gauge.lattice
        points = [TorusPoint(k / n for k, n in zip(ks, lattice))
                  for ks in itertools.product(*(range(n) for n in lattice))]
    worst = 0.0
    for x in points:
        diff = gauge.apply(fiber, x).samples - pairing(x, fiber.grading) * fiber.samples
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst
