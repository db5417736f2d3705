"""Grid-sampled fibers B_t with the ambient (undeformed) operations.

A fiber is a complex array sampled on a uniform chart grid of the model's
base space.  Periodic axes support translations, done either as an exact
index roll (grid-aligned shifts) or by discrete Fourier interpolation.

Heisenberg-type fibers are quasi-periodic along one axis,
``g(x + L, y) = exp(-2 pi i K y) g(x, y)``; the weight ``K`` is derived from
the grading through ``GridGeometry.twist_rates`` and the phase is folded into
every translation and derivative along that axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .grading import GroupIndex, as_index

ALIGN_TOL = 1e-12


@dataclass(frozen=True)
class Axis:
    name: str
    n: int
    periodic: bool = True
    start: float = 0.0
    length: float = 1.0
    endpoint: bool = False  # non-periodic axes sample the closed interval

    def __post_init__(self):
        if not 2 <= self.n <= 1024:
            raise ValueError(f"axis {self.name!r}: sample count {self.n} out of range")
        if self.periodic:
            if self.n & (self.n - 1):
                raise ValueError(f"periodic axis {self.name!r} needs a power-of-two count, got {self.n}")
            if self.endpoint:
                raise ValueError("periodic axes cannot include the endpoint")

    @property
    def step(self) -> float:
        return self.length / (self.n - 1 if self.endpoint else self.n)

    def coords(self) -> np.ndarray:
        return self.start + np.arange(self.n) * self.step


@dataclass(frozen=True)
class GridGeometry:
    """Product grid of axes, plus the optional quasi-periodic twist.

    ``twist`` is ``(axis, phase_axis)``: crossing one period of ``axis``
    multiplies a weight-K fiber by ``exp(-2 pi i K y)`` with ``y`` the
    ``phase_axis`` coordinate.  ``twist_rates[j]`` converts grading
    coordinate ``t_j`` into the weight, ``K = sum_j twist_rates[j] t_j``.
    """

    axes: tuple[Axis, ...]
    twist: tuple[int, int] | None = None
    twist_rates: tuple[float, ...] = ()

    def __post_init__(self):
        if self.twist is not None:
            a, b = self.twist
            if not (self.axes[a].periodic and self.axes[b].periodic):
                raise ValueError("twisted axes must both be periodic")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.n for ax in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    def axis_index(self, key) -> int:
        if isinstance(key, (int, np.integer)):
            return int(key)
        for i, ax in enumerate(self.axes):
            if ax.name == key:
                return i
        raise KeyError(f"no axis named {key!r}")

    def mesh(self, key) -> np.ndarray:
        """Coordinates of one axis, shaped to broadcast against the grid."""
        i = self.axis_index(key)
        shape = [1] * self.ndim
        shape[i] = self.axes[i].n
        return self.axes[i].coords().reshape(shape)

    def meshes(self) -> list[np.ndarray]:
        return [self.mesh(i) for i in range(self.ndim)]

    def weight(self, grading: GroupIndex) -> float:
        if self.twist is None:
            return 0.0
        return float(sum(r * t for r, t in zip(self.twist_rates, grading)))


@dataclass(frozen=True, eq=False)
class Fiber:
    """One element b_t of B_t, sampled on ``geometry``."""

    grading: GroupIndex
    samples: np.ndarray
    geometry: GridGeometry = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "grading", as_index(self.grading))
        arr = np.asarray(self.samples, dtype=np.complex128)
        if arr.shape != self.geometry.shape:
            raise ValueError(f"samples shape {arr.shape} does not match grid {self.geometry.shape}")
        if arr.flags.writeable:
            arr = arr.copy() if arr is self.samples else arr
            arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    @property
    def twist(self) -> float:
        """Quasi-periodic weight K of this fiber (0 for ordinary functions)."""
        return self.geometry.weight(self.grading)

    def scaled(self, c: complex) -> "Fiber":
        return Fiber(self.grading, c * self.samples, self.geometry)

    def __add__(self, other: "Fiber") -> "Fiber":
        _same_slot(self, other)
        return Fiber(self.grading, self.samples + other.samples, self.geometry)

    def __sub__(self, other: "Fiber") -> "Fiber":
        _same_slot(self, other)
        return Fiber(self.grading, self.samples - other.samples, self.geometry)

    def __neg__(self) -> "Fiber":
        return Fiber(self.grading, -self.samples, self.geometry)


def owned_fiber(grading, samples: np.ndarray, geometry: GridGeometry) -> Fiber:
    """Wrap a freshly computed complex array without the defensive copy."""
    if samples.dtype == np.complex128 and samples.flags.writeable and samples.shape == geometry.shape:
        samples.flags.writeable = False
    return Fiber(grading, samples, geometry)


def _same_slot(a: Fiber, b: Fiber):
    if a.geometry != b.geometry:
        raise ValueError("fibers live on different grids")
    if a.grading != b.grading:
        raise ValueError(f"cannot add fibers of gradings {a.grading} and {b.grading}")


def zero_fiber(grading, geometry: GridGeometry) -> Fiber:
    return Fiber(as_index(grading), np.zeros(geometry.shape, dtype=np.complex128), geometry)


def fiber_multiply(a: Fiber, b: Fiber) -> Fiber:
    """Pointwise (ambient) product; lands in B_{t+s}."""
    if a.geometry != b.geometry:
        raise ValueError("fibers live on different grids")
    return owned_fiber(a.grading + b.grading, a.samples * b.samples, a.geometry)


def fiber_star(a: Fiber) -> Fiber:
    """Ambient involution: complex conjugation, grading negated."""
    return owned_fiber(-a.grading, np.conj(a.samples), a.geometry)


def fiber_norm(a: Fiber) -> float:
    """Grid sup-norm, the stand-in for the fiber C*-norm."""
    if a.samples.size == 0:
        return 0.0
    return float(np.max(np.abs(a.samples)))


# --- translations -----------------------------------------------------------


def _int_freqs(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, d=1.0 / n)


def _shape_along(vec: np.ndarray, axis: int, ndim: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = vec.size
    return vec.reshape(shape)


def _fourier_shift(arr: np.ndarray, axis: int, delta: float) -> np.ndarray:
    """Return arr(k + delta) along ``axis`` (delta in index units) by trigonometric interpolation."""
    n = arr.shape[axis]
    m = _int_freqs(n)
    mult = np.exp(2j * np.pi * m * (delta / n))
    # Nyquist mode: keep the real cosine interpolant so real data stays real
    mult[n // 2] = np.cos(np.pi * delta)
    spec = np.fft.fft(arr, axis=axis)
    spec *= _shape_along(mult, axis, arr.ndim)
    return np.fft.ifft(spec, axis=axis)


def _aligned(delta: float) -> int | None:
    r = round(delta)
    if abs(delta - r) < ALIGN_TOL:
        return int(r)
    return None


def _shift_periodic(arr: np.ndarray, axis: int, delta: float) -> np.ndarray:
    k = _aligned(delta)
    if k is not None:
        return np.roll(arr, -k, axis=axis)
    return _fourier_shift(arr, axis, delta)


def _twist_phase(geometry: GridGeometry, weight: float, x_offset) -> np.ndarray:
    """exp(-2 pi i K (x + x_offset) y / (Lx Ly)) on the grid, scaled to unit periods."""
    ax, ay = geometry.twist
    X = geometry.mesh(ax) - geometry.axes[ax].start
    Y = geometry.mesh(ay)
    Lx = geometry.axes[ax].length
    Ly = geometry.axes[ay].length
    return np.exp(-2j * np.pi * weight * ((X + x_offset) / Lx) * (Y / Ly))


def _shift_twisted(arr, geometry: GridGeometry, weight: float, delta: float) -> np.ndarray:
    """Shift along the quasi-periodic axis by ``delta`` index units."""
    ax, ay = geometry.twist
    n = geometry.axes[ax].n
    k = _aligned(delta)
    if k is not None:
        # exact permutation; rows that wrap pick up exp(-+2 pi i K y) per period
        out = np.roll(arr, -k, axis=ax)
        wraps = np.floor_divide(np.arange(n) + k, n)
        if np.any(wraps):
            Y = geometry.mesh(ay) / geometry.axes[ay].length
            w = _shape_along(wraps.astype(float), ax, arr.ndim)
            out = out * np.exp(-2j * np.pi * weight * w * Y)
        return out
    step = geometry.axes[ax].step
    periodic_part = arr / _twist_phase(geometry, weight, 0.0)
    shifted = _fourier_shift(periodic_part, ax, delta)
    return shifted * _twist_phase(geometry, weight, delta * step)


def translate_samples(samples: np.ndarray, geometry: GridGeometry, weight: float,
                      shifts: Mapping) -> np.ndarray:
    """Return samples of ``f(p + shift)`` on the grid; shifts in coordinate units."""
    out = samples
    items = sorted((geometry.axis_index(k), float(v)) for k, v in shifts.items())
    twisted = geometry.twist[0] if (geometry.twist is not None and weight != 0.0) else None
    # the quasi-periodic axis goes first: the other periodic shifts keep the twist intact
    items.sort(key=lambda kv: kv[0] != twisted)
    for i, s in items:
        if s == 0.0:
            continue
        ax = geometry.axes[i]
        if not ax.periodic:
            raise ValueError(f"translation leaves the chart along non-periodic axis {ax.name!r}")
        if i == twisted:
            out = _shift_twisted(out, geometry, weight, s / ax.step)
        else:
            # whole periods act trivially; reducing first keeps theta and theta + 1 identical
            out = _shift_periodic(out, i, (s % ax.length) / ax.step)
    return out


def pullback(a: Fiber, shifts: Mapping) -> Fiber:
    """Resample ``a`` at translated base points: ``(pullback a)(p) = a(p + shift)``.

    ``shifts`` maps axis name or index to an offset in coordinate units.  All
    model actions are translations of periodic chart axes, so this is the only
    point transformation needed.
    """
    out = translate_samples(a.samples, a.geometry, a.twist, shifts)
    if out is a.samples:
        return a
    return owned_fiber(a.grading, out, a.geometry)


def differentiate_samples(samples: np.ndarray, geometry: GridGeometry, weight: float,
                          axis, order: int = 1) -> np.ndarray:
    """Spectral partial derivative along a periodic (possibly twisted) axis."""
    i = geometry.axis_index(axis)
    ax = geometry.axes[i]
    if not ax.periodic:
        raise ValueError(f"cannot differentiate spectrally along non-periodic axis {ax.name!r}")
    twisted = geometry.twist is not None and weight != 0.0 and geometry.twist[0] == i
    if twisted and order != 1:
        out = samples
        for _ in range(order):
            out = differentiate_samples(out, geometry, weight, i, 1)
        return out
    phase = _twist_phase(geometry, weight, 0.0) if twisted else None
    arr = samples / phase if twisted else samples
    k = 2j * np.pi * _int_freqs(ax.n) / ax.length
    if order % 2:
        k[ax.n // 2] = 0.0
    spec = np.fft.fft(arr, axis=i) * _shape_along(k ** order, i, arr.ndim)
    out = np.fft.ifft(spec, axis=i)
    if not twisted:
        return out
    # d/dx [e^{-2 pi i K x y} p(x)] = e^{-2 pi i K x y} p'(x) - 2 pi i K y g
    ay = geometry.twist[1]
    Y = geometry.mesh(ay) / geometry.axes[ay].length
    return phase * out - (2j * np.pi * weight * Y / ax.length) * samples


def axis_derivative(a: Fiber, axis, order: int = 1) -> Fiber:
    return owned_fiber(a.grading, differentiate_samples(a.samples, a.geometry, a.twist, axis, order),
                       a.geometry)


def fibers_close(a: Fiber, b: Fiber) -> float:
    """Sup-norm distance of two fibers on the same grid."""
    if a.geometry != b.geometry:
        raise ValueError("fibers live on different grids")
    return float(np.max(np.abs(a.samples - b.samples))) if a.samples.size else 0.0

