"""Actions of R^{2d} on fibers.

Coordinates on R^{2d} are ``(x_1..x_d, y_1..y_d)``: the first block is the
gauge direction (periodic, so it descends to T^d) and the second block is
the deforming direction, with ``theta^hbar_n = phi_(0, hbar n)``.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .fiber import Fiber, GridGeometry, axis_derivative, pullback, translate_samples


class Flow:
    """Base class. Subclasses implement ``apply`` and ``derivative``."""

    d: int
    geometry: GridGeometry

    def apply(self, fiber: Fiber, u: Sequence[float]) -> Fiber:
        raise NotImplementedError

    def derivative(self, fiber: Fiber, j: int) -> Fiber:
        """d/dlambda phi_(lambda e_j)(fiber) at lambda = 0."""
        raise NotImplementedError

    def _check(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (2 * self.d,):
            raise ValueError(f"flow parameter must have {2 * self.d} entries, got {u.shape}")
        return u


class TranslationFlow(Flow):
    """phi_u translates periodic chart axes: axis a moves by sum_j u_j * directions[j][a]."""

    def __init__(self, geometry: GridGeometry, directions: Sequence[Mapping[str, float]]):
        if len(directions) % 2:
            raise ValueError("need 2d flow directions")
        self.geometry = geometry
        self.d = len(directions) // 2
        self.directions = [
            {geometry.axis_index(k): float(v) for k, v in dirn.items()} for dirn in directions
        ]
        for dirn in self.directions:
            for i in dirn:
                if not geometry.axes[i].periodic:
                    raise ValueError(f"flow moves non-periodic axis {geometry.axes[i].name!r}")

    def shifts(self, u) -> dict[int, float]:
        u = self._check(u)
        out: dict[int, float] = {}
        for uj, dirn in zip(u, self.directions):
            if uj == 0.0:
                continue
            for i, coef in dirn.items():
                out[i] = out.get(i, 0.0) + uj * coef
        return out

    def apply(self, fiber: Fiber, u) -> Fiber:
        return pullback(fiber, self.shifts(u))

    def derivative(self, fiber: Fiber, j: int) -> Fiber:
        total = np.zeros(fiber.geometry.shape, dtype=np.complex128)
        for i, coef in self.directions[j].items():
            total += coef * axis_derivative(fiber, i).samples
        return Fiber(fiber.grading, total, fiber.geometry)


class HeisenbergFlow(Flow):
    """The R^2 action on the Heisenberg manifold, written on reduced fibers.

    A weight-K element is stored as ``g(x, y) = f[x, y, 0]`` with
    ``f[x, y, z] = exp(2 pi i K z) g(x, y)`` and ``K = c k``.  The action

        phi_(a,b)[x, y, z] = [x + 2 b mu, y + 2 b nu, z + 2 b nu x + 2 b^2 mu nu + a / c]

    pulls back to

        g'(x, y) = exp(2 pi i K (a / c + 2 b nu x + 2 b^2 mu nu)) g(x + 2 b mu, y + 2 b nu).
    """

    d = 1

    def __init__(self, geometry: GridGeometry, c: int, mu: float, nu: float):
        if geometry.twist is None:
            raise ValueError("Heisenberg fibers need a twisted grid")
        self.geometry = geometry
        self.c = c
        self.mu = float(mu)
        self.nu = float(nu)
        self._xaxis, self._yaxis = geometry.twist

    def apply(self, fiber: Fiber, u) -> Fiber:
        a, b = self._check(u)
        if a == 0.0 and b == 0.0:
            return fiber
        K = fiber.twist
        shifts = {self._xaxis: 2 * b * self.mu, self._yaxis: 2 * b * self.nu}
        moved = translate_samples(fiber.samples, fiber.geometry, K, shifts)
        X = fiber.geometry.mesh(self._xaxis)
        phase = np.exp(2j * np.pi * K * (a / self.c + 2 * b * self.nu * X + 2 * b * b * self.mu * self.nu))
        return Fiber(fiber.grading, phase * moved, fiber.geometry)

    def derivative(self, fiber: Fiber, j: int) -> Fiber:
        K = fiber.twist
        if j == 0:
            return fiber.scaled(2j * np.pi * K / self.c)
        if j != 1:
            raise IndexError(j)
        gx = axis_derivative(fiber, self._xaxis).samples
        gy = axis_derivative(fiber, self._yaxis).samples
        X = fiber.geometry.mesh(self._xaxis)
        out = 2 * self.mu * gx + 2 * self.nu * gy + (4j * np.pi * K * self.nu) * X * fiber.samples
        return Fiber(fiber.grading, out, fiber.geometry)
