"""Derivatives of the R^{2d} flow, the Poisson bracket, and first-order limits.

The deformed algebra's norm is replaced throughout by the L1 cross-section
norm sum_t ||a_t||, which dominates every C*-norm, so the residuals reported
here are upper bounds for the quantities that must go to zero.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .deform import (DeformingAction, GradedElement, ambient_product, deformed_product)
from .fiber import Fiber, fiber_norm
from .flows import Flow
from .norms import l1_norm
from .parallel import ordered_map
from .report import ScanReport

TWO_PI_I = 2j * np.pi


class FlowCalculus:
    """d/dlambda of the one-parameter flows phi_(lambda e_j) at lambda = 0.

    Directions 0..d-1 are the gauge coordinates x_j, d..2d-1 the deforming
    coordinates y_j.  ``derivative`` uses the flow's analytic (spectral) rule;
    ``fd_derivative`` is the central difference with step ``fd_step``.
    """

    def __init__(self, flow: Flow, fd_step: float = 1e-4):
        self.flow = flow
        self.d = flow.d
        self.fd_step = float(fd_step)

    def _direction(self, j: int) -> int:
        if not 0 <= j < 2 * self.d:
            raise ValueError(f"direction {j} out of range for a {2 * self.d}-parameter flow")
        return j

    def derivative(self, fiber: Fiber, j: int) -> Fiber:
        return self.flow.derivative(fiber, self._direction(j))

    def fd_derivative(self, fiber: Fiber, j: int, step: float | None = None) -> Fiber:
        h = self.fd_step if step is None else float(step)
        e = np.zeros(2 * self.d)
        e[self._direction(j)] = h
        fwd = self.flow.apply(fiber, e).samples
        bwd = self.flow.apply(fiber, -e).samples
        return Fiber(fiber.grading, (fwd - bwd) / (2 * h), fiber.geometry)

    def dx(self, fiber: Fiber, j: int = 0) -> Fiber:
        return self.derivative(fiber, j)

    def dy(self, fiber: Fiber, j: int = 0) -> Fiber:
        return self.derivative(fiber, self.d + j)


def partial_derivative(a: GradedElement, direction: int, calculus: FlowCalculus) -> GradedElement:
    """Termwise d/du_j; every B_t is invariant, so gradings are preserved."""
    return a._like(calculus.derivative(f, direction) for f in a)


def poisson_bracket(f: GradedElement, g: GradedElement, calculus: FlowCalculus) -> GradedElement:
    """{f, g} = sum_j dx_j f dy_j g - dy_j f dx_j g with ambient products."""
    d = calculus.d
    out = GradedElement.zero(f.geometry, f.d)
    for j in range(d):
        dxf = partial_derivative(f, j, calculus)
        dyf = partial_derivative(f, d + j, calculus)
        dxg = partial_derivative(g, j, calculus)
        dyg = partial_derivative(g, d + j, calculus)
        out = out + ambient_product(dxf, dyg) - ambient_product(dyf, dxg)
    return out


def _second_y(g: Fiber, j: int, k: int, calculus: FlowCalculus) -> Fiber:
    return calculus.dy(calculus.dy(g, k), j)


def _weighted_second(g: Fiber, t, calculus: FlowCalculus) -> Fiber:
    """sum_{j,k} t_j t_k dy_j dy_k g."""
    acc = np.zeros(g.geometry.shape, dtype=np.complex128)
    for j, tj in enumerate(t):
        for k, tk in enumerate(t):
            if tj and tk:
                acc += tj * tk * _second_y(g, j, k, calculus).samples
    return Fiber(g.grading, acc, g.geometry)


def first_order_residual(f: GradedElement, g: GradedElement, hbar: float,
                         theta: DeformingAction, calculus: FlowCalculus) -> GradedElement:
    """(f x_hbar g - f g) / hbar - (1/2 pi i) sum_j dx_j f dy_j g."""
    if hbar == 0.0:
        raise ValueError("hbar = 0 divides by zero; use a limit scan instead")
    diff = deformed_product(f, g, theta, hbar) - ambient_product(f, g)
    lead = GradedElement.zero(f.geometry, f.d)
    for j in range(calculus.d):
        lead = lead + ambient_product(partial_derivative(f, j, calculus),
                                      partial_derivative(g, calculus.d + j, calculus))
    return diff.scale(1.0 / hbar) - lead.scale(1.0 / TWO_PI_I)


def taylor_residual_and_bound(f: Fiber, g: Fiber, hbar: float, theta: DeformingAction,
                              calculus: FlowCalculus) -> tuple[float, float]:
    """Residual of the first-order expansion of f x_hbar g, and its second-derivative bound.

    bound = |hbar| ||f|| ||sum_{j,k} t_j t_k dy_j dy_k g|| with t the grading of f.
    """
    res = first_order_residual(GradedElement.single(f), GradedElement.single(g), hbar, theta, calculus)
    t = f.grading
    residual = fiber_norm(res.term(t + g.grading))
    bound = abs(hbar) * fiber_norm(f) * fiber_norm(_weighted_second(g, t, calculus))
    return residual, bound


def taylor_scan(f: Fiber, g: Fiber, hbars: Sequence[float], theta: DeformingAction,
                calculus: FlowCalculus) -> tuple[list[float], list[float]]:
    """``taylor_residual_and_bound`` over many hbar, with the hbar-free parts computed once."""
    t = f.grading
    lead = np.zeros(f.geometry.shape, dtype=np.complex128)
    for j in range(calculus.d):
        lead += calculus.derivative(f, j).samples * calculus.derivative(g, calculus.d + j).samples
    lead /= TWO_PI_I
    fg = f.samples * g.samples
    second = fiber_norm(f) * fiber_norm(_weighted_second(g, t, calculus))
    residuals, bounds = [], []
    for h in hbars:
        if h == 0.0:
            raise ValueError("hbar = 0 divides by zero; use a limit scan instead")
        moved = f.samples * theta(g, t, h).samples
        residuals.append(float(np.max(np.abs((moved - fg) / h - lead))))
        bounds.append(abs(h) * second)
    return residuals, bounds


def lemma_bound(f: GradedElement, g: GradedElement, hbar: float, calculus: FlowCalculus) -> float:
    """|hbar| sum_{j,k} (sum_t |t_j t_k| ||f_t||) (sum_s ||dy_j dy_k g_s||)."""
    d = calculus.d
    total = 0.0
    for j in range(d):
        for k in range(d):
            a = sum(abs(t[j] * t[k]) * fiber_norm(ft) for t, ft in f.terms.items())
            if a == 0.0:
                continue
            b = sum(fiber_norm(_second_y(gs, j, k, calculus)) for gs in g)
            total += a * b
    return abs(hbar) * total


def default_hbar_grid(lo: float = 1e-4, hi: float = 1e-1, count: int = 25) -> np.ndarray:
    return np.logspace(np.log10(lo), np.log10(hi), count)


def _checked_grid(hbars: Sequence[float]) -> list[float]:
    hs = [float(h) for h in hbars]
    if not hs:
        raise ValueError("empty hbar grid")
    if any(h == 0.0 for h in hs):
        raise ValueError("hbar grid contains 0; the scans divide by hbar")
    return sorted(hs, reverse=True)


def derivative_limit_scan(f: GradedElement, g: GradedElement, hbars: Sequence[float],
                          theta: DeformingAction, calculus: FlowCalculus) -> ScanReport:
    """Rows (descending hbar) of the first-order residual and the summed Taylor bound."""
    hs = _checked_grid(hbars)

    def row(h):
        r = l1_norm(first_order_residual(f, g, h, theta, calculus))
        return r, lemma_bound(f, g, h, calculus)

    rows = ordered_map(row, hs)
    return ScanReport({
        "hbar": hs,
        "residual_l1": [r for r, _ in rows],
        "lemma_bound": [b for _, b in rows],
        "residual_over_hbar": [r / h for (r, _), h in zip(rows, hs)],
    })


def commutator_limit_scan(f: GradedElement, g: GradedElement, hbars: Sequence[float],
                          theta: DeformingAction, calculus: FlowCalculus) -> ScanReport:
    """Rows of ||(f x g - g x f - [f, g]) / hbar - (1/2 pi i){f, g}||_1."""
    hs = _checked_grid(hbars)
    comm = ambient_product(f, g) - ambient_product(g, f)
    bracket = poisson_bracket(f, g, calculus).scale(1.0 / TWO_PI_I)

    def row(h):
        defo = deformed_product(f, g, theta, h) - deformed_product(g, f, theta, h)
        return l1_norm((defo - comm).scale(1.0 / h) - bracket)

    res = ordered_map(row, hs)
    return ScanReport({
        "hbar": hs,
        "residual_l1": res,
        "residual_over_hbar": [r / h for r, h in zip(res, hs)],
    })


def log_log_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log slope needs positive data")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
