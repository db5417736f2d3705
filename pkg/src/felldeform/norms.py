"""Computable bounds on the norm of a graded element and hbar-scans of them.

Upper side: the L1 cross-section norm.  Lower side: Rayleigh quotients of
the left regular representation on the Hilbert module of sections, over a
deterministic trial set.  The true reduced norm sits between the two.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .deform import DeformingAction, GradedElement, deformed_product
from .fiber import Fiber, fiber_norm
from .grading import GroupIndex
from .parallel import ordered_map
from .report import ScanReport

TRIAL_SEED = 0xFE11
TRIAL_COUNT = 32


class ModuleVector(GradedElement):
    """A finitely supported section xi with xi(x) in B_x."""

    __slots__ = ()

    @classmethod
    def of(cls, a: GradedElement) -> "ModuleVector":
        return cls(list(a), a.geometry, a.d)


@dataclass(frozen=True)
class NormBracket:
    lower: float
    upper: float

    def __post_init__(self):
        if not 0.0 <= self.lower:
            raise ValueError(f"negative lower bound {self.lower}")
        if self.lower > self.upper + 1e-10:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def l1_norm(a: GradedElement) -> float:
    """sum_t ||a_t||."""
    return float(sum(fiber_norm(f) for f in a))


def module_inner_diag(xi: GradedElement, theta: DeformingAction, hbar: float) -> np.ndarray:
    """Samples of sum_x theta_{-x}(conj(xi(x)) xi(x)), an element of B_0."""
    acc = np.zeros(xi.geometry.shape, dtype=np.float64)
    for x, fx in xi.terms.items():
        sq = Fiber(x - x, np.abs(fx.samples) ** 2, fx.geometry)
        acc += theta(sq, -x, hbar).samples.real
    return acc


def module_norm(xi: GradedElement, theta: DeformingAction, hbar: float) -> float:
    """||xi||^2 = ||sum_x theta_{-x}(xi(x)^* xi(x))|| with the ambient star and product."""
    if not len(xi):
        return 0.0
    return float(np.sqrt(np.max(np.abs(module_inner_diag(xi, theta, hbar)))))


def required_window(phi: GradedElement, xi: GradedElement) -> int:
    k = 0
    for t in phi.terms:
        for s in xi.terms:
            k = max(k, (t + s).max_abs())
    return k


def regrep_apply(phi: GradedElement, xi: GradedElement, theta: DeformingAction, hbar: float,
                 window: int) -> ModuleVector:
    """(Lambda_phi xi)(y) = sum_x phi(x) theta_x(xi(y - x)) on the window [-K, K]^d."""
    need = required_window(phi, xi)
    if need > window:
        raise ValueError(f"window K={window} too small for these supports; need K >= {need}")
    return ModuleVector.of(deformed_product(phi, xi, theta, hbar))


def unit_section(geometry, d: int = 1) -> ModuleVector:
    one = Fiber(GroupIndex([0] * d), np.ones(geometry.shape, dtype=np.complex128), geometry)
    return ModuleVector([one], geometry, d)


def rayleigh(phi: GradedElement, xi: GradedElement, theta: DeformingAction, hbar: float) -> float:
    den = module_norm(xi, theta, hbar)
    if den == 0.0:
        return float("nan")
    out = regrep_apply(phi, xi, theta, hbar, required_window(phi, xi))
    return module_norm(out, theta, hbar) / den


def trial_sections(geometry, d: int, trials: int, seed: int,
                   sampler: Callable[[np.random.Generator], GradedElement] | None = None,
                   canonical: Iterable[GradedElement] = ()) -> list[ModuleVector]:
    """Unit section, any canonical sections, then ``trials`` seeded random sections.

    The random sections are drawn sequentially from one generator, so the set
    depends only on ``seed`` and ``trials``.
    """
    out = [unit_section(geometry, d)]
    out.extend(ModuleVector.of(c) for c in canonical)
    if sampler is not None:
        rng = np.random.default_rng(seed)
        out.extend(ModuleVector.of(sampler(rng)) for _ in range(trials))
    return out


def reduced_norm_lower_bound(phi: GradedElement, theta: DeformingAction, hbar: float,
                             trials: int = TRIAL_COUNT, seed: int = TRIAL_SEED,
                             sampler: Callable[[np.random.Generator], GradedElement] | None = None,
                             canonical: Iterable[GradedElement] = (),
                             sections: Sequence[GradedElement] | None = None) -> float:
    """max over trial sections of ||Lambda_phi xi|| / ||xi||; a lower bound for ||phi||_hbar."""
    if trials < 1:
        raise ValueError("need at least one trial vector")
    if sections is None:
        sections = trial_sections(phi.geometry, phi.d, trials, seed, sampler, canonical)
    ratios = [rayleigh(phi, xi, theta, hbar) for xi in sections]
    ratios = [r for r in ratios if not np.isnan(r)]
    if not ratios:
        raise ValueError("every trial section is null")
    return float(max(ratios))


def norm_bracket(phi: GradedElement, theta: DeformingAction, hbar: float, **kw) -> NormBracket:
    return NormBracket(reduced_norm_lower_bound(phi, theta, hbar, **kw), l1_norm(phi))


def continuity_modulus(column: Sequence[float]) -> float:
    """Largest successive difference along a column."""
    col = np.asarray(column, dtype=float)
    if col.size < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(col))))


def field_scan(phi: GradedElement, xis: Sequence[GradedElement], hbars: Sequence[float],
               theta: DeformingAction, window: int | None = None, trials: int = TRIAL_COUNT,
               seed: int = TRIAL_SEED,
               sampler: Callable[[np.random.Generator], GradedElement] | None = None,
               canonical: Iterable[GradedElement] = ()) -> ScanReport:
    """Per hbar: L1 norm, Rayleigh lower bound, and ||Lambda^hbar_phi xi_i|| for each xi_i.

    Rows keep the order of ``hbars``.  The metadata records the continuity
    modulus (largest successive difference) of each xi column.
    """
    hs = [float(h) for h in hbars]
    if not hs:
        raise ValueError("empty hbar grid")
    if window is None:
        window = max([required_window(phi, xi) for xi in xis], default=0)
    for xi in xis:
        need = required_window(phi, xi)
        if need > window:
            raise ValueError(f"window K={window} too small for these supports; need K >= {need}")
    sections = trial_sections(phi.geometry, phi.d, trials, seed, sampler, canonical)
    l1 = l1_norm(phi)

    def row(h):
        lower = reduced_norm_lower_bound(phi, theta, h, trials=max(trials, 1), sections=sections)
        cols = [module_norm(regrep_apply(phi, xi, theta, h, window), theta, h) for xi in xis]
        return lower, cols

    rows = ordered_map(row, hs)
    columns: dict[str, list[float]] = {
        "hbar": hs,
        "l1_norm": [l1] * len(hs),
        "lower_bound": [r[0] for r in rows],
    }
    for i in range(len(xis)):
        columns[f"rayleigh_xi_{i}"] = [r[1][i] for r in rows]
    meta = {f"modulus_xi_{i}": format(continuity_modulus(columns[f"rayleigh_xi_{i}"]), ".17g")
            for i in range(len(xis))}
    return ScanReport(columns, meta)
