"""Ready-made models: rotation algebra, 3-sphere, lens spaces, Heisenberg manifolds."""

from .base import ModelSpec
from .heisenberg import (HeisClosedForms, ThetaSum, ThetaTerm, build_heisenberg, canonical_theta,
                         heis_bracket_oracle, heis_closed_form_residuals, random_theta)
from .sphere import (LensModel, SphereRelations, build_lens, build_sphere, monomial,
                     monomial_exponents, sphere_coords, sphere_fixed_generators)
from .torus import build_torus

__all__ = [
    "ModelSpec", "LensModel", "SphereRelations", "HeisClosedForms", "ThetaSum", "ThetaTerm",
    "build_torus", "build_sphere", "build_lens", "build_heisenberg", "sphere_fixed_generators",
    "heis_closed_form_residuals", "heis_bracket_oracle", "random_theta", "canonical_theta",
    "monomial", "monomial_exponents", "sphere_coords", "build_model",
]


def build_model(name: str, grid: int | None = None, **params) -> ModelSpec:
    """Build a model by name from keyword parameters (unused ones are ignored).

    ``grid`` overrides the sample count of the periodic axes.
    """
    n = {} if grid is None else {"n": int(grid)}
    if name == "torus":
        return build_torus(params.get("theta", 0.0), **n)
    if name == "sphere":
        return build_sphere(params.get("theta", 0.0), **n)
    if name == "lens":
        return build_lens(params.get("p", 3), params.get("q", 1), params.get("theta", 0.0), **n)
    if name == "heisenberg":
        return build_heisenberg(params.get("c", 1), params.get("mu", 0.11), params.get("nu", 0.23), **n)
    raise ValueError(f"unknown model {name!r}")
