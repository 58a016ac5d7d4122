"""Uniform 1-D grid and sampled material coefficients for the beam.

The beam occupies [0, length]. Displacement and temperature carry
homogeneous Dirichlet data, so only interior nodes are unknowns; the
rigidity coefficient is needed at every node because the bending
operator touches the boundary through the clamped-end ghost closure.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import CoefficientPositivityError, InvalidArgumentError

__all__ = [
    "Grid",
    "CoefficientField",
    "build_grid",
    "sample_coefficients",
    "coefficient_from_spec",
    "COEFFICIENT_CATALOG",
]


@dataclass(frozen=True)
class Grid:
    """Uniform mesh on [0, length] with n_cells cells and n_cells+1 nodes."""

    length: float
    n_cells: int
    h: float
    nodes: np.ndarray

    @property
    def n_interior(self) -> int:
        return self.n_cells - 1

    @property
    def interior(self) -> np.ndarray:
        """Node coordinates excluding the two boundary nodes."""
        return self.nodes[1:-1]


def build_grid(length: float, n_cells: int) -> Grid:
    """Build a uniform grid; n_cells >= 4 so the bending stencil fits."""
    if not (isinstance(n_cells, (int, np.integer)) and n_cells >= 4):
        raise InvalidArgumentError(
            f"n_cells must be an integer >= 4 (got {n_cells}); "
            "the bending stencil needs at least 3 interior nodes"
        )
    if not (length > 0 and math.isfinite(length)):
        raise InvalidArgumentError(f"length must be positive and finite (got {length})")
    h = length / n_cells
    nodes = np.arange(n_cells + 1, dtype=float) * h
    # pin the endpoint so nodes[-1] == length bit-for-bit
    nodes[-1] = length
    return Grid(length=float(length), n_cells=int(n_cells), h=h, nodes=nodes)


@dataclass(frozen=True)
class CoefficientField:
    """Nodal samples of rigidity p and damping q, plus coupling constants.

    alpha1..alpha4 are the sampled extrema (alpha1 <= p <= alpha2,
    alpha3 <= q <= alpha4); they feed the diagnostic constant estimates.
    analysis_mode marks fields where q >= 0 or kappa == 0 were accepted
    for operator-level studies; the simulation path requires strict
    positivity.
    """

    p: np.ndarray
    q: np.ndarray
    kappa: float
    eta: float
    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    analysis_mode: bool = False


def sample_coefficients(
    grid: Grid,
    p_fn: Callable[[np.ndarray], np.ndarray],
    q_fn: Callable[[np.ndarray], np.ndarray],
    kappa: float,
    eta: float,
    analysis_mode: bool = False,
) -> CoefficientField:
    """Sample p and q at the nodes and verify the positivity hypotheses.

    With analysis_mode=True, q >= 0 and kappa >= 0 are allowed (used for
    decoupled-operator studies such as the undamped clamped beam); eta
    stays strictly positive either way.
    """
    p = np.asarray(p_fn(grid.nodes), dtype=float) * np.ones_like(grid.nodes)
    q = np.asarray(q_fn(grid.nodes), dtype=float) * np.ones_like(grid.nodes)
    if p.shape != grid.nodes.shape or q.shape != grid.nodes.shape:
        raise InvalidArgumentError("coefficient functions must evaluate nodewise")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
        raise InvalidArgumentError("coefficient samples must be finite")

    bad_p = np.flatnonzero(p <= 0.0)
    if bad_p.size:
        i = int(bad_p[0])
        raise CoefficientPositivityError("p", i, float(grid.nodes[i]), float(p[i]))
    q_floor = -np.inf if analysis_mode else 0.0
    bad_q = np.flatnonzero(q < q_floor) if analysis_mode else np.flatnonzero(q <= 0.0)
    if bad_q.size:
        i = int(bad_q[0])
        raise CoefficientPositivityError("q", i, float(grid.nodes[i]), float(q[i]))

    kappa_ok = kappa >= 0.0 if analysis_mode else kappa > 0.0
    if not (math.isfinite(kappa) and kappa_ok):
        raise InvalidArgumentError(f"kappa must be > 0 (got {kappa})")
    if not (math.isfinite(eta) and eta > 0.0):
        raise InvalidArgumentError(f"eta must be > 0 (got {eta})")

    return CoefficientField(
        p=p,
        q=q,
        kappa=float(kappa),
        eta=float(eta),
        alpha1=float(p.min()),
        alpha2=float(p.max()),
        alpha3=float(q.min()),
        alpha4=float(q.max()),
        analysis_mode=analysis_mode,
    )


def _constant(c: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: np.full_like(np.asarray(x, dtype=float), c)


def _affine(a: float, b: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: a + b * np.asarray(x, dtype=float)


def _sin_bump(base: float, amp: float, freq: float) -> Callable[[np.ndarray], np.ndarray]:
    # freq counts full periods over the beam; evaluated against x directly,
    # so pair it with the intended length (freq periods over [0, 1/freq*k]).
    return lambda x: base + amp * np.sin(2.0 * np.pi * freq * np.asarray(x, dtype=float))


COEFFICIENT_CATALOG = {
    "constant": (_constant, 1),
    "affine": (_affine, 2),
    "sin_bump": (_sin_bump, 3),
}

_SPEC_RE = re.compile(r"^\s*([a-z_]+)\s*\(([^)]*)\)\s*$")


def coefficient_from_spec(spec: str) -> Callable[[np.ndarray], np.ndarray]:
    """Build a coefficient function from a catalog string like 'constant(1.0)'.

    There is deliberately no expression parser; only the catalog names
    constant(c), affine(a, b) and sin_bump(base, amp, freq) are accepted.
    """
    m = _SPEC_RE.match(spec)
    if not m:
        raise InvalidArgumentError(
            f"malformed coefficient spec {spec!r}; expected name(arg, ...)"
        )
    name, argstr = m.group(1), m.group(2)
    if name not in COEFFICIENT_CATALOG:
        raise InvalidArgumentError(
            f"unknown coefficient {name!r}; catalog: {sorted(COEFFICIENT_CATALOG)}"
        )
    factory, arity = COEFFICIENT_CATALOG[name]
    parts = [s for s in (a.strip() for a in argstr.split(",")) if s]
    if len(parts) != arity:
        raise InvalidArgumentError(
            f"coefficient {name!r} takes {arity} argument(s), got {len(parts)}"
        )
    try:
        args = [float(s) for s in parts]
    except ValueError as exc:
        raise InvalidArgumentError(f"non-numeric argument in {spec!r}") from exc
    return factory(*args)
