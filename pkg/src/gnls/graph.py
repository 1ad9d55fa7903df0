"""Fields on a three-edge star graph.

Each edge is a half-line [0, infinity) truncated to [0, L] on a shared uniform
grid; the vertex sits at x = 0 on every edge.  This module holds the grid and
field containers, the vertex-coupling descriptor, and the quadrature-based
functionals (Lp norms, mass, energy) together with a vertex-condition
diagnostic.

Quadrature convention: all integrals use the trapezoid rule on the edge grid.
Note that the trapezoid mass of a field satisfying a delta or delta-prime
vertex condition carries an O(dx^2) Euler-Maclaurin boundary term
proportional to the vertex strength times |psi(0)|^2; it vanishes for
Kirchhoff data and whenever the field is small at the vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "CouplingKind",
    "VertexCoupling",
    "GridSpec",
    "GraphField",
    "BoundaryResidual",
    "InvalidParameterError",
    "lp_norm",
    "mass",
    "edge_masses",
    "energy",
    "edge_derivatives",
    "boundary_residual",
    "far_end_mass",
]

N_EDGES = 3


class InvalidParameterError(ValueError):
    """A parameter is outside its documented domain."""


class CouplingKind(Enum):
    KIRCHHOFF = "kirchhoff"
    DELTA = "delta"
    DELTA_PRIME = "delta_prime"


@dataclass(frozen=True)
class VertexCoupling:
    """Self-adjoint condition at the vertex.

    kirchhoff:    psi_1(0) = psi_2(0) = psi_3(0),  sum_j psi_j'(0) = 0
    delta(alpha): continuity as above,  sum_j psi_j'(0) = alpha * psi(0)
    delta_prime(beta): psi_1'(0) = psi_2'(0) = psi_3'(0),
                       sum_j psi_j(0) = beta * psi'(0)

    delta with alpha = 0 coincides with kirchhoff and shares its code paths.
    The repulsive regimes alpha >= 0 and beta > 0 are enforced.
    """

    kind: CouplingKind
    strength: float = 0.0

    def __post_init__(self):
        if self.kind == CouplingKind.KIRCHHOFF:
            if self.strength != 0.0:
                raise InvalidParameterError("kirchhoff takes no strength parameter")
        elif self.kind == CouplingKind.DELTA:
            if not np.isfinite(self.strength) or self.strength < 0.0:
                raise InvalidParameterError(f"delta strength must be >= 0, got {self.strength}")
        elif self.kind == CouplingKind.DELTA_PRIME:
            if not np.isfinite(self.strength) or self.strength <= 0.0:
                raise InvalidParameterError(f"delta_prime strength must be > 0, got {self.strength}")
        else:  # pragma: no cover
            raise InvalidParameterError(f"unknown coupling kind {self.kind!r}")

    @classmethod
    def kirchhoff(cls) -> "VertexCoupling":
        return cls(CouplingKind.KIRCHHOFF)

    @classmethod
    def delta(cls, alpha: float) -> "VertexCoupling":
        return cls(CouplingKind.DELTA, float(alpha))

    @classmethod
    def delta_prime(cls, beta: float) -> "VertexCoupling":
        return cls(CouplingKind.DELTA_PRIME, float(beta))

    @property
    def alpha(self) -> float:
        """Delta strength; 0 for kirchhoff (identical condition)."""
        if self.kind == CouplingKind.DELTA_PRIME:
            raise InvalidParameterError("alpha undefined for delta_prime")
        return self.strength if self.kind == CouplingKind.DELTA else 0.0

    @property
    def beta(self) -> float:
        if self.kind != CouplingKind.DELTA_PRIME:
            raise InvalidParameterError("beta only defined for delta_prime")
        return self.strength

    def label(self) -> str:
        if self.kind == CouplingKind.KIRCHHOFF:
            return "kirchhoff"
        return f"{self.kind.value}({self.strength:g})"


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on one edge: n_points samples at spacing dx from x = 0."""

    dx: float
    n_points: int

    def __post_init__(self):
        if not (np.isfinite(self.dx) and self.dx > 0.0):
            raise InvalidParameterError(f"dx must be positive, got {self.dx}")
        if self.n_points < 16:
            raise InvalidParameterError(f"need at least 16 grid points, got {self.n_points}")

    @property
    def length(self) -> float:
        return self.dx * (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n_points) * self.dx

    @classmethod
    def from_length(cls, dx: float, length: float) -> "GridSpec":
        return cls(dx, int(round(length / dx)) + 1)


class GraphField:
    """Complex field on the three edges, sampled on a shared GridSpec.

    edges is a (3, n_points) complex array; row j holds psi_{j+1}.  Operations
    treat fields as immutable and return new instances.
    """

    __slots__ = ("grid", "edges")

    def __init__(self, grid: GridSpec, edges: np.ndarray):
        edges = np.asarray(edges, dtype=np.complex128)
        if edges.shape != (N_EDGES, grid.n_points):
            raise InvalidParameterError(
                f"edges must have shape (3, {grid.n_points}), got {edges.shape}"
            )
        self.grid = grid
        self.edges = edges

    @classmethod
    def zeros(cls, grid: GridSpec) -> "GraphField":
        return cls(grid, np.zeros((N_EDGES, grid.n_points), dtype=np.complex128))

    @classmethod
    def from_edges(cls, grid: GridSpec, psi1, psi2, psi3) -> "GraphField":
        return cls(grid, np.stack([np.asarray(p, dtype=np.complex128) for p in (psi1, psi2, psi3)]))

    def copy(self) -> "GraphField":
        return GraphField(self.grid, self.edges.copy())

    def __add__(self, other: "GraphField") -> "GraphField":
        self._check_compatible(other)
        return GraphField(self.grid, self.edges + other.edges)

    def __sub__(self, other: "GraphField") -> "GraphField":
        self._check_compatible(other)
        return GraphField(self.grid, self.edges - other.edges)

    def __mul__(self, c) -> "GraphField":
        return GraphField(self.grid, self.edges * c)

    __rmul__ = __mul__

    def _check_compatible(self, other: "GraphField"):
        if other.grid != self.grid:
            raise InvalidParameterError("fields live on different grids")

    def vertex_values(self) -> np.ndarray:
        return self.edges[:, 0].copy()


def _trap_weights(grid: GridSpec) -> np.ndarray:
    w = np.full(grid.n_points, grid.dx)
    w[0] = w[-1] = grid.dx / 2.0
    return w


def lp_norm(field: GraphField, p: float) -> float:
    """Graph Lp norm: (sum_j int_0^L |psi_j|^p dx)^(1/p); p = inf gives sup."""
    if p == np.inf:
        return float(np.max(np.abs(field.edges)))
    if not (np.isfinite(p) and p >= 1.0):
        raise InvalidParameterError(f"p must be >= 1 or inf, got {p}")
    w = _trap_weights(field.grid)
    total = float(np.sum(np.abs(field.edges) ** p @ w))
    return total ** (1.0 / p)


def edge_masses(field: GraphField) -> np.ndarray:
    """Per-edge L2 masses int |psi_j|^2 dx (trapezoid), shape (3,)."""
    w = _trap_weights(field.grid)
    return np.abs(field.edges) ** 2 @ w


def mass(field: GraphField) -> float:
    """Total squared L2 norm; the sum of edge_masses, so closure is exact."""
    return float(edge_masses(field).sum())


def edge_derivatives(field: GraphField) -> np.ndarray:
    """d/dx per edge: 4th-order centred differences in the interior,
    2nd-order one-sided at the vertex and far end (and 2nd-order centred at
    the nodes adjacent to them).  Finite differences rather than spectral
    derivatives so the vertex sees no wraparound coupling."""
    e = field.edges
    dx = field.grid.dx
    n = field.grid.n_points
    d = np.empty_like(e)
    d[:, 2:n-2] = (e[:, 0:n-4] - 8*e[:, 1:n-3] + 8*e[:, 3:n-1] - e[:, 4:n]) / (12.0 * dx)
    d[:, 1] = (e[:, 2] - e[:, 0]) / (2.0 * dx)
    d[:, n-2] = (e[:, n-1] - e[:, n-3]) / (2.0 * dx)
    d[:, 0] = (-3.0*e[:, 0] + 4.0*e[:, 1] - e[:, 2]) / (2.0 * dx)
    d[:, n-1] = (3.0*e[:, n-1] - 4.0*e[:, n-2] + e[:, n-3]) / (2.0 * dx)
    return d


def energy(field: GraphField, coupling: VertexCoupling) -> float:
    """E = (1/2) E_lin - (1/4) ||psi||_4^4 with the coupling's vertex term.

    E_lin = sum_j int |psi_j'|^2 + alpha |psi(0)|^2          (delta family)
    E_lin = sum_j int |psi_j'|^2 + (1/beta) |sum_j psi_j(0)|^2  (delta-prime)
    Kirchhoff is delta with alpha = 0 (same code path, no vertex term).
    """
    w = _trap_weights(field.grid)
    d = edge_derivatives(field)
    e_lin = float(np.sum(np.abs(d) ** 2 @ w))
    if coupling.kind == CouplingKind.DELTA_PRIME:
        e_lin += abs(field.edges[:, 0].sum()) ** 2 / coupling.beta
    else:
        e_lin += coupling.alpha * abs(field.edges[0, 0]) ** 2
    l4 = float(np.sum(np.abs(field.edges) ** 4 @ w))
    return 0.5 * e_lin - 0.25 * l4


@dataclass(frozen=True)
class BoundaryResidual:
    """Magnitudes of the vertex-condition defects.

    continuity: largest pairwise mismatch of the quantity required to be
        continuous (values for kirchhoff/delta, derivatives for delta-prime).
    flux: defect of the remaining scalar condition.
    """

    continuity: float
    flux: float

    @property
    def max_defect(self) -> float:
        return max(self.continuity, self.flux)


def boundary_residual(field: GraphField, coupling: VertexCoupling) -> BoundaryResidual:
    """Defects of the coupling's defining vertex equations, using the same
    one-sided 2nd-order derivative stencil as the energy functional.  Fields
    in the operator domain sampled from smooth functions give O(dx^2)."""
    v = field.edges[:, 0]
    dv = edge_derivatives(field)[:, 0]
    if coupling.kind == CouplingKind.DELTA_PRIME:
        cont = max(abs(dv[0] - dv[1]), abs(dv[1] - dv[2]), abs(dv[2] - dv[0]))
        flux = abs(v.sum() - coupling.beta * dv[0])
    else:
        cont = max(abs(v[0] - v[1]), abs(v[1] - v[2]), abs(v[2] - v[0]))
        flux = abs(dv.sum() - coupling.alpha * v[0])
    return BoundaryResidual(float(cont), float(flux))


def far_end_mass(field: GraphField, fraction: float = 0.05) -> float:
    """Mass in the outermost `fraction` of each edge; the truncation
    certificate monitors this against a threshold."""
    if not 0.0 < fraction < 1.0:
        raise InvalidParameterError(f"fraction must be in (0,1), got {fraction}")
    n = field.grid.n_points
    m = max(2, int(np.ceil(fraction * n)))
    w = np.full(m, field.grid.dx)
    w[-1] = field.grid.dx / 2.0
    return float(np.sum(np.abs(field.edges[:, n - m:]) ** 2 @ w))
