"""Uniform node-centered mesh with a zero-flux discrete Laplacian.

The mesh covers an interval (1D) or a square (2D) including the
boundary nodes.  Neumann boundary conditions are built into the
Laplacian by mirror ghost nodes, which keeps the operator symmetric
with respect to the trapezoidal quadrature, nonpositive, and exact on
constants — the discrete counterparts of the structure the energy
estimates rely on.

Scalar fields are plain numpy arrays of shape ``grid.shape``; any
number of fields may be stacked along leading axes and all operations
apply along the trailing spatial axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import solve_banded

__all__ = [
    "Grid",
    "make_grid",
    "laplacian_apply",
    "helmholtz_solve",
    "helmholtz_solver",
    "l2_inner",
    "l2_norm_sq",
    "h1_seminorm_sq",
]


@dataclass(frozen=True)
class Grid:
    """Uniform mesh over [0, L]^dimension including boundary nodes."""

    dimension: int
    points_per_axis: int
    length_per_axis: float

    def __post_init__(self) -> None:
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension!r}")
        if self.points_per_axis < 3:
            raise ValueError("points_per_axis must be at least 3")
        if not self.length_per_axis > 0:
            raise ValueError("length_per_axis must be positive")

    @property
    def h(self) -> float:
        """Node spacing along each axis."""
        return self.length_per_axis / (self.points_per_axis - 1)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dimension

    @property
    def num_points(self) -> int:
        return self.points_per_axis ** self.dimension

    @property
    def volume(self) -> float:
        """Measure of the domain box."""
        return self.length_per_axis ** self.dimension

    @cached_property
    def axis_coordinates(self) -> np.ndarray:
        """Node coordinates along one axis."""
        return np.linspace(0.0, self.length_per_axis, self.points_per_axis)

    @cached_property
    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Meshgrid coordinate arrays, one per axis, each of ``shape``."""
        axes = (self.axis_coordinates,) * self.dimension
        return tuple(np.meshgrid(*axes, indexing="ij"))

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights, shape ``shape``; sums to volume."""
        w = np.full(self.points_per_axis, self.h)
        w[0] = w[-1] = 0.5 * self.h
        if self.dimension == 1:
            out = w
        else:
            out = np.outer(w, w)
        out.flags.writeable = False
        return out


def make_grid(dimension: int, points_per_axis: int,
              length_per_axis: float) -> Grid:
    """Construct a validated mesh."""
    return Grid(dimension=dimension, points_per_axis=points_per_axis,
                length_per_axis=float(length_per_axis))


def _check_field(grid: Grid, f: np.ndarray, name: str = "field") -> None:
    if f.shape[-grid.dimension:] != grid.shape:
        raise ValueError(
            f"{name} shape {f.shape} does not match grid shape {grid.shape}"
        )


def _lap_axis(f: np.ndarray, h: float) -> np.ndarray:
    """Second difference along the last axis with mirror ghost nodes."""
    out = np.empty_like(f)
    inv_h2 = 1.0 / (h * h)
    out[..., 1:-1] = (f[..., :-2] - 2.0 * f[..., 1:-1] + f[..., 2:]) * inv_h2
    out[..., 0] = 2.0 * (f[..., 1] - f[..., 0]) * inv_h2
    out[..., -1] = 2.0 * (f[..., -2] - f[..., -1]) * inv_h2
    return out


def laplacian_apply(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Zero-flux discrete Laplacian of ``f`` (fresh array).

    Second-order central differences; at each boundary the ghost node
    mirrors the first interior node, so constants map to exactly zero.
    """
    _check_field(grid, f)
    if grid.dimension == 1:
        return _lap_axis(f, grid.h)
    out = _lap_axis(f, grid.h)
    out += np.swapaxes(_lap_axis(np.swapaxes(f, -1, -2), grid.h), -1, -2)
    return out


def _banded_helmholtz(n: int, h: float, gamma: float) -> np.ndarray:
    """Banded form of I - gamma * Lap_h on one axis (for solve_banded)."""
    g = gamma / (h * h)
    ab = np.zeros((3, n))
    ab[1, :] = 1.0 + 2.0 * g
    ab[0, 1:] = -g
    ab[2, :-1] = -g
    ab[0, 1] = -2.0 * g      # mirror ghost in the first row
    ab[2, -2] = -2.0 * g     # mirror ghost in the last row
    return ab


def _solve_banded_stacked(ab: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Tridiagonal solve along the last axis of ``rhs`` (any leading shape)."""
    n = rhs.shape[-1]
    flat = rhs.reshape(-1, n)
    sol = solve_banded((1, 1), ab, flat.T)
    return np.ascontiguousarray(sol.T).reshape(rhs.shape)


def helmholtz_solver(grid: Grid, gamma: float):
    """Return a reusable solver x = (I - gamma*Lap_h)^{-1} b.

    The returned callable accepts a field (or stack of fields) and
    returns a fresh array.  Used by the time stepper, which applies the
    same operator every step.
    """
    if gamma < 0.0:
        raise ValueError("gamma must be nonnegative")
    if gamma == 0.0:
        return lambda rhs: np.array(rhs, copy=True)
    if grid.dimension == 1:
        ab = _banded_helmholtz(grid.points_per_axis, grid.h, gamma)

        def solve_1d(rhs: np.ndarray) -> np.ndarray:
            _check_field(grid, rhs, "rhs")
            return _solve_banded_stacked(ab, rhs)

        return solve_1d

    def solve_2d(rhs: np.ndarray) -> np.ndarray:
        _check_field(grid, rhs, "rhs")
        if rhs.ndim == grid.dimension:
            return _cg_helmholtz(grid, gamma, rhs)
        flat = rhs.reshape((-1,) + grid.shape)
        return np.stack([_cg_helmholtz(grid, gamma, b) for b in flat]
                        ).reshape(rhs.shape)

    return solve_2d


def helmholtz_solve(grid: Grid, gamma: float, rhs: np.ndarray) -> np.ndarray:
    """Solve (I - gamma*Lap_h) x = rhs to relative residual 1e-10.

    1D uses a direct tridiagonal solve; 2D a conjugate-gradient
    iteration in the quadrature inner product (the operator is
    symmetric positive definite there for gamma >= 0).
    """
    return helmholtz_solver(grid, gamma)(rhs)


_CG_TOL = 1e-10


def _cg_helmholtz(grid: Grid, gamma: float, b: np.ndarray) -> np.ndarray:
    w = grid.weights

    def apply_op(x: np.ndarray) -> np.ndarray:
        return x - gamma * laplacian_apply(grid, x)

    def dot(u: np.ndarray, v: np.ndarray) -> float:
        return float(np.sum(w * u * v))

    b_norm = np.sqrt(dot(b, b))
    if b_norm == 0.0:
        return np.zeros_like(b)
    x = b.copy()              # good initial guess: operator is I + O(gamma)
    res = b - apply_op(x)
    p = res.copy()
    rr = dot(res, res)
    tol = _CG_TOL * b_norm
    max_iter = 10 * grid.num_points
    for _ in range(max_iter):
        if np.sqrt(rr) <= tol:
            return x
        op = apply_op(p)
        alpha = rr / dot(p, op)
        x += alpha * p
        res -= alpha * op
        rr_new = dot(res, res)
        p = res + (rr_new / rr) * p
        rr = rr_new
    if np.sqrt(rr) <= tol:
        return x
    raise RuntimeError(
        f"helmholtz solve did not converge within {max_iter} iterations: "
        f"achieved residual {np.sqrt(rr):.3e}, required {tol:.3e}"
    )


def l2_inner(grid: Grid, f: np.ndarray, g: np.ndarray) -> float:
    """Trapezoidal approximation of the integral of f*g over the domain."""
    _check_field(grid, f, "f")
    _check_field(grid, g, "g")
    return float(np.sum(grid.weights * f * g))


def l2_norm_sq(grid: Grid, f: np.ndarray) -> float:
    """Squared quadrature norm of one field."""
    _check_field(grid, f)
    return float(np.sum(grid.weights * f * f))


def h1_seminorm_sq(grid: Grid, f: np.ndarray) -> float:
    """Quadrature of |grad f|^2: centered differences inside, one-sided
    at the boundary nodes."""
    _check_field(grid, f)
    if grid.dimension == 1:
        g = np.gradient(f, grid.h, axis=-1)
        return float(np.sum(grid.weights * g * g))
    total = 0.0
    for axis in (-2, -1):
        g = np.gradient(f, grid.h, axis=axis)
        total += float(np.sum(grid.weights * g * g))
    return total
