"""Right-hand sides of the six-field neuron pair.

A state bundles the fields (u1, v1, w1, u2, v2, w2) on one grid.  The
rate of change splits into three parts: the pointwise reaction (cubic
membrane kinetics plus linear relaxation of v and w), the antisymmetric
linear coupling through the membrane potentials, and diffusion acting
on the u-fields only.  ``difference_residual`` checks that the evolution
of the pairwise differences (U, V, W) satisfies the closed difference
system that the synchronization estimate is built on — an algebraic
identity, so the residuals must vanish to roundoff.

Rates are represented in the same shape as states, which keeps the
stepper and observer plumbing uniform.  All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, l2_norm_sq, laplacian_apply
from .params import Parameters

__all__ = [
    "PairState",
    "DifferenceState",
    "reaction_rhs",
    "coupling_rhs",
    "full_rhs",
    "difference_residual",
]

_NUM_FIELDS = 6


@dataclass(frozen=True)
class PairState:
    """Six scalar fields sampled on one grid at one time.

    ``data`` has shape ``(6,) + grid.shape`` with the field order
    (u1, v1, w1, u2, v2, w2).  Treat instances as immutable values:
    operations return fresh states.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        if self.data.ndim < 2 or self.data.shape[0] != _NUM_FIELDS:
            raise ValueError(
                f"state data must have shape (6, ...), got {self.data.shape}"
            )

    @classmethod
    def from_fields(cls, u1, v1, w1, u2, v2, w2) -> "PairState":
        return cls(np.stack([np.asarray(f, dtype=float)
                             for f in (u1, v1, w1, u2, v2, w2)]))

    @classmethod
    def zeros(cls, grid: Grid) -> "PairState":
        return cls(np.zeros((_NUM_FIELDS,) + grid.shape))

    @property
    def u1(self) -> np.ndarray:
        return self.data[0]

    @property
    def v1(self) -> np.ndarray:
        return self.data[1]

    @property
    def w1(self) -> np.ndarray:
        return self.data[2]

    @property
    def u2(self) -> np.ndarray:
        return self.data[3]

    @property
    def v2(self) -> np.ndarray:
        return self.data[4]

    @property
    def w2(self) -> np.ndarray:
        return self.data[5]

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.data).all())


@dataclass(frozen=True)
class DifferenceState:
    """Pairwise differences U = u1-u2, V = v1-v2, W = w1-w2."""

    U: np.ndarray
    V: np.ndarray
    W: np.ndarray

    @classmethod
    def from_pair(cls, s: PairState) -> "DifferenceState":
        return cls(U=s.u1 - s.u2, V=s.v1 - s.v2, W=s.w1 - s.w2)


def reaction_rhs(params: Parameters, s: PairState) -> PairState:
    """Pointwise kinetics of each neuron, without diffusion or coupling.

    Per neuron:
        du = a*u^2 - b*u^3 + v - w + J
        dv = alpha - v - beta*u^2
        dw = q*(u - c) - r*w
    The linear relaxation terms -v and -r*w are part of these rates, so
    that reaction + coupling + diffusion is the complete model.
    """
    a, b, alpha, beta = params.a, params.b, params.alpha, params.beta
    q, r, c, J = params.q, params.r, params.c, params.J
    out = np.empty_like(s.data)
    for iu, iv, iw in ((0, 1, 2), (3, 4, 5)):
        u, v, w = s.data[iu], s.data[iv], s.data[iw]
        u_sq = u * u
        out[iu] = a * u_sq - b * u_sq * u + v - w + J
        out[iv] = alpha - v - beta * u_sq
        out[iw] = q * (u - c) - r * w
    return PairState(out)


def coupling_rhs(params: Parameters, s: PairState) -> PairState:
    """Linear exchange through the membrane potentials.

    Only the u-rates are nonzero: p*(u2-u1) for neuron 1 and the exact
    negative for neuron 2, so the two u-rates sum to zero pointwise.
    """
    out = np.zeros_like(s.data)
    exchange = params.p * (s.data[3] - s.data[0])
    out[0] = exchange
    out[3] = -exchange
    return PairState(out)


def full_rhs(grid: Grid, params: Parameters, s: PairState) -> PairState:
    """Complete rate: reaction plus coupling plus diffusion of the u-fields.

    v and w do not diffuse.  On spatially constant states this reduces
    to the six-dimensional ODE right-hand side of the classical coupled
    model at every node.
    """
    if s.data.shape[1:] != grid.shape:
        raise ValueError(
            f"state shape {s.data.shape} does not match grid shape {grid.shape}"
        )
    out = reaction_rhs(params, s).data
    out += coupling_rhs(params, s).data
    out[0] += params.d * laplacian_apply(grid, s.data[0])
    out[3] += params.d * laplacian_apply(grid, s.data[3])
    return PairState(out)


def difference_residual(grid: Grid, params: Parameters, s: PairState,
                        ds_dt: PairState) -> tuple[float, float, float]:
    """Norms of the closed difference-system residuals.

    Given a state and its complete rate, form U, V, W and their rates
    and evaluate how far they are from satisfying

        dU/dt = d*Lap(U) + a*(u1+u2)*U - b*(u1^2+u1*u2+u2^2)*U
                + V - W - 2*p*U
        dV/dt = -V - beta*(u1+u2)*U
        dW/dt = q*U - r*W

    Because these equations are an algebraic consequence of the model,
    the three returned quadrature norms are zero up to roundoff whenever
    ``ds_dt`` is ``full_rhs(grid, params, s)``.
    """
    if s.data.shape != ds_dt.data.shape:
        raise ValueError("state and rate shapes differ")
    if s.data.shape[1:] != grid.shape:
        raise ValueError(
            f"state shape {s.data.shape} does not match grid shape {grid.shape}"
        )
    u1, u2 = s.u1, s.u2
    U, V, W = u1 - u2, s.v1 - s.v2, s.w1 - s.w2
    dU = ds_dt.u1 - ds_dt.u2
    dV = ds_dt.v1 - ds_dt.v2
    dW = ds_dt.w1 - ds_dt.w2
    res_u = (dU - params.d * laplacian_apply(grid, U)
             - params.a * (u1 + u2) * U
             + params.b * (u1 * u1 + u1 * u2 + u2 * u2) * U
             - V + W + 2.0 * params.p * U)
    res_v = dV + V + params.beta * (u1 + u2) * U
    res_w = dW - params.q * U + params.r * W
    return (np.sqrt(l2_norm_sq(grid, res_u)),
            np.sqrt(l2_norm_sq(grid, res_v)),
            np.sqrt(l2_norm_sq(grid, res_w)))
