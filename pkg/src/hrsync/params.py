"""Model parameters and the constants derived from them.

Two neurons, each carrying a membrane potential u, a fast spiking
variable v and a slow bursting variable w, live on a shared spatial
domain; only u diffuses, and the neurons exchange current through a
linear coupling of strength p.  This module holds the parameter record,
validates it, and evaluates every closed-form constant used by the
trajectory checks: the energy-composite weights, the absorbing-ball
radius and entry time, the coupling threshold, and the guaranteed
synchronization decay rate.

All functions here are pure arithmetic on scalars — no grids, no
states — and are safe to call concurrently.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

__all__ = [
    "Parameters",
    "DerivedConstants",
    "PRESET_NAMES",
    "preset_parameters",
    "validate_parameters",
    "compute_lambda",
    "compute_sync_threshold",
    "compute_delta_mu",
    "compute_absorbing_constants",
    "compute_absorb_entry_time",
    "compute_time_avg_bounds",
]


@dataclass(frozen=True)
class Parameters:
    """Constants of the coupled neuron pair plus the domain extent.

    a, b      -- quadratic / cubic coefficients of the u-nullcline
    alpha     -- constant drive of the spiking variable
    beta      -- quadratic feedback of u onto the spiking variable
    q         -- gain of the bursting variable (q = r * S when the
                 configuration supplies S instead)
    r         -- relaxation rate of the bursting variable
    c         -- reference membrane potential (any sign)
    J         -- external input current
    d         -- diffusion coefficient of u
    p         -- coupling strength between the two membrane potentials
    domain_length_per_axis -- side length of the spatial box
    dimension -- 1 or 2 space dimensions
    """

    a: float
    b: float
    alpha: float
    beta: float
    q: float
    r: float
    c: float
    J: float
    d: float
    p: float = 0.0
    domain_length_per_axis: float = 1.0
    dimension: int = 1

    def __post_init__(self) -> None:
        _check_parameters(self)

    @property
    def domain_area(self) -> float:
        """Measure of the spatial box (length, or length squared in 2D)."""
        return self.domain_length_per_axis ** self.dimension


def _check_parameters(params: Parameters) -> None:
    """Raise ValueError naming the first violated constraint."""
    for name in ("a", "b", "alpha", "beta", "q", "r", "c", "J", "d", "p",
                 "domain_length_per_axis"):
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ValueError(f"{name} must be a real number, got {value!r}")
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")
    if params.b <= 0:
        raise ValueError("b must be positive")
    if params.r <= 0:
        raise ValueError("r must be positive")
    if params.d <= 0:
        raise ValueError("d must be positive")
    if params.p < 0:
        raise ValueError("p must be nonnegative")
    if params.domain_length_per_axis <= 0:
        raise ValueError("domain_length_per_axis must be positive")
    if params.dimension not in (1, 2):
        raise ValueError(f"dimension must be 1 or 2, got {params.dimension!r}")


def validate_parameters(raw: Parameters) -> Parameters:
    """Return ``raw`` unchanged if every constraint holds, else raise.

    Construction of :class:`Parameters` already runs the same checks;
    this entry point exists for values rebuilt by other means.
    """
    _check_parameters(raw)
    return raw


#: Named parameter sets.  "typical" is the slow bursting regime
#: (r = 0.0021: guaranteed decay rates are tiny and horizons long);
#: "test" rescales the slow variables so that every derived constant is
#: O(1) and desk-scale runs exercise all the bounds.
_PRESETS = {
    "typical": dict(a=3.0, b=1.0, alpha=1.0, beta=5.0, q=0.0084,
                    r=0.0021, c=-1.6, J=3.281, d=0.1, p=0.0),
    "test": dict(a=1.0, b=1.0, alpha=1.0, beta=1.0, q=8.0,
                 r=1.0, c=-1.6, J=1.0, d=0.1, p=0.0),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset_parameters(name: str, **overrides) -> Parameters:
    """Build a named preset, optionally overriding individual fields."""
    try:
        base = dict(_PRESETS[name])
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; known presets: {', '.join(PRESET_NAMES)}"
        ) from None
    base.update(overrides)
    return Parameters(**base)


@dataclass(frozen=True)
class DerivedConstants:
    """Closed-form constants evaluated from one parameter set.

    c1         -- weight on the u-norms in the energy composite
    c2         -- constant forcing level of the energy inequality
    r1         -- uniform decay rate of the energy composite, min{1,r}/2
    m          -- asymptotic ceiling of the energy composite
    k          -- squared radius of the absorbing ball in the state space
    c3         -- growth constant of the u-gradient estimate, a^2/(3b)
    lam        -- weight on the potential difference in the sync functional
    p_star     -- analytic coupling threshold for guaranteed synchronization
                  (infinite when lam = 0)
    delta      -- Gronwall coefficient 4*p*lam - (...) when p > p_star
    mu         -- guaranteed synchronization decay rate min{delta/lam, r}
    omega_area -- measure of the spatial domain

    ``delta`` and ``mu`` are None unless the parameter set's own p
    exceeds ``p_star``.  This is a plain record: values are produced
    (and their positivity guaranteed) by :func:`compute_absorbing_constants`.
    """

    c1: float
    c2: float
    r1: float
    m: float
    k: float
    c3: float
    lam: float
    p_star: float
    omega_area: float
    delta: Optional[float] = None
    mu: Optional[float] = None


def compute_lambda(params: Parameters) -> float:
    """Weight of the potential difference in the sync functional, 8*beta^2/b.

    Warns when the result is zero (beta = 0): the synchronization
    threshold is undefined in that degenerate case.
    """
    lam = 8.0 * params.beta ** 2 / params.b
    if lam == 0.0:
        warnings.warn(
            "lambda = 8*beta^2/b is zero (beta = 0); the synchronization "
            "threshold is undefined for this parameter set",
            stacklevel=2,
        )
    return lam


def compute_sync_threshold(params: Parameters) -> float:
    """Analytic coupling threshold p* = lam/2 + a^2/b + (q-lam)^2/(4*lam*r)."""
    lam = compute_lambda(params)
    if lam == 0.0:
        raise ValueError("sync threshold undefined: lambda = 8*beta^2/b is zero")
    return lam / 2.0 + params.a ** 2 / params.b \
        + (params.q - lam) ** 2 / (4.0 * lam * params.r)


def compute_delta_mu(params: Parameters, p: float) -> tuple[float, float]:
    """Gronwall coefficient delta and decay rate mu for coupling strength p.

    delta = 4*p*lam - (2*lam^2 + 4*lam*a^2/b + (q-lam)^2/r) must come
    out positive, which is equivalent to p > p*; then
    mu = min{delta/lam, r} is the guaranteed exponential rate of the
    synchronization functional.
    """
    lam = compute_lambda(params)
    if lam == 0.0:
        raise ValueError("decay rate undefined: lambda = 8*beta^2/b is zero")
    delta = 4.0 * p * lam - (
        2.0 * lam ** 2
        + 4.0 * lam * params.a ** 2 / params.b
        + (params.q - lam) ** 2 / params.r
    )
    if delta <= 0.0:
        raise ValueError(
            f"p below analytic threshold: p = {p} gives delta = {delta} <= 0"
        )
    return delta, min(delta / lam, params.r)


def compute_absorbing_constants(params: Parameters,
                                omega_area: float) -> DerivedConstants:
    """Evaluate every closed-form constant for one parameter set.

    The energy composite c1*(|u1|^2+|u2|^2) + |v1|^2+|v2|^2 + |w1|^2+|w2|^2
    decays at rate r1 toward the level m*|Omega|; k is the squared
    radius of the resulting absorbing ball (strictly above the limsup).
    """
    if omega_area <= 0.0:
        raise ValueError("omega_area must be positive")
    a, b, alpha, q, r = params.a, params.b, params.alpha, params.q, params.r
    c1 = (params.beta ** 2 + 4.0) / b
    c2 = (
        2.0 * (c1 * a) ** 4
        + 2.0 * c1 * params.J ** 2
        + 2.0 * (c1 ** 2 * (2.0 + 1.0 / r) + c1) ** 2
        + 4.0 * alpha ** 2
        + 2.0 * q ** 2 * params.c ** 2 / r
        + 2.0 * q ** 4 / r ** 2
    )
    r1 = 0.5 * min(1.0, r)
    m = (2.0 * c2 + c1 ** 2 / 16.0) / r1
    k = m * omega_area / min(c1, 1.0) + 1.0
    c3 = a ** 2 / (3.0 * b)
    lam = 8.0 * params.beta ** 2 / b
    if lam > 0.0:
        p_star = compute_sync_threshold(params)
    else:
        p_star = math.inf
    delta = mu = None
    if lam > 0.0:
        try:
            delta, mu = compute_delta_mu(params, params.p)
        except ValueError:
            pass  # p at or below the threshold: no decay guarantee
    return DerivedConstants(c1=c1, c2=c2, r1=r1, m=m, k=k, c3=c3, lam=lam,
                            p_star=p_star, omega_area=omega_area,
                            delta=delta, mu=mu)


def compute_absorb_entry_time(constants: DerivedConstants, R: float) -> float:
    """Time after which every trajectory started with squared norm <= R
    stays inside the absorbing ball: (1/r1) * log+(R * max{c1,1}/min{c1,1}).
    """
    if R < 0.0:
        raise ValueError("R must be nonnegative")
    x = R * max(constants.c1, 1.0) / min(constants.c1, 1.0)
    if x <= 1.0:
        return 0.0
    return math.log(x) / constants.r1


def compute_time_avg_bounds(params: Parameters,
                            constants: DerivedConstants) -> tuple[float, float]:
    """Constants (m1, m2) of the unit-interval energy-average estimate.

    They bound the time average of the full energy (state norm plus
    u-gradient norms) over any window of length one:

        integral_0^1 (|g(t)|^2 + |grad u1|^2 + |grad u2|^2) dt
            <= m1 * |g(0)|^2 + m2 * |Omega|.

    These forms are implementation-derived: they follow from the same
    differential inequality as the global bound (one integration in
    time, gradient term kept on the left) but are not part of the
    published constant set.
    """
    c1, c2, m = constants.c1, constants.c2, constants.m
    m1 = max(c1, 1.0) * (1.0 / (c1 * params.d) + 1.0 / min(c1, 1.0))
    m2 = (2.0 * c2 + c1 ** 2 / 16.0) / (c1 * params.d) + m / min(c1, 1.0)
    return m1, m2
