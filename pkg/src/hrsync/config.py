"""Plain-text run configuration: parsing and rendering.

The format is sectioned ``key = value`` text (diff-friendly, no
dependencies)::

    [parameters]
    preset = test
    p = 6.0

    [experiment]
    name = sync
    T = 20

Sections and keys are fixed; an unknown key is an error that names the
line and the nearest valid key, so typos never pass silently.  Missing
keys fall back to documented defaults, and ``render_run_config`` writes
every resolved value back out — parsing that echo reproduces the same
configuration exactly.

Full-line comments start with ``#`` or ``;``.  Inline comments are not
supported.  In ``[parameters]``, ``S`` may be given instead of ``q``
(then q = r * S, and S wins when both appear).
"""

from __future__ import annotations

import difflib
from typing import Optional

from .experiments import GENERATORS, InitialSpec, RunConfig
from .grid import make_grid
from .integrator import SCHEMES, StepperConfig
from .params import PRESET_NAMES, Parameters, preset_parameters

__all__ = ["ConfigError", "parse_run_config", "render_run_config",
           "EXPERIMENT_NAMES"]

EXPERIMENT_NAMES = ("simulate", "sync", "threshold", "converge", "oracle")

_SECTION_KEYS = {
    "parameters": ("preset", "a", "b", "alpha", "beta", "q", "S", "r", "c",
                   "J", "d", "p"),
    "grid": ("dimension", "points", "length"),
    "stepper": ("dt", "scheme"),
    "initial": ("generator", "seed", "amplitude", "values"),
    "experiment": ("name", "T", "sample_every", "p_lo", "p_hi", "tol",
                   "epsilon"),
}


class ConfigError(ValueError):
    """Raised for any malformed or inconsistent configuration."""


def _suggest(word: str, candidates) -> str:
    close = difflib.get_close_matches(word, list(candidates), n=1)
    return f" (did you mean {close[0]!r}?)" if close else ""


def _parse_sections(text: str) -> dict[str, dict[str, tuple[int, str]]]:
    """Split the text into {section: {key: (line_number, raw_value)}}."""
    sections: dict[str, dict[str, tuple[int, str]]] = {}
    current: Optional[str] = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SECTION_KEYS:
                raise ConfigError(
                    f"line {line_no}: unknown section [{name}]"
                    f"{_suggest(name, _SECTION_KEYS)}"
                )
            current = name
            sections.setdefault(name, {})
            continue
        if "=" not in line:
            raise ConfigError(
                f"line {line_no}: expected 'key = value' or '[section]', "
                f"got {line!r}"
            )
        if current is None:
            raise ConfigError(
                f"line {line_no}: key outside of any section"
            )
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SECTION_KEYS[current]:
            raise ConfigError(
                f"line {line_no}: unknown key {key!r} in [{current}]"
                f"{_suggest(key, _SECTION_KEYS[current])}"
            )
        if key in sections[current]:
            raise ConfigError(
                f"line {line_no}: duplicate key {key!r} in [{current}]"
            )
        sections[current][key] = (line_no, value)
    return sections


def _take_float(sec: dict, key: str, default: float) -> float:
    if key not in sec:
        return default
    line_no, raw = sec[key]
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(
            f"line {line_no}: value for {key!r} must be a number, "
            f"got {raw!r}"
        ) from None


def _take_int(sec: dict, key: str, default: int) -> int:
    if key not in sec:
        return default
    line_no, raw = sec[key]
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(
            f"line {line_no}: value for {key!r} must be an integer, "
            f"got {raw!r}"
        ) from None


def _take_str(sec: dict, key: str, default: str,
              allowed: Optional[tuple] = None) -> str:
    if key not in sec:
        return default
    line_no, raw = sec[key]
    if allowed is not None and raw not in allowed:
        raise ConfigError(
            f"line {line_no}: value for {key!r} must be one of "
            f"{', '.join(allowed)}; got {raw!r}{_suggest(raw, allowed)}"
        )
    return raw


def _take_values(sec: dict, key: str,
                 default: tuple[float, ...]) -> tuple[float, ...]:
    if key not in sec:
        return default
    line_no, raw = sec[key]
    parts = [piece.strip() for piece in raw.split(",")]
    if len(parts) != 6:
        raise ConfigError(
            f"line {line_no}: {key!r} needs six comma-separated numbers, "
            f"got {len(parts)}"
        )
    try:
        return tuple(float(piece) for piece in parts)
    except ValueError:
        raise ConfigError(
            f"line {line_no}: {key!r} needs six comma-separated numbers, "
            f"got {raw!r}"
        ) from None


def parse_run_config(text: str) -> RunConfig:
    """Parse configuration text into a fully resolved :class:`RunConfig`.

    Every omitted key takes its documented default; the returned config
    contains only explicit values (render it to see them all).  Errors
    carry the offending line number.
    """
    sections = _parse_sections(text)
    par = sections.get("parameters", {})
    gri = sections.get("grid", {})
    ste = sections.get("stepper", {})
    ini = sections.get("initial", {})
    exp = sections.get("experiment", {})

    preset = _take_str(par, "preset", "test", allowed=PRESET_NAMES)
    base = {name: getattr(preset_parameters(preset), name)
            for name in ("a", "b", "alpha", "beta", "q", "r", "c", "J",
                         "d", "p")}
    for key in ("a", "b", "alpha", "beta", "q", "r", "c", "J", "d", "p"):
        base[key] = _take_float(par, key, base[key])
    if "S" in par:
        base["q"] = base["r"] * _take_float(par, "S", 0.0)

    dimension = _take_int(gri, "dimension", 1)
    points = _take_int(gri, "points", 101)
    length = _take_float(gri, "length", 1.0)
    try:
        grid = make_grid(dimension, points, length)
        params = Parameters(**base, domain_length_per_axis=length,
                            dimension=dimension)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    scheme = _take_str(ste, "scheme", "imex-euler", allowed=SCHEMES)
    dt = _take_float(ste, "dt", 1e-3)

    generator = _take_str(ini, "generator", "fourier-smooth",
                          allowed=GENERATORS)
    seed = _take_int(ini, "seed", 0)
    amplitude = _take_float(ini, "amplitude", 1.0)
    values = _take_values(ini, "values", (0.0,) * 6)

    name = _take_str(exp, "name", "simulate", allowed=EXPERIMENT_NAMES)
    if name == "converge":
        default_T = 1.0
    elif name == "oracle":
        default_T = 50.0
    elif preset == "typical":
        default_T = 2000.0
    else:
        default_T = 20.0
    T = _take_float(exp, "T", default_T)
    sample_every = _take_int(exp, "sample_every", 100)
    p_lo = _take_float(exp, "p_lo", 0.0)
    p_hi = _take_float(exp, "p_hi", 6.0)
    tol = _take_float(exp, "tol", 0.1)
    epsilon = _take_float(exp, "epsilon", 1e-6)

    try:
        stepper = StepperConfig(dt=dt, scheme=scheme)
        initial = InitialSpec(generator=generator, seed=seed,
                              amplitude=amplitude, values=values)
        return RunConfig(params=params, grid=grid, stepper=stepper, T=T,
                         sample_every=sample_every, initial=initial,
                         name=name, p_lo=p_lo, p_hi=p_hi, tol=tol,
                         epsilon=epsilon)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_run_config(config: RunConfig) -> str:
    """Write a config back as text with every resolved value explicit.

    ``parse_run_config(render_run_config(c))`` equals ``c``.
    """
    p = config.params
    lines = ["[parameters]"]
    for key in ("a", "b", "alpha", "beta", "q", "r", "c", "J", "d", "p"):
        lines.append(f"{key} = {_fmt(getattr(p, key))}")
    lines += [
        "",
        "[grid]",
        f"dimension = {config.grid.dimension}",
        f"points = {config.grid.points_per_axis}",
        f"length = {_fmt(config.grid.length_per_axis)}",
        "",
        "[stepper]",
        f"dt = {_fmt(config.stepper.dt)}",
        f"scheme = {config.stepper.scheme}",
        "",
        "[initial]",
        f"generator = {config.initial.generator}",
        f"seed = {config.initial.seed}",
        f"amplitude = {_fmt(config.initial.amplitude)}",
        f"values = {', '.join(_fmt(v) for v in config.initial.values)}",
        "",
        "[experiment]",
        f"name = {config.name}",
        f"T = {_fmt(config.T)}",
        f"sample_every = {config.sample_every}",
        f"p_lo = {_fmt(config.p_lo)}",
        f"p_hi = {_fmt(config.p_hi)}",
        f"tol = {_fmt(config.tol)}",
        f"epsilon = {_fmt(config.epsilon)}",
        "",
    ]
    return "\n".join(lines)
