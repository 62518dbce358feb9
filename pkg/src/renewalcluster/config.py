"""Flat key = value experiment configuration.

The format is UTF-8 text, one ``key = value`` pair per line, ``#`` starts
a comment.  Every key must be recognized and consumed; an unknown key is a
hard parse error rather than a silent ignore.  See README for the full
key schema.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .clusters import (
    CumulativeStepCluster,
    EmptyCluster,
    GatedNormalCluster,
)
from .errors import ConfigError, LawError
from .laws import Exponential, FixedCount, GammaLaw, PoissonCount, Uniform
from .process import ProcessSpec

__all__ = ["ExperimentConfig", "parse_kv", "build_process_spec", "build_experiment_config"]

EXPERIMENT_KINDS = (
    "window_mean",
    "elementary",
    "recurrence_cdf",
    "void_prob",
    "renewal_function",
    "key_renewal",
    "coupling",
    "stationarity_check",
    "flip_test",
)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    spec: ProcessSpec | None
    n_rep: int
    seed: int
    params: dict = field(default_factory=dict)


def parse_kv(text: str) -> dict:
    """Parse ``key = value`` lines into an ordered dict of strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _take(d, used, key, parser, default=None, required=False):
    if key in d:
        used.add(key)
        try:
            return parser(d[key])
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {key!r}: {d[key]!r}") from exc
    if required:
        raise ConfigError(f"missing required key {key!r}")
    return default


def _bool(s: str) -> bool:
    if s.lower() in ("true", "yes", "1"):
        return True
    if s.lower() in ("false", "no", "0"):
        return False
    raise ValueError(s)


def _floats(s: str):
    return tuple(float(p) for p in s.split(",") if p.strip())


def _pieces(s: str):
    # "a:b:h;a:b:h" step-function pieces
    out = []
    for part in s.split(";"):
        a, b, h = part.split(":")
        out.append((float(a), float(b), float(h)))
    return tuple(out)


def _law(d, used, prefix):
    kind = _take(d, used, f"{prefix}.kind", str, required=True)
    try:
        if kind == "exponential":
            return Exponential(_take(d, used, f"{prefix}.rate", float, required=True))
        if kind == "uniform":
            return Uniform(
                _take(d, used, f"{prefix}.lo", float, required=True),
                _take(d, used, f"{prefix}.hi", float, required=True),
            )
        if kind == "gamma":
            return GammaLaw(
                _take(d, used, f"{prefix}.shape", float, required=True),
                _take(d, used, f"{prefix}.scale", float, required=True),
            )
    except LawError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown {prefix}.kind {kind!r}")


def _count_law(d, used, prefix):
    kind = _take(d, used, f"{prefix}.kind", str, required=True)
    try:
        if kind == "poisson":
            return PoissonCount(_take(d, used, f"{prefix}.rate", float, required=True))
        if kind == "fixed":
            return FixedCount(_take(d, used, f"{prefix}.value", int, required=True))
    except LawError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown {prefix}.kind {kind!r}")


def _cluster(d, used, prefix):
    kind = _take(d, used, f"{prefix}.kind", str, required=True)
    if kind == "empty":
        return EmptyCluster()
    if kind == "cumulative_steps":
        size = _count_law(d, used, f"{prefix}.size")
        step = _law(d, used, f"{prefix}.step")
        return CumulativeStepCluster(size, step)
    if kind == "gated_normal":
        return GatedNormalCluster(
            threshold=_take(d, used, f"{prefix}.threshold", float, default=1.0),
            rate_above=_take(d, used, f"{prefix}.rate_above", float, default=0.5),
            rate_below=_take(d, used, f"{prefix}.rate_below", float, default=5.0),
        )
    raise ConfigError(f"unknown {prefix}.kind {kind!r}")


def build_process_spec(d: dict, used: set) -> ProcessSpec:
    interarrival = _law(d, used, "interarrival")
    cluster = _cluster(d, used, "cluster")

    delay_kind = _take(d, used, "delay.kind", str, default="zero")
    if delay_kind == "zero":
        delay = None
    elif delay_kind == "same":
        delay = interarrival
    else:
        d2 = dict(d)
        d2["delay.kind"] = delay_kind
        delay = _law(d2, used, "delay")

    dc_kind = _take(d, used, "delay_cluster.kind", str, default="empty")
    if dc_kind == "empty":
        delay_cluster = None
    elif dc_kind == "same":
        delay_cluster = cluster
    else:
        raise ConfigError(f"unknown delay_cluster.kind {dc_kind!r}")

    return ProcessSpec(
        interarrival=interarrival,
        cluster=cluster,
        delay=delay,
        delay_cluster=delay_cluster,
        include_parents=_take(d, used, "include_parents", _bool, default=False),
        arrival_cap=_take(d, used, "arrival_cap", int, default=10**8),
    )


# per-experiment parameter schema: name -> (parser, default, required)
_KIND_PARAMS = {
    "window_mean": {"t": (float, None, True), "x": (float, None, True)},
    "elementary": {"t": (float, None, True)},
    "recurrence_cdf": {
        "t": (float, None, True),
        "grid": (_floats, None, True),
        "tol": (float, 0.01, False),
    },
    "void_prob": {"t": (float, None, True), "x": (float, None, True)},
    "renewal_function": {"grid": (_floats, None, True)},
    "key_renewal": {
        "t": (float, None, True),
        "grid": (_floats, None, True),
        "g": (_pieces, None, True),
        "rel_tol": (float, 0.02, False),
    },
    "coupling": {
        "epsilon": (float, None, True),
        "steps_cap": (int, 10**7, False),
        "k_checks": (int, 100, False),
        "min_finite": (float, 0.99, False),
    },
    "stationarity_check": {
        "shifts": (_floats, None, True),
        "x": (float, 1.0, False),
        "alpha": (float, 0.01, False),
    },
    "flip_test": {
        "n": (int, None, True),
        "ones_needed": (int, 2, False),
        "alpha": (float, 0.01, False),
    },
}

_SPECLESS_KINDS = ("flip_test",)


def build_experiment_config(d: dict) -> ExperimentConfig:
    """Validate the full mapping and build an ExperimentConfig.

    Raises ConfigError on any unknown, missing, or malformed key, before
    any sampling starts.
    """
    used = set()
    kind = _take(d, used, "experiment", str, required=True)
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    spec = None
    if kind not in _SPECLESS_KINDS:
        spec = build_process_spec(d, used)
    n_rep = _take(d, used, "n_rep", int, default=1000)
    seed = _take(d, used, "seed", int, default=0)
    params = {}
    for name, (parser, default, required) in _KIND_PARAMS[kind].items():
        params[name] = _take(d, used, name, parser, default=default, required=required)
    unknown = set(d) - used
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    return ExperimentConfig(kind=kind, spec=spec, n_rep=n_rep, seed=seed, params=params)
