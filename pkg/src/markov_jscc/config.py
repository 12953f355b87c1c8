"""Run-configuration parsing for the command line front end.

A configuration is one JSON object. Chains are given inline or through the
two-parameter preset name ``W(p,q)``; unknown fields are rejected so typos
fail loudly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, MarkovJsccError
from .markov import JointChannelChain, SourceChain, StochasticMatrix, binary_chain

PRESET_PATTERN = re.compile(r"^W\(\s*([0-9.]+)\s*,\s*([0-9.]+)\s*\)$")

_CHAIN_KEYS = {"preset", "matrix", "initial", "x_size", "z_size"}
_TOP_KEYS = {
    "source",
    "channel",
    "n",
    "k",
    "k_min",
    "k_max",
    "k_step",
    "rate_ratio",
    "kinds",
    "theta_grid",
    "theta_prime_grid",
    "n_max",
}


def _reject_unknown(obj: dict, allowed: set, where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown field(s) {sorted(unknown)} in {where}")


def _parse_matrix(spec: dict, where: str) -> StochasticMatrix:
    if "preset" in spec:
        if "matrix" in spec:
            raise ConfigError(f"{where}: give either a preset or an inline matrix")
        m = PRESET_PATTERN.match(spec["preset"])
        if not m:
            raise ConfigError(
                f"{where}: preset {spec['preset']!r} does not match W(p,q)"
            )
        return binary_chain(float(m.group(1)), float(m.group(2)))
    if "matrix" not in spec:
        raise ConfigError(f"{where}: needs a preset or an inline matrix")
    try:
        return StochasticMatrix(np.array(spec["matrix"], dtype=float))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_initial(spec: dict):
    if "initial" in spec:
        return np.array(spec["initial"], dtype=float)
    return None


def build_source(spec: dict) -> SourceChain:
    if not isinstance(spec, dict):
        raise ConfigError("source must be an object")
    _reject_unknown(spec, _CHAIN_KEYS - {"x_size", "z_size"}, "source")
    matrix = _parse_matrix(spec, "source")
    try:
        return SourceChain(
            m_size=matrix.dim, matrix=matrix, initial=_parse_initial(spec)
        )
    except (MarkovJsccError, ValueError) as exc:
        raise ConfigError(f"source: {exc}") from exc


def build_channel(spec: dict) -> JointChannelChain:
    if not isinstance(spec, dict):
        raise ConfigError("channel must be an object")
    _reject_unknown(spec, _CHAIN_KEYS, "channel")
    matrix = _parse_matrix(spec, "channel")
    z_size = int(spec.get("z_size", 1))
    x_size = int(spec.get("x_size", matrix.dim // max(z_size, 1)))
    if x_size * z_size != matrix.dim:
        raise ConfigError(
            f"channel: x_size*z_size = {x_size * z_size} does not match the "
            f"matrix dimension {matrix.dim}"
        )
    try:
        return JointChannelChain(
            x_size=x_size, z_size=z_size, matrix=matrix, initial=_parse_initial(spec)
        )
    except (MarkovJsccError, ValueError) as exc:
        raise ConfigError(f"channel: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    source: SourceChain
    channel: JointChannelChain
    n: int | None
    k: int | None
    k_min: int | None
    k_max: int | None
    k_step: int
    rate_ratio: float | None
    kinds: tuple
    theta_grid: tuple
    theta_prime_grid: tuple
    n_max: int


def load_config(document) -> RunConfig:
    """Parse a JSON object (or already-decoded dict) into a RunConfig."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"configuration is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError("configuration must be a JSON object")
    _reject_unknown(document, _TOP_KEYS, "configuration")
    if "source" not in document or "channel" not in document:
        raise ConfigError("configuration needs both a source and a channel")

    def opt_int(key):
        return int(document[key]) if key in document else None

    kinds = document.get("kinds", ["direct_a2", "converse_a2"])
    if not isinstance(kinds, list):
        raise ConfigError("kinds must be a list")
    return RunConfig(
        source=build_source(document["source"]),
        channel=build_channel(document["channel"]),
        n=opt_int("n"),
        k=opt_int("k"),
        k_min=opt_int("k_min"),
        k_max=opt_int("k_max"),
        k_step=int(document.get("k_step", 1)),
        rate_ratio=(
            float(document["rate_ratio"]) if "rate_ratio" in document else None
        ),
        kinds=tuple(kinds),
        theta_grid=tuple(document.get("theta_grid", (0.3, -0.3, 0.7, -0.7))),
        theta_prime_grid=tuple(
            document.get("theta_prime_grid", (0.3, -0.3, 0.7, -0.7))
        ),
        n_max=int(document.get("n_max", 6)),
    )


def section6_source() -> SourceChain:
    return SourceChain(m_size=2, matrix=binary_chain(0.1, 0.2))


def section6_channel() -> JointChannelChain:
    return JointChannelChain(x_size=2, z_size=1, matrix=binary_chain(0.1, 0.2))
