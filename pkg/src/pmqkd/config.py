"""``key = value`` parameter files.

Blank lines and ``#`` comments are ignored. Missing keys take the defaults of
:class:`~pmqkd.channel.SystemParams`; unknown or malformed keys are errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .channel import Convention, Eq4Variant, SystemParams
from .errors import ConfigError

FLOAT_KEYS = (
    "dark_count_rate",
    "misalignment",
    "detector_efficiency",
    "error_correction_inefficiency",
    "attenuation_db_per_km",
    "intensity",
    "intrinsic_error",
)
KNOWN_KEYS = FLOAT_KEYS + ("channel_convention", "eq4_variant")


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams = field(default_factory=SystemParams)
    convention: Convention = Convention.PAPER_LITERAL

    def effective(self) -> dict:
        out = self.params.as_dict()
        out["channel_convention"] = self.convention.value
        return out


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}", key=key)
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}", key=key)
        if key in FLOAT_KEYS:
            try:
                num = float(value)
            except ValueError:
                raise ConfigError(f"{source}:{lineno}: {key}: cannot parse {value!r} as a number", key=key) from None
            if not math.isfinite(num):
                raise ConfigError(f"{source}:{lineno}: {key}: value must be finite", key=key)
            # check each key alone so the message names it
            try:
                SystemParams(**{key: num})
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: {key}: {exc}", key=key) from None
            values[key] = num
        elif key == "channel_convention":
            try:
                values[key] = Convention.parse(value)
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: {key}: {exc}", key=key) from None
        else:
            try:
                values[key] = Eq4Variant.parse(value)
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: {key}: {exc}", key=key) from None

    convention = values.pop("channel_convention", Convention.PAPER_LITERAL)
    return RunConfig(params=SystemParams(**values), convention=convention)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, str(path))
