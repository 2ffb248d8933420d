# Copyright 2025 The lacuna Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Experiment configuration files.

One `key = value` per line; `#` starts a comment. Command-line flags
override file values.
"""

import dataclasses
import math
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from .exceptions import ConfigError, ValidationError
from .models import ExperimentConfig


def parse_seeds(spec: str) -> List[int]:
    """
    Parse a seed specification into sorted explicit seeds.

    Supports formats:
    - "20" (a count: seeds 0..19)
    - "3-7" (inclusive range: 3, 4, 5, 6, 7)
    - "1,4,9" (comma-separated list)
    - "0-9,25" (mixed ranges and lists)

    Raises:
        ValueError: If the specification is invalid
    """
    spec = spec.strip()
    if not spec:
        raise ValueError("empty seed specification")
    if "," not in spec and "-" not in spec:
        try:
            count = int(spec)
        except ValueError as e:
            raise ValueError(f"Invalid seed count '{spec}'") from e
        if count < 0:
            raise ValueError(f"Invalid seed count {count}")
        return list(range(count))

    seeds = set()
    for part in (p.strip() for p in spec.split(",")):
        if "-" in part:
            try:
                start, end = (int(x.strip()) for x in part.split("-", 1))
            except ValueError as e:
                raise ValueError(f"Invalid seed range '{part}'") from e
            if start > end:
                raise ValueError(f"Invalid seed range: {start} > {end}")
            seeds.update(range(start, end + 1))
        else:
            try:
                seeds.add(int(part))
            except ValueError as e:
                raise ValueError(f"Invalid seed '{part}'") from e
    return sorted(seeds)


def parse_u_grid(spec: str) -> List[float]:
    """
    Parse a u-grid: "0.5,1,2" or "start:stop:step" with stop included.

    Raises:
        ValueError: If the specification is invalid
    """
    spec = spec.strip()
    if not spec:
        return []
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"Invalid u range '{spec}', expected start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"Invalid u range '{spec}'")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return [float(p) for p in spec.split(",") if p.strip()]


def _optional_path(value: str) -> str:
    if not value:
        raise ValueError("empty path")
    return value


# key -> (ExperimentConfig field, converter)
_KEYS: Dict[str, tuple] = {
    "command": ("command", str),
    "n": ("n", int),
    "d": ("d", int),
    "replicas": ("replicas", int),
    "threads": ("threads", int),
    "seed": ("seed", int),
    "u": ("u_grid", parse_u_grid),
    "seeds": ("seeds", parse_seeds),
    "gamma": ("gamma", float),
    "delta": ("delta", float),
    "alpha1": ("alpha1", float),
    "alpha2": ("alpha2", float),
    "kappa": ("kappa", float),
    "beta": ("beta", float),
    "T": ("T", float),
    "ell": ("ell", float),
    "s": ("s", int),
    "K": ("K", float),
    "r": ("r", int),
    "variant": ("variant", str),
    "out": ("out", _optional_path),
}


def parse_config_text(text: str) -> Tuple[Dict[str, Any], Dict[str, int]]:
    """
    Parse config text into ExperimentConfig field values.

    Returns:
        (values, lines) keyed by field name; lines gives each field's line number

    Raises:
        ConfigError: On unknown or duplicate keys and malformed values
    """
    values: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    seen: Dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError("unknown key", line=lineno, key=key)
        if key in seen:
            raise ConfigError(f"duplicate key (first set on line {seen[key]})", line=lineno, key=key)
        seen[key] = lineno
        name, convert = _KEYS[key]
        try:
            values[name] = convert(value)
            lines[name] = lineno
        except ValueError as e:
            raise ConfigError(f"malformed value '{value}': {e}", line=lineno, key=key) from e
    return values, lines


def load_experiment_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> ExperimentConfig:
    """
    Build a validated ExperimentConfig from a file and flag overrides.

    Overrides use ExperimentConfig field names; None values are ignored.

    Raises:
        ConfigError: On grammar violations or out-of-range values
    """
    values: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from e
        values, lines = parse_config_text(text)
    for name, value in (overrides or {}).items():
        if value is not None:
            values[name] = value
            lines.pop(name, None)

    config = ExperimentConfig(**values)
    try:
        config.validate()
    except ValidationError as e:
        field = _failing_field(str(e))
        key = _FIELD_TO_KEY.get(field, field) if field else None
        raise ConfigError(str(e), line=lines.get(field), key=key) from e
    return config


_FIELD_TO_KEY = {field: key for key, (field, _) in _KEYS.items()}


def _failing_field(message: str) -> Optional[str]:
    """Field named by the first word of a validation message."""
    first = message.split(" ", 1)[0]
    for field in (f.name for f in dataclasses.fields(ExperimentConfig)):
        if first in (field, field.replace("_", "-")):
            return field
    return None
