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
Exception classes for lacuna sampling, oracle and verification errors.
"""

from typing import Optional


class LacunaError(Exception):
    """Base exception for all lacuna errors."""


class ValidationError(LacunaError):
    """Raised when an argument or precondition is invalid."""


class ParseError(LacunaError):
    """Raised when parsing a graph or config file fails."""


class DisconnectedSetError(ValidationError):
    """Raised when a vertex set that must be connected is not."""


class OracleSizeError(ValidationError):
    """Raised when an exact oracle is asked for too many states."""


class InsufficientSegmentsError(ValidationError):
    """Raised when a segment bundle is too short for the requested level."""


class ConfigError(ValidationError):
    """Raised when an experiment config violates the grammar."""

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        location = []
        if line is not None:
            location.append(f"line {line}")
        if key is not None:
            location.append(f"key '{key}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class GraphGenerationError(LacunaError):
    """Raised when the configuration model exhausts its restart budget."""


class NumericalError(LacunaError):
    """Raised when a linear-algebra computation fails."""


class SpectralError(NumericalError):
    """Raised when the eigensolver does not converge."""


class SingularSystemError(NumericalError):
    """Raised when a hitting-time or harmonic system is singular."""


class QuasiStationaryError(NumericalError):
    """Raised when the killed-chain power iteration does not converge."""


class SamplingError(LacunaError):
    """Raised when a sampler cannot produce a draw."""


class BridgeTruncationError(SamplingError):
    """Raised when the bridge jump-count truncation exceeds its budget."""


class UnreachableEndpointError(SamplingError):
    """Raised when a bridge endpoint has zero conditioning weight."""


class BoundViolation(LacunaError):
    """Raised when a checked identity or inequality fails."""
