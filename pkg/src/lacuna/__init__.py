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
lacuna: vacant sets of random walks on random regular graphs

Graph generation and assumption checks, random walks and bridges, exact
potential-theory oracles, tree interlacements, piecewise walk measures and
vacant-cluster analysis, with an experiment command line on top.
"""

__version__ = "0.1.0"

from .exceptions import (
    LacunaError,
    ValidationError,
    ParseError,
    ConfigError,
    GraphGenerationError,
    NumericalError,
    SamplingError,
    BoundViolation,
)
from .models import RegularGraph, VertexSet, Trajectory, VacantConfig
from .graph import generate_random_regular, check_assumptions, spectral_gap, read_graph, write_graph
from .walk import sample_walk, sample_bridge, vacant_set
from .interlace import u_star, params as interlacement_params
from .vacancy import components
from .config import load_experiment_config

__all__ = [
    # Models
    "RegularGraph",
    "VertexSet",
    "Trajectory",
    "VacantConfig",
    # Operations
    "generate_random_regular",
    "check_assumptions",
    "spectral_gap",
    "read_graph",
    "write_graph",
    "sample_walk",
    "sample_bridge",
    "vacant_set",
    "u_star",
    "interlacement_params",
    "components",
    "load_experiment_config",
    # Exceptions
    "LacunaError",
    "ValidationError",
    "ParseError",
    "ConfigError",
    "GraphGenerationError",
    "NumericalError",
    "SamplingError",
    "BoundViolation",
]
