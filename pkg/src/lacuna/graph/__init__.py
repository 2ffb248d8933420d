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
Regular graph module for lacuna.

Generation, structural queries, spectral checks and the text format.
"""

from .generator import complete_graph, generate_random_regular, join_with_bottleneck, restart_budget
from .io import format_graph, parse_graph, read_graph, write_graph
from .spectral import check_assumptions, cheeger_check, spectral_gap
from .structure import (
    a1_violations,
    as_vertex_set,
    ball,
    ball_distances,
    ball_of_set,
    ball_tree_excess,
    count_treelike_balls,
    distances_from_set,
    edge_boundary,
    exterior_boundary,
    girth,
    induced_edge_count,
    interior_boundary,
    is_connected_set,
    isoperimetric_profile,
    max_sampled_tree_excess,
    sample_connected_set,
    sphere,
    tree_excess,
    treelike_radius,
)

__all__ = [
    "a1_violations",
    "as_vertex_set",
    "ball",
    "ball_distances",
    "ball_of_set",
    "ball_tree_excess",
    "check_assumptions",
    "cheeger_check",
    "complete_graph",
    "count_treelike_balls",
    "distances_from_set",
    "edge_boundary",
    "exterior_boundary",
    "format_graph",
    "generate_random_regular",
    "girth",
    "induced_edge_count",
    "interior_boundary",
    "is_connected_set",
    "isoperimetric_profile",
    "join_with_bottleneck",
    "max_sampled_tree_excess",
    "parse_graph",
    "read_graph",
    "restart_budget",
    "sample_connected_set",
    "spectral_gap",
    "sphere",
    "tree_excess",
    "treelike_radius",
    "write_graph",
]
