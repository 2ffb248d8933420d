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
Pytest configuration and fixtures for lacuna tests.
"""

import sys
from pathlib import Path

import networkx as nx
import pytest

# Add src to path for imports
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

# pylint: disable=wrong-import-position
from lacuna.graph import complete_graph, generate_random_regular
from lacuna.models import RegularGraph
from lacuna.potential import MarkovChain


def from_networkx(nx_graph) -> RegularGraph:
    """Convert a regular networkx graph with integer labels 0..n-1."""
    n = nx_graph.number_of_nodes()
    degrees = {deg for _, deg in nx_graph.degree()}
    assert len(degrees) == 1
    return RegularGraph.from_edges(n, degrees.pop(), nx_graph.edges())


@pytest.fixture
def k4():
    """The complete graph K4, the only simple 3-regular graph on 4 vertices."""
    return complete_graph(4)


@pytest.fixture
def k5():
    """The complete graph K5 as a 4-regular graph."""
    return complete_graph(5)


@pytest.fixture
def petersen():
    """The Petersen graph: 3-regular, 10 vertices, girth 5."""
    return from_networkx(nx.petersen_graph())


@pytest.fixture
def tutte_coxeter():
    """The Tutte-Coxeter graph: 3-regular, 30 vertices, girth 8."""
    return from_networkx(nx.LCF_graph(30, [-13, -9, 7, -7, 9, 13], 5))


@pytest.fixture
def two_k4():
    """Two disjoint copies of K4: 3-regular and disconnected."""
    edges = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    return RegularGraph.from_edges(8, 3, edges + [(a + 4, b + 4) for a, b in edges])


@pytest.fixture(scope="session")
def cubic200():
    """A random 3-regular graph on 200 vertices."""
    return generate_random_regular(200, 3, seed=11)


@pytest.fixture(scope="session")
def cubic1000():
    """A random 3-regular graph on 1000 vertices."""
    return generate_random_regular(1000, 3, seed=3)


@pytest.fixture
def ruin_chain():
    """Birth-death chain on 0..3 stepping up with probability 1/3 (drift ratio q = 2)."""
    return MarkovChain.birth_death(3, 1.0 / 3.0)
