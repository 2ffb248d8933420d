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
Graph text format.

Line 1 holds "n d". Each following line holds one undirected edge "u v"
with u < v, 0-indexed, in ascending (u, v) order, n*d/2 lines in total.
"""

from pathlib import Path
from typing import List, Tuple, Union

from ..exceptions import ParseError, ValidationError
from ..models import RegularGraph


def format_graph(g: RegularGraph) -> str:
    lines = [f"{g.n} {g.d}"]
    lines.extend(f"{u} {v}" for u, v in g.edges().tolist())
    return "\n".join(lines) + "\n"


def _parse_pair(line: str, lineno: int, source: str) -> Tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise ParseError(f"{source}:{lineno}: expected two integers, got '{line.strip()}'")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as e:
        raise ParseError(f"{source}:{lineno}: expected two integers, got '{line.strip()}'") from e


def parse_graph(text: str, source: str = "<string>") -> RegularGraph:
    """
    Parse the graph text format.

    Raises:
        ParseError: With the offending line number
    """
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError(f"{source}:1: missing header 'n d'")

    n, d = _parse_pair(lines[0], 1, source)
    if n <= 0 or d <= 0:
        raise ParseError(f"{source}:1: n and d must be positive, got {n} {d}")
    if (n * d) % 2:
        raise ParseError(f"{source}:1: n*d must be even, got n={n}, d={d}")

    expected = n * d // 2
    edges: List[Tuple[int, int]] = []
    previous = (-1, -1)
    for lineno, line in enumerate(lines[1:], start=2):
        u, v = _parse_pair(line, lineno, source)
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"{source}:{lineno}: vertex out of range 0..{n - 1}")
        if u >= v:
            raise ParseError(f"{source}:{lineno}: edge must satisfy u < v, got {u} {v}")
        if (u, v) <= previous:
            raise ParseError(f"{source}:{lineno}: edges must be in ascending order without repeats")
        previous = (u, v)
        edges.append((u, v))
    if len(edges) != expected:
        raise ParseError(f"{source}:{len(lines) + 1}: expected {expected} edges, got {len(edges)}")

    try:
        return RegularGraph.from_edges(n, d, edges)
    except ValidationError as e:
        raise ParseError(f"{source}: {e}") from e


def read_graph(path: Union[str, Path]) -> RegularGraph:
    path = Path(path)
    return parse_graph(path.read_text(encoding="utf-8"), source=str(path))


def write_graph(g: RegularGraph, path: Union[str, Path]):
    Path(path).write_text(format_graph(g), encoding="utf-8")
