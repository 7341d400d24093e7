"""DIMACS edge-format reader and writer.

Files carry a ``p edge N M`` header and ``e u v`` lines with 1-based
labels. Comment lines start with ``c``. Duplicate edges are merged on read
and counted; self-loops are rejected.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, TextIO

from .errors import GraphError
from .graph import Graph

log = logging.getLogger(__name__)


def parse_dimacs(lines: Iterable[str]) -> tuple[Graph, int]:
    """Parse DIMACS text; returns the graph and the number of merged duplicates."""
    n = None
    declared = None
    edges: set[tuple[int, int]] = set()
    duplicates = 0
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise GraphError(f"line {lineno}: second problem line")
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise GraphError(f"line {lineno}: expected 'p edge N M'")
            n, declared = int(parts[2]), int(parts[3])
        elif parts[0] == "e":
            if n is None:
                raise GraphError(f"line {lineno}: edge before problem line")
            if len(parts) != 3:
                raise GraphError(f"line {lineno}: expected 'e u v'")
            u, v = int(parts[1]) - 1, int(parts[2]) - 1
            if u == v:
                raise GraphError(f"line {lineno}: self-loop at vertex {u + 1}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"line {lineno}: vertex label outside 1..{n}")
            e = (min(u, v), max(u, v))
            if e in edges:
                duplicates += 1
            edges.add(e)
        else:
            raise GraphError(f"line {lineno}: unknown record type {parts[0]!r}")
    if n is None:
        raise GraphError("missing 'p edge N M' line")
    if duplicates:
        log.warning("merged %d duplicate edge(s)", duplicates)
    if declared != len(edges) + duplicates:
        log.warning("header declares %d edges, found %d", declared, len(edges) + duplicates)
    return Graph(n, edges), duplicates


def format_dimacs(g: Graph, comments: Iterable[str] = ()) -> str:
    out = [f"c {c}" for c in comments]
    out.append(f"p edge {g.vertex_count} {g.edge_count}")
    out.extend(f"e {u + 1} {v + 1}" for u, v in g.sorted_edges())
    return "\n".join(out) + "\n"


def read_dimacs(path: str | Path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_dimacs(fh)[0]


def write_dimacs(g: Graph, dest: str | Path | TextIO, comments: Iterable[str] = ()) -> None:
    text = format_dimacs(g, comments)
    if hasattr(dest, "write"):
        dest.write(text)
        return
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
