"""Row-indexed grid partitions of the parts of a k-partite graph.

A GridPartition assigns every vertex of part i to one of r rows; it is the
witness object for blow-up structure detection and extremality certificates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graph import PartiteGraph, Vertex


@dataclass(frozen=True)
class GridPartition:
    k: int
    rows: int
    # groups[(part, row)] -> sorted tuple of vertices; part, row are 1-based
    groups: dict[tuple[int, int], tuple[Vertex, ...]]

    def group(self, part: int, row: int) -> tuple[Vertex, ...]:
        return self.groups[(part, row)]

    def validate(self, g: PartiteGraph) -> None:
        """Check the groups partition each part of g exactly."""
        if self.k != g.k:
            raise ValueError(f"partition has k={self.k}, graph has k={g.k}")
        for part in range(1, g.k + 1):
            seen: list[Vertex] = []
            for row in range(1, self.rows + 1):
                grp = self.groups.get((part, row), ())
                for v in grp:
                    if v[0] != part:
                        raise ValueError(f"vertex {v} filed under part {part}")
                seen.extend(grp)
            if sorted(seen) != g.part_vertices(part):
                raise ValueError(f"groups do not partition part {part}")
            if len(seen) != len(set(seen)):
                raise ValueError(f"duplicate vertex in part {part} groups")

    def to_json(self) -> str:
        ordered = []
        for part in range(1, self.k + 1):
            for row in range(1, self.rows + 1):
                grp = self.groups.get((part, row), ())
                ordered.append([list(v) for v in sorted(grp)])
        return json.dumps({"rows": self.rows, "groups": ordered},
                          separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GridPartition":
        data = json.loads(text)
        rows = data["rows"]
        flat = data["groups"]
        if len(flat) % rows != 0:
            raise ValueError("group list length not a multiple of rows")
        k = len(flat) // rows
        groups = {}
        for part in range(1, k + 1):
            for row in range(1, rows + 1):
                grp = flat[(part - 1) * rows + (row - 1)]
                groups[(part, row)] = tuple(sorted(tuple(v) for v in grp))
        return cls(k=k, rows=rows, groups=groups)

    @classmethod
    def from_assignment(cls, g: PartiteGraph, rows: int,
                        row_of: dict[Vertex, int]) -> "GridPartition":
        groups: dict[tuple[int, int], list[Vertex]] = {
            (p, r): [] for p in range(1, g.k + 1) for r in range(1, rows + 1)}
        for v, r in row_of.items():
            groups[(v[0], r)].append(v)
        return cls(k=g.k, rows=rows,
                   groups={key: tuple(sorted(vs)) for key, vs in groups.items()})
