"""Typed path templates over the hierarchy/nearness schema."""

from __future__ import annotations

from dataclasses import dataclass

INCLUDE = "include"
NEAR = "near"

#: directed type-level schema: (src_type, relation, dst_type)
SCHEMA = frozenset(
    {
        ("nation", INCLUDE, "state"),
        ("state", INCLUDE, "county"),
        ("county", INCLUDE, "city"),
        ("state", NEAR, "state"),
        ("county", NEAR, "county"),
        ("city", NEAR, "city"),
    }
)


@dataclass(frozen=True)
class MetaPath:
    """Alternating node types and relations: types[i] -relations[i]-> types[i+1]."""

    node_types: tuple[str, ...]
    relations: tuple[str, ...]

    def __post_init__(self):
        if len(self.node_types) != len(self.relations) + 1:
            raise ValueError("need one more node type than relations")
        if not self.relations:
            raise ValueError("empty meta-path")
        for src, rel, dst in zip(self.node_types, self.relations, self.node_types[1:]):
            if (src, rel, dst) not in SCHEMA:
                raise ValueError(f"step {src} -{rel}-> {dst} not allowed by schema")

    @property
    def length(self) -> int:
        return len(self.relations)

    @property
    def final_relation(self) -> str:
        return self.relations[-1]

    def suffix_from(self, node_type: str) -> "MetaPath":
        """Sub-path starting at the first occurrence of ``node_type``."""
        try:
            i = self.node_types.index(node_type)
        except ValueError:
            raise ValueError(f"type {node_type!r} not on path {self.node_types}") from None
        if i == len(self.node_types) - 1:
            raise ValueError(f"type {node_type!r} only terminates path {self.node_types}")
        return MetaPath(self.node_types[i:], self.relations[i:])


P1 = MetaPath(("county", "city", "city"), (INCLUDE, NEAR))
P2 = MetaPath(("state", "county", "county"), (INCLUDE, NEAR))
P3 = MetaPath(("nation", "state", "state"), (INCLUDE, NEAR))

#: built-in guidance: which template drives encoding at each level
GUIDING_PATHS = {"city": P1, "county": P2, "state": P3}
