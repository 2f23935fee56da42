"""Knowledge-graph loading, validation, and inverse/identity augmentation.

A graph owns dense entity/relation vocabularies plus a deduplicated triple
list. Augmentation adds one inverse relation per base relation and a single
identity relation, so an augmented graph has ``2 * B + 1`` relations and
``2 * |T| + |E|`` triples. Graphs are immutable; every derived view
(masked graphs, task graphs) is a new object sharing the vocabularies.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, TextIO

import numpy as np

from .errors import ContractError, ParseError, VocabularyError

IDENTITY_NAME = "__identity__"
INVERSE_SUFFIX = "^-1"


class Triple(NamedTuple):
    head: int
    relation: int
    tail: int


@dataclass(frozen=True)
class KnowledgeGraph:
    entity_names: tuple[str, ...]
    relation_names: tuple[str, ...]
    triples: tuple[Triple, ...]
    augmented: bool = False
    base_relation_count: int = 0
    # bookkeeping from parsing, not part of graph identity
    duplicates_dropped: int = field(default=0, compare=False)

    def __post_init__(self):
        if not self.augmented and self.base_relation_count != len(self.relation_names):
            object.__setattr__(self, "base_relation_count", len(self.relation_names))

    @property
    def num_entities(self) -> int:
        return len(self.entity_names)

    @property
    def num_relations(self) -> int:
        return len(self.relation_names)

    @property
    def num_triples(self) -> int:
        return len(self.triples)

    @property
    def identity_relation(self) -> int:
        if not self.augmented:
            raise ContractError("identity relation exists only in augmented graphs")
        return 2 * self.base_relation_count

    def inverse_of(self, relation: int) -> int:
        """Inverse relation id; an involution on the 2B non-identity ids."""
        if not self.augmented:
            raise ContractError("inverse ids exist only in augmented graphs")
        b = self.base_relation_count
        if not 0 <= relation < 2 * b:
            raise ContractError(f"relation {relation} has no inverse (identity or out of range)")
        return relation + b if relation < b else relation - b

    @cached_property
    def triple_set(self) -> frozenset[Triple]:
        return frozenset(self.triples)

    @cached_property
    def answers(self) -> dict[tuple[int, int], frozenset[int]]:
        """(head, relation) -> set of true tails, over the stored triples."""
        acc: dict[tuple[int, int], set[int]] = {}
        for h, r, t in self.triples:
            acc.setdefault((h, r), set()).add(t)
        return {k: frozenset(v) for k, v in acc.items()}

    def edge_arrays(self, include_identity: bool = True) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Triples as (heads, relations, tails) int64 arrays, in stored order."""
        if include_identity or not self.augmented:
            rows = self.triples
        else:
            ident = self.identity_relation
            rows = [t for t in self.triples if t.relation != ident]
        if not rows:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), empty.copy()
        arr = np.asarray(rows, dtype=np.int64)
        return arr[:, 0], arr[:, 1], arr[:, 2]

    def base_triples(self) -> tuple[Triple, ...]:
        """The non-augmented triples (relation id < base count)."""
        b = self.base_relation_count
        return tuple(t for t in self.triples if t.relation < b)

    def relations_with_triples(self) -> tuple[int, ...]:
        return tuple(sorted({t.relation for t in self.triples}))


def _validate_ids(triples: Iterable[Triple], n_entities: int, n_relations: int) -> None:
    for h, r, t in triples:
        if not (0 <= h < n_entities and 0 <= t < n_entities):
            raise ContractError(f"entity id out of range in triple {(h, r, t)}")
        if not 0 <= r < n_relations:
            raise ContractError(f"relation id out of range in triple {(h, r, t)}")


def make_kg(
    entity_names: Iterable[str],
    relation_names: Iterable[str],
    triples: Iterable[tuple[int, int, int]],
    duplicates_dropped: int = 0,
) -> KnowledgeGraph:
    """Build a non-augmented graph, deduplicating triples (first occurrence wins)."""
    ents = tuple(entity_names)
    rels = tuple(relation_names)
    seen: set[Triple] = set()
    uniq: list[Triple] = []
    dropped = duplicates_dropped
    for raw in triples:
        t = Triple(*raw)
        if t in seen:
            dropped += 1
            continue
        seen.add(t)
        uniq.append(t)
    _validate_ids(uniq, len(ents), len(rels))
    return KnowledgeGraph(ents, rels, tuple(uniq), duplicates_dropped=dropped)


def replace_triples(kg: KnowledgeGraph, triples: Iterable[tuple[int, int, int]]) -> KnowledgeGraph:
    """Same vocabularies, different (base) triple set; result is non-augmented."""
    base_rels = kg.relation_names[: kg.base_relation_count] if kg.augmented else kg.relation_names
    return make_kg(kg.entity_names, base_rels, triples)


def parse_triples(
    text: TextIO | str,
    entity_vocab: Iterable[str] | None = None,
    relation_vocab: Iterable[str] | None = None,
) -> KnowledgeGraph:
    """Parse a TSV triple stream (head<TAB>relation<TAB>tail per line).

    Names are interned in insertion order unless a frozen vocabulary is
    supplied, in which case unknown names raise VocabularyError. Duplicate
    lines are dropped and counted in ``duplicates_dropped``.
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    ent_frozen = entity_vocab is not None
    rel_frozen = relation_vocab is not None
    ent_vocab = tuple(entity_vocab) if ent_frozen else ()
    rel_vocab = tuple(relation_vocab) if rel_frozen else ()
    ent_ids: dict[str, int] = {name: i for i, name in enumerate(ent_vocab)}
    rel_ids: dict[str, int] = {name: i for i, name in enumerate(rel_vocab)}

    def intern(table: dict[str, int], name: str, frozen: bool, kind: str, lineno: int) -> int:
        if name in table:
            return table[name]
        if frozen:
            raise VocabularyError(f"line {lineno}: unknown {kind} name {name!r} under frozen vocabulary")
        table[name] = len(table)
        return table[name]

    triples: list[tuple[int, int, int]] = []
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n").rstrip("\r")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}")
        h, r, t = fields
        triples.append(
            (
                intern(ent_ids, h, ent_frozen, "entity", lineno),
                intern(rel_ids, r, rel_frozen, "relation", lineno),
                intern(ent_ids, t, ent_frozen, "entity", lineno),
            )
        )
    ent_names = ent_vocab if ent_frozen else tuple(ent_ids)
    rel_names = rel_vocab if rel_frozen else tuple(rel_ids)
    return make_kg(ent_names, rel_names, triples)


def serialize_triples(kg: KnowledgeGraph) -> str:
    """TSV text of the stored triples; parse(serialize(kg)) restores the triple set."""
    lines = []
    for h, r, t in kg.triples:
        lines.append(f"{kg.entity_names[h]}\t{kg.relation_names[r]}\t{kg.entity_names[t]}")
    return "\n".join(lines) + ("\n" if lines else "")


def augment_kg(kg: KnowledgeGraph) -> KnowledgeGraph:
    """Add inverse relations, one identity relation, and their triples.

    Inverse of base relation r is ``r + B``; the identity relation id is
    ``2 * B``. The result has ``2 * |T| + |E|`` triples.
    """
    if kg.augmented:
        raise ContractError("graph is already augmented")
    b = len(kg.relation_names)
    for name in kg.relation_names:
        if name.endswith(INVERSE_SUFFIX) or name == IDENTITY_NAME:
            raise ContractError(f"relation name {name!r} collides with augmentation naming")
    rel_names = (
        kg.relation_names
        + tuple(f"{name}{INVERSE_SUFFIX}" for name in kg.relation_names)
        + (IDENTITY_NAME,)
    )
    identity = 2 * b
    triples = list(kg.triples)
    triples.extend(Triple(t, r + b, h) for h, r, t in kg.triples)
    triples.extend(Triple(e, identity, e) for e in range(kg.num_entities))
    return KnowledgeGraph(
        kg.entity_names,
        rel_names,
        tuple(triples),
        augmented=True,
        base_relation_count=b,
        duplicates_dropped=kg.duplicates_dropped,
    )


def load_relation_descriptions(text: TextIO | str) -> dict[str, str]:
    """TSV relation_name<TAB>description -> mapping (last line wins)."""
    stream = io.StringIO(text) if isinstance(text, str) else text
    out: dict[str, str] = {}
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n").rstrip("\r")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(f"line {lineno}: expected 2 tab-separated fields, got {len(fields)}")
        out[fields[0]] = fields[1]
    return out


def load_relation_examples(text: TextIO | str) -> dict[str, tuple[str, str]]:
    """TSV relation_name<TAB>head_name<TAB>tail_name -> mapping (last line wins)."""
    stream = io.StringIO(text) if isinstance(text, str) else text
    out: dict[str, tuple[str, str]] = {}
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n").rstrip("\r")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}")
        out[fields[0]] = (fields[1], fields[2])
    return out
