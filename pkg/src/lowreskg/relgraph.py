"""Relation graphs: which relation pairs share entities, and on which sides.

Nodes are the ``2 * B`` non-identity relations of an augmented graph. A
directed edge ``(a, s1-to-s2, b)`` exists when the side-s1 entity set of
relation ``a`` intersects the side-s2 entity set of relation ``b``; the
edge set is therefore closed under reversal ``(b, s2-to-s1, a)``.
Construction uses boolean sparse incidence products (one head and one tail
incidence matrix, four products); tests hold the pairwise set-intersection
oracle against it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, NamedTuple, TextIO

import numpy as np
import scipy.sparse as sp

from .errors import ContractError, ParseError
from .kg import KnowledgeGraph


class InteractionType(Enum):
    H2H = "h2h"
    H2T = "h2t"
    T2H = "t2h"
    T2T = "t2t"

    @property
    def src_side(self) -> str:
        return self.value[0]

    @property
    def dst_side(self) -> str:
        return self.value[2]

    def reverse(self) -> "InteractionType":
        """Type of the reversed edge: s1-to-s2 becomes s2-to-s1."""
        return InteractionType(self.value[2] + "2" + self.value[0])

    def flip_src(self) -> "InteractionType":
        """Type seen from the source's inverse relation (head/tail swap)."""
        return InteractionType(_OPP[self.value[0]] + "2" + self.value[2])

    def flip_dst(self) -> "InteractionType":
        """Type seen toward the target's inverse relation (head/tail swap)."""
        return InteractionType(self.value[0] + "2" + _OPP[self.value[2]])

    @staticmethod
    def of(src_side: str, dst_side: str) -> "InteractionType":
        return InteractionType(f"{src_side}2{dst_side}")


_OPP = {"h": "t", "t": "h"}

INTERACTION_ORDER = (InteractionType.H2H, InteractionType.H2T, InteractionType.T2H, InteractionType.T2T)
INTERACTION_INDEX = {it: i for i, it in enumerate(INTERACTION_ORDER)}


class InteractionEdge(NamedTuple):
    src: int
    itype: InteractionType
    dst: int

    def reversed(self) -> "InteractionEdge":
        return InteractionEdge(self.dst, self.itype.reverse(), self.src)


def _edge_sort_key(e: InteractionEdge) -> tuple[int, int, int]:
    return (e.src, INTERACTION_INDEX[e.itype], e.dst)


@dataclass(frozen=True)
class RelationGraph:
    node_count: int
    edges: frozenset[InteractionEdge]
    # edges added by prompting rather than observed topology; always a subset
    injected: frozenset[InteractionEdge] = frozenset()

    def __post_init__(self):
        if not self.injected <= self.edges:
            raise ContractError("injected edges must be a subset of the edge set")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def topological_edges(self) -> frozenset[InteractionEdge]:
        """Edges backed by observed triples (injected prompting edges excluded)."""
        return self.edges - self.injected

    def __contains__(self, edge: InteractionEdge) -> bool:
        return edge in self.edges

    def sorted_edges(self) -> list[InteractionEdge]:
        return sorted(self.edges, key=_edge_sort_key)

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(src, interaction_index, dst) int64 arrays in deterministic order."""
        rows = self.sorted_edges()
        if not rows:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), empty.copy()
        src = np.fromiter((e.src for e in rows), dtype=np.int64, count=len(rows))
        ity = np.fromiter((INTERACTION_INDEX[e.itype] for e in rows), dtype=np.int64, count=len(rows))
        dst = np.fromiter((e.dst for e in rows), dtype=np.int64, count=len(rows))
        return src, ity, dst

    def incident(self, nodes: Iterable[int]) -> frozenset[InteractionEdge]:
        wanted = set(nodes)
        return frozenset(e for e in self.edges if e.src in wanted or e.dst in wanted)


def symmetry_closure(edges: Iterable[InteractionEdge]) -> frozenset[InteractionEdge]:
    """Close an edge set under reversal."""
    out = set()
    for e in edges:
        out.add(e)
        out.add(e.reversed())
    return frozenset(out)


def _incidence(kg: KnowledgeGraph) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Boolean head/tail incidence over the 2B relation nodes (identity dropped)."""
    n_nodes = 2 * kg.base_relation_count
    heads, rels, tails = kg.edge_arrays(include_identity=False)
    data = np.ones(len(rels), dtype=np.int8)
    h_inc = sp.csr_matrix((data, (rels, heads)), shape=(n_nodes, kg.num_entities))
    t_inc = sp.csr_matrix((data, (rels, tails)), shape=(n_nodes, kg.num_entities))
    h_inc.data[:] = 1
    t_inc.data[:] = 1
    return h_inc, t_inc


def build_relation_graph(kg: KnowledgeGraph, self_loops: bool = True) -> RelationGraph:
    """Build the interaction graph of an augmented knowledge graph.

    Four boolean incidence products decide all edges at once. With
    ``self_loops=False`` the a == b edges are dropped.
    """
    if not kg.augmented:
        raise ContractError("relation graph requires an augmented graph")
    n_nodes = 2 * kg.base_relation_count
    h_inc, t_inc = _incidence(kg)
    sides = {"h": h_inc, "t": t_inc}
    edges: set[InteractionEdge] = set()
    for itype in INTERACTION_ORDER:
        prod = (sides[itype.src_side] @ sides[itype.dst_side].T).tocoo()
        for a, b in zip(prod.row, prod.col):
            if not self_loops and a == b:
                continue
            edges.add(InteractionEdge(int(a), itype, int(b)))
    return RelationGraph(n_nodes, frozenset(edges))


def inject_edges(rg: RelationGraph, extra: Iterable[InteractionEdge]) -> RelationGraph:
    """Union graph with reversal-symmetry closure applied to the injected edges.

    Edges already present stay classified as topological; only genuinely new
    ones are recorded as injected.
    """
    closed = symmetry_closure(extra)
    for e in closed:
        if not (0 <= e.src < rg.node_count and 0 <= e.dst < rg.node_count):
            raise ContractError(f"injected edge {e} references an out-of-range relation node")
    new = closed - rg.edges
    return RelationGraph(rg.node_count, rg.edges | new, rg.injected | new)


def relation_graph_to_tsv(rg: RelationGraph, relation_names: Iterable[str]) -> str:
    """TSV rows src_relation<TAB>interaction<TAB>dst_relation in sorted order."""
    names = tuple(relation_names)
    if len(names) < rg.node_count:
        raise ContractError("need one name per relation node")
    lines = [f"{names[e.src]}\t{e.itype.value}\t{names[e.dst]}" for e in rg.sorted_edges()]
    return "\n".join(lines) + ("\n" if lines else "")


def relation_graph_from_tsv(text: TextIO | str, relation_names: Iterable[str]) -> RelationGraph:
    names = tuple(relation_names)
    ids = {name: i for i, name in enumerate(names)}
    lines = text.splitlines() if isinstance(text, str) else [ln.rstrip("\n") for ln in text]
    edges = set()
    for lineno, line in enumerate(lines, start=1):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}")
        src, itype, dst = fields
        if src not in ids or dst not in ids:
            raise ParseError(f"line {lineno}: unknown relation name")
        try:
            it = InteractionType(itype)
        except ValueError as exc:
            raise ParseError(f"line {lineno}: unknown interaction {itype!r}") from exc
        edges.add(InteractionEdge(ids[src], it, ids[dst]))
    return RelationGraph(len(names), frozenset(edges))
