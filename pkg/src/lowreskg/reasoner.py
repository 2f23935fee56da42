"""The two-level query-conditioned GNN reasoner.

Stage one message-passes over the relation graph, conditioning every
relation on the query relation (all-ones initialization at the query node).
Stage two re-encodes each relation with its role for the current query
(query / inverse-query / other) through a two-layer MLP, then message-passes
over the entity graph with element-wise-product messages and sum
aggregation, and finally a small MLP squashes candidate states into (0,1)
scores. No parameter depends on the vocabulary sizes, which is what lets a
trained model transfer to graphs with entirely new entities and relations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Mapping, Sequence

import numpy as np

from .errors import ContractError
from .kg import KnowledgeGraph
from .numeric import (
    ComputationRecord,
    Tensor,
    add,
    concat,
    edge_message_sum,
    index_select,
    matmul,
    mul,
    relu,
    sigmoid,
)
from .relgraph import RelationGraph


class IsolatedQueryWarning(UserWarning):
    """The query relation has no edges in the relation graph."""


class RoleIndex(IntEnum):
    QUERY = 0
    INVERSE_QUERY = 1
    OTHER = 2


def role_of(relation: int, r_q: int, base_relation_count: int) -> RoleIndex:
    if relation == r_q:
        return RoleIndex.QUERY
    inverse = r_q + base_relation_count if r_q < base_relation_count else r_q - base_relation_count
    if relation == inverse:
        return RoleIndex.INVERSE_QUERY
    return RoleIndex.OTHER


@dataclass(frozen=True)
class ModelConfig:
    d: int = 32
    layers_r: int = 4
    layers_e: int = 4
    # "query_relation": query entity starts from the encoded query-relation
    # vector; "ones": all-ones start (both keep the rest of the graph at zero)
    entity_init: str = "query_relation"

    def __post_init__(self):
        if self.d < 1 or self.layers_r < 1 or self.layers_e < 1:
            raise ContractError("dimension and layer counts must be >= 1")
        if self.entity_init not in ("query_relation", "ones"):
            raise ContractError(f"unknown entity_init {self.entity_init!r}")

    def as_dict(self) -> dict[str, object]:
        return {
            "d": self.d,
            "layers_r": self.layers_r,
            "layers_e": self.layers_e,
            "entity_init": self.entity_init,
        }

    @staticmethod
    def from_dict(raw: Mapping[str, object]) -> "ModelConfig":
        return ModelConfig(
            d=int(raw.get("d", 32)),
            layers_r=int(raw.get("layers_r", 4)),
            layers_e=int(raw.get("layers_e", 4)),
            entity_init=str(raw.get("entity_init", "query_relation")),
        )


def _uniform_init(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


@dataclass
class ModelParams:
    """All trainable tensors, keyed by name; sizes depend only on the config."""

    config: ModelConfig
    tensors: dict[str, np.ndarray] = field(default_factory=dict)

    @staticmethod
    def parameter_names(config: ModelConfig) -> list[str]:
        names = ["fund_emb", "role_emb", "role_w1", "role_w2"]
        names += [f"rel_w{i}" for i in range(config.layers_r)]
        names += [f"ent_w{i}" for i in range(config.layers_e)]
        names += ["score_w1", "score_b1", "score_w2", "score_b2"]
        return names

    @staticmethod
    def init(config: ModelConfig, seed: int = 0) -> "ModelParams":
        rng = np.random.Generator(np.random.PCG64(seed))
        d = config.d
        tensors: dict[str, np.ndarray] = {
            "fund_emb": _uniform_init(rng, (4, d), d),
            "role_emb": _uniform_init(rng, (3, d), d),
            "role_w1": _uniform_init(rng, (2 * d, d), 2 * d),
            "role_w2": _uniform_init(rng, (d, d), d),
        }
        for i in range(config.layers_r):
            tensors[f"rel_w{i}"] = _uniform_init(rng, (d, d), d)
        for i in range(config.layers_e):
            tensors[f"ent_w{i}"] = _uniform_init(rng, (d, d), d)
        tensors["score_w1"] = _uniform_init(rng, (d, d), d)
        tensors["score_b1"] = _uniform_init(rng, (d,), d)
        tensors["score_w2"] = _uniform_init(rng, (d, 1), d)
        tensors["score_b2"] = _uniform_init(rng, (1,), d)
        return ModelParams(config, tensors)

    def num_scalars(self) -> int:
        return sum(v.size for v in self.tensors.values())

    def mount(self, record: ComputationRecord) -> dict[str, Tensor]:
        """Insert every parameter as a leaf of the given record."""
        return {name: record.leaf(self.tensors[name], op=f"param:{name}") for name in self.tensors}


def encode_relations(
    params: Mapping[str, Tensor],
    config: ModelConfig,
    r_q: int,
    rg: RelationGraph,
    record: ComputationRecord,
) -> Tensor:
    """Query-conditioned relation states over the relation graph, shape (2B, d).

    The query node starts all-ones, everything else zero; each layer sends
    state ⊙ interaction-type embedding along every edge, sum-aggregates,
    applies the linear combine and a residual, then ReLU.
    """
    n = rg.node_count
    if not 0 <= r_q < n:
        raise ContractError(f"query relation {r_q} is not a relation-graph node")
    src, etype, dst = rg.edge_arrays
    if len(src) == 0 or not ((src == r_q) | (dst == r_q)).any():
        warnings.warn(
            f"query relation {r_q} is isolated in the relation graph",
            IsolatedQueryWarning,
            stacklevel=2,
        )
    init = np.zeros((n, config.d))
    init[r_q] = 1.0
    h = record.constant(init)
    for layer in range(config.layers_r):
        agg = edge_message_sum(h, params["fund_emb"], src, etype, dst, n)
        h = relu(add(matmul(agg, params[f"rel_w{layer}"]), h))
    return h


def role_aware_encode(
    params: Mapping[str, Tensor],
    config: ModelConfig,
    relation_states: Tensor,
    r_q: int,
    record: ComputationRecord,
) -> Tensor:
    """Concatenate each relation state with its role embedding and MLP it."""
    n, d = relation_states.shape
    if d != config.d:
        raise ContractError(f"relation states have width {d}, expected {config.d}")
    if n % 2 != 0:
        raise ContractError("relation states must cover base and inverse relations")
    base = n // 2
    roles = np.fromiter((role_of(r, r_q, base) for r in range(n)), dtype=np.int64, count=n)
    role_rows = index_select(params["role_emb"], roles)
    joined = concat([relation_states, role_rows], axis=1)
    hidden = relu(matmul(joined, params["role_w1"]))
    return relu(matmul(hidden, params["role_w2"]))


def encode_entities(
    params: Mapping[str, Tensor],
    config: ModelConfig,
    e_q: int,
    r_q: int,
    relation_states: Tensor,
    kg: KnowledgeGraph,
    record: ComputationRecord,
) -> Tensor:
    """Query-conditioned entity states over the augmented graph, shape (|E|, d).

    Edges carry the (role-aware) state of their relation; messages are
    element-wise products, aggregation is a sum, and each layer ends with the
    linear combine, a residual, and ReLU. Identity-relation edges participate.
    """
    if not 0 <= e_q < kg.num_entities:
        raise ContractError(f"query entity {e_q} out of range")
    if not kg.augmented:
        raise ContractError("entity encoding requires an augmented graph")
    n_rel = kg.num_relations
    if relation_states.shape[0] == n_rel - 1:
        # relation-graph states exclude the identity relation; encode it as a
        # zero-signal "other" relation so its self-loop edges carry a learned
        # message rather than silently vanishing
        zero = record.constant(np.zeros((1, config.d)))
        other_row = index_select(params["role_emb"], np.array([RoleIndex.OTHER], dtype=np.int64))
        hidden = relu(matmul(concat([zero, other_row], axis=1), params["role_w1"]))
        ident = relu(matmul(hidden, params["role_w2"]))
        relation_states = concat([relation_states, ident], axis=0)
    elif relation_states.shape[0] != n_rel:
        raise ContractError(
            f"relation states cover {relation_states.shape[0]} relations, graph has {n_rel}"
        )
    if config.entity_init == "ones":
        h = record.constant(_one_hot_rows(kg.num_entities, e_q, config.d))
    else:
        mask = record.constant(_one_hot_rows(kg.num_entities, e_q, config.d))
        query_vec = index_select(relation_states, np.full(kg.num_entities, r_q, dtype=np.int64))
        h = mul(mask, query_vec)
    heads, rels, tails = kg.edge_arrays(include_identity=True)
    for layer in range(config.layers_e):
        agg = edge_message_sum(h, relation_states, heads, rels, tails, kg.num_entities)
        h = relu(add(matmul(agg, params[f"ent_w{layer}"]), h))
    return h


def _one_hot_rows(n: int, row: int, d: int) -> np.ndarray:
    out = np.zeros((n, d))
    out[row] = 1.0
    return out


def score_query(
    params: Mapping[str, Tensor],
    entity_states: Tensor,
    candidates: Sequence[int] | np.ndarray | None = None,
) -> Tensor:
    """Sigmoid MLP scores in (0,1), one per candidate (all entities if None)."""
    if candidates is None:
        rows = entity_states
    else:
        idx = np.asarray(candidates, dtype=np.int64)
        if len(idx) and (idx.min() < 0 or idx.max() >= entity_states.shape[0]):
            raise ContractError("candidate entity id out of range")
        rows = index_select(entity_states, idx)
    hidden = relu(add(matmul(rows, params["score_w1"]), params["score_b1"]))
    logits = add(matmul(hidden, params["score_w2"]), params["score_b2"])
    return sigmoid(logits)


def score_candidates(
    model: ModelParams,
    kg: KnowledgeGraph,
    rg: RelationGraph,
    e_q: int,
    r_q: int,
    candidates: Sequence[int] | np.ndarray | None = None,
    record: ComputationRecord | None = None,
    params: Mapping[str, Tensor] | None = None,
) -> Tensor:
    """Full forward pass for one (entity, relation) query.

    Callers that need gradients pass their own record and mounted params;
    inference callers omit both and get a throwaway record.
    """
    if record is None:
        record = ComputationRecord()
    if params is None:
        params = model.mount(record)
    cfg = model.config
    rel_states = encode_relations(params, cfg, r_q, rg, record)
    rel_states = role_aware_encode(params, cfg, rel_states, r_q, record)
    ent_states = encode_entities(params, cfg, e_q, r_q, rel_states, kg, record)
    return score_query(params, ent_states, candidates)
