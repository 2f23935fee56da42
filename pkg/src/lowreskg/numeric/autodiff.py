"""Minimal dense float64 tensors with tape-based reverse-mode differentiation.

A ComputationRecord is an append-only, topologically ordered list of
primitive ops; every Tensor is one node on exactly one record. Ops execute
eagerly and store a replay closure (so a record can recompute itself from
its leaves) plus an analytic vector-Jacobian closure used by
``gradients``. Only the operations the reasoner and training need exist:
no GPU, no general broadcasting, float64 throughout.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .. import backend
from ..errors import ContractError, NumericError, OracleError

Array = np.ndarray


def _as_f64(data) -> Array:
    arr = np.asarray(data, dtype=np.float64)
    return np.ascontiguousarray(arr)


class Tensor:
    """One node of a ComputationRecord holding a float64 ndarray."""

    __slots__ = ("record", "node", "data", "op", "parents", "_vjp", "_replay")

    def __init__(
        self,
        record: "ComputationRecord",
        node: int,
        data: Array,
        op: str,
        parents: tuple[int, ...],
        vjp: Callable[[Array], tuple[Array | None, ...]] | None,
        replay: Callable[..., Array] | None,
    ):
        self.record = record
        self.node = node
        self.data = data
        self.op = op
        self.parents = parents
        self._vjp = vjp
        self._replay = replay

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def item(self) -> float:
        return float(self.data.reshape(()))

    def __repr__(self) -> str:
        return f"Tensor(op={self.op!r}, shape={self.shape})"

    # sugar mirroring the functional ops
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)


class ComputationRecord:
    """Append-only op tape; node ids are topologically ordered by construction."""

    def __init__(self):
        self.nodes: list[Tensor] = []

    def __len__(self) -> int:
        return len(self.nodes)

    def _append(self, op, parents, data, vjp, replay) -> Tensor:
        t = Tensor(self, len(self.nodes), data, op, parents, vjp, replay)
        self.nodes.append(t)
        return t

    def leaf(self, data, op: str = "leaf") -> Tensor:
        arr = _as_f64(data)
        if not np.all(np.isfinite(arr)):
            raise NumericError("leaf tensor contains non-finite values", op=op)
        return self._append(op, (), arr, None, None)

    def constant(self, data) -> Tensor:
        return self.leaf(data, op="const")

    def replay(self) -> None:
        """Recompute every non-leaf node's data from current leaf values."""
        for t in self.nodes:
            if t._replay is not None:
                t.data = t._replay(*(self.nodes[p].data for p in t.parents))

    def ops(self) -> list[str]:
        return [t.op for t in self.nodes]


def _binary_record(a: Tensor, b: Tensor) -> ComputationRecord:
    if a.record is not b.record:
        raise ContractError("tensors belong to different computation records")
    return a.record


def _coerce(a: Tensor, other) -> Tensor | float:
    if isinstance(other, Tensor):
        return other
    if isinstance(other, (int, float, np.floating, np.integer)):
        return float(other)
    raise ContractError(f"unsupported operand type {type(other)!r}")


def add(a: Tensor, b) -> Tensor:
    b = _coerce(a, b)
    if isinstance(b, float):
        fwd = lambda x, c=b: x + c
        return a.record._append("add", (a.node,), fwd(a.data), lambda g: (g,), fwd)
    rec = _binary_record(a, b)
    if a.shape == b.shape:
        return rec._append(
            "add", (a.node, b.node), a.data + b.data, lambda g: (g, g), lambda x, y: x + y
        )
    if a.data.ndim == 2 and b.data.ndim == 1 and a.shape[1] == b.shape[0]:
        # row-bias broadcast
        return rec._append(
            "add",
            (a.node, b.node),
            a.data + b.data,
            lambda g: (g, g.sum(axis=0)),
            lambda x, y: x + y,
        )
    raise ContractError(f"add shapes {a.shape} and {b.shape} are not supported")


def sub(a: Tensor, b) -> Tensor:
    b = _coerce(a, b)
    if isinstance(b, float):
        return add(a, -b)
    return add(a, mul(b, -1.0))


def mul(a: Tensor, b) -> Tensor:
    """Elementwise product; the scalar variant covers constant rescaling."""
    b = _coerce(a, b)
    if isinstance(b, float):
        fwd = lambda x, c=b: x * c
        return a.record._append("mul", (a.node,), fwd(a.data), lambda g, c=b: (g * c,), fwd)
    rec = _binary_record(a, b)
    if a.shape != b.shape:
        raise ContractError(f"mul shapes {a.shape} and {b.shape} differ")
    ad, bd = a.data, b.data
    return rec._append(
        "mul", (a.node, b.node), ad * bd, lambda g: (g * bd, g * ad), lambda x, y: x * y
    )


def matmul(a: Tensor, b: Tensor) -> Tensor:
    rec = _binary_record(a, b)
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ContractError("matmul expects 2-D tensors")
    ad, bd = a.data, b.data
    return rec._append(
        "matmul",
        (a.node, b.node),
        ad @ bd,
        lambda g: (g @ bd.T, ad.T @ g),
        lambda x, y: x @ y,
    )


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    return x.record._append(
        "relu",
        (x.node,),
        np.where(mask, x.data, 0.0),
        lambda g, m=mask: (g * m,),
        lambda v: np.where(v > 0, v, 0.0),
    )


def _stable_sigmoid(v: Array) -> Array:
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    ev = np.exp(v[~pos])
    out[~pos] = ev / (1.0 + ev)
    return out


def sigmoid(x: Tensor) -> Tensor:
    y = _stable_sigmoid(x.data)
    return x.record._append(
        "sigmoid", (x.node,), y, lambda g, yy=y: (g * yy * (1.0 - yy),), _stable_sigmoid
    )


def log(x: Tensor) -> Tensor:
    xd = x.data
    return x.record._append("log", (x.node,), np.log(xd), lambda g: (g / xd,), np.log)


def clamp(x: Tensor, lo: float, hi: float) -> Tensor:
    mask = (x.data >= lo) & (x.data <= hi)
    return x.record._append(
        "clamp",
        (x.node,),
        np.clip(x.data, lo, hi),
        lambda g, m=mask: (g * m,),
        lambda v: np.clip(v, lo, hi),
    )


def tsum(x: Tensor) -> Tensor:
    shape = x.shape
    return x.record._append(
        "sum",
        (x.node,),
        np.asarray(x.data.sum()),
        lambda g, s=shape: (np.broadcast_to(g, s).astype(np.float64),),
        lambda v: np.asarray(v.sum()),
    )


def mean(x: Tensor) -> Tensor:
    return mul(tsum(x), 1.0 / x.data.size)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    if not tensors:
        raise ContractError("concat needs at least one tensor")
    rec = tensors[0].record
    for t in tensors[1:]:
        _binary_record(tensors[0], t)
    sizes = [t.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def vjp(g, sp=splits, ax=axis):
        return tuple(np.ascontiguousarray(p) for p in np.split(g, sp, axis=ax))

    return rec._append(
        "concat",
        tuple(t.node for t in tensors),
        np.concatenate([t.data for t in tensors], axis=axis),
        vjp,
        lambda *vals, ax=axis: np.concatenate(vals, axis=ax),
    )


def _rows_only(x: Tensor, op: str) -> None:
    if x.data.ndim != 2:
        raise ContractError(f"{op} expects a 2-D tensor, got shape {x.shape}")


def index_select(x: Tensor, index) -> Tensor:
    """Gather rows; the adjoint scatter-adds back into the source rows."""
    _rows_only(x, "index_select")
    idx = np.ascontiguousarray(np.asarray(index, dtype=np.int64))
    rows = x.shape[0]
    if len(idx) and (idx.min() < 0 or idx.max() >= rows):
        raise ContractError("index_select index out of range")
    return x.record._append(
        "index_select",
        (x.node,),
        x.data[idx],
        lambda g, i=idx, r=rows: (backend.scatter_add_rows(np.ascontiguousarray(g), i, r),),
        lambda v, i=idx: v[i],
    )


def scatter_sum(x: Tensor, index, num_out: int) -> Tensor:
    """Grouped row sum: out[index[i]] += x[i]; the GNN aggregation primitive."""
    _rows_only(x, "scatter_sum")
    idx = np.ascontiguousarray(np.asarray(index, dtype=np.int64))
    if len(idx) != x.shape[0]:
        raise ContractError("scatter_sum index length must match row count")
    if len(idx) and (idx.min() < 0 or idx.max() >= num_out):
        raise ContractError("scatter_sum index out of range")
    return x.record._append(
        "scatter_sum",
        (x.node,),
        backend.scatter_add_rows(x.data, idx, num_out),
        lambda g, i=idx: (np.ascontiguousarray(g[i]),),
        lambda v, i=idx, n=num_out: backend.scatter_add_rows(v, i, n),
    )


def edge_message_sum(
    node_state: Tensor,
    edge_emb: Tensor,
    src,
    etype,
    dst,
    num_out: int,
) -> Tensor:
    """Fused index_select ⊙ edge-type embedding followed by scatter_sum.

    Equivalent to ``scatter_sum(index_select(state, src) * index_select(emb,
    etype), dst, num_out)`` but runs as one kernel; this is the hot loop of
    both GNN stacks.
    """
    rec = _binary_record(node_state, edge_emb)
    _rows_only(node_state, "edge_message_sum")
    _rows_only(edge_emb, "edge_message_sum")
    src = np.ascontiguousarray(np.asarray(src, dtype=np.int64))
    etype = np.ascontiguousarray(np.asarray(etype, dtype=np.int64))
    dst = np.ascontiguousarray(np.asarray(dst, dtype=np.int64))
    if not (len(src) == len(etype) == len(dst)):
        raise ContractError("edge arrays must have equal length")
    state_d, emb_d = node_state.data, edge_emb.data

    def vjp(g):
        gs, ge = backend.edge_message_sum_backward(
            np.ascontiguousarray(g), state_d, emb_d, src, etype, dst
        )
        return gs, ge

    return rec._append(
        "edge_message_sum",
        (node_state.node, edge_emb.node),
        backend.edge_message_sum(state_d, emb_d, src, etype, dst, num_out),
        vjp,
        lambda s, e: backend.edge_message_sum(s, e, src, etype, dst, num_out),
    )


def gradients(loss: Tensor, params: Iterable[Tensor]) -> dict[Tensor, Tensor]:
    """Exact reverse-mode gradients of a scalar loss for the given leaves.

    Parameters the loss does not depend on get zero gradients. Raises
    NumericError naming the op where a non-finite gradient first appears.
    """
    params = list(params)
    if loss.data.size != 1:
        raise ContractError(f"loss must be scalar, got shape {loss.shape}")
    if not np.all(np.isfinite(loss.data)):
        raise NumericError("loss is not finite", op=loss.op)
    record = loss.record
    for p in params:
        if p.record is not record:
            raise ContractError("parameter belongs to a different computation record")

    # restrict the backward pass to nodes the loss actually depends on
    reachable = {loss.node}
    stack = [loss.node]
    while stack:
        node = stack.pop()
        for parent in record.nodes[node].parents:
            if parent not in reachable:
                reachable.add(parent)
                stack.append(parent)

    grads: dict[int, Array] = {loss.node: np.ones_like(loss.data)}
    for node_id in sorted(reachable, reverse=True):
        g = grads.get(node_id)
        if g is None:
            continue
        t = record.nodes[node_id]
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient at op {t.op!r}", op=t.op)
        if t._vjp is None:
            continue
        contributions = t._vjp(g)
        for parent, contrib in zip(t.parents, contributions):
            if contrib is None:
                continue
            if parent in grads:
                grads[parent] = grads[parent] + contrib
            else:
                grads[parent] = contrib

    out: dict[Tensor, Tensor] = {}
    for p in params:
        g = grads.get(p.node)
        if g is None:
            g = np.zeros_like(p.data)
        out[p] = record.constant(np.asarray(g, dtype=np.float64).reshape(p.shape))
    return out


def finite_difference(
    f: Callable[[list[Array]], float],
    params: Sequence[Array],
    eps: float = 1e-5,
) -> list[Array]:
    """Central-difference gradients, the independent oracle for ``gradients``.

    ``f`` must be a deterministic scalar function of the parameter list; two
    baseline evaluations are compared to detect non-determinism.
    """
    if eps <= 0:
        raise ContractError("eps must be positive")
    work = [np.array(p, dtype=np.float64, copy=True) for p in params]
    base1 = float(f(work))
    base2 = float(f(work))
    if base1 != base2:
        raise OracleError("objective is not deterministic; finite differences are meaningless")
    grads = []
    for pi, p in enumerate(work):
        g = np.zeros_like(p)
        flat = p.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            up = float(f(work))
            flat[i] = orig - eps
            down = float(f(work))
            flat[i] = orig
            gflat[i] = (up - down) / (2.0 * eps)
        grads.append(g)
    return grads
