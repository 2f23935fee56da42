"""Pure-NumPy implementations of the message-passing hot kernels.

These mirror the compiled kernels in ``_kernels.pyx`` exactly, including
accumulation order (sequential over edges), so both backends produce
bit-identical float64 results.
"""

from __future__ import annotations

import numpy as np

NAME = "pure"


def scatter_add_rows(values: np.ndarray, index: np.ndarray, num_out: int) -> np.ndarray:
    """out[index[i]] += values[i] for each row i."""
    out = np.zeros((num_out, values.shape[1]), dtype=np.float64)
    np.add.at(out, index, values)
    return out


def edge_message_sum(
    node_state: np.ndarray,
    edge_emb: np.ndarray,
    src: np.ndarray,
    etype: np.ndarray,
    dst: np.ndarray,
    num_out: int,
) -> np.ndarray:
    """Fused gather-multiply-scatter: out[dst] += node_state[src] * edge_emb[etype]."""
    out = np.zeros((num_out, node_state.shape[1]), dtype=np.float64)
    if len(src):
        np.add.at(out, dst, node_state[src] * edge_emb[etype])
    return out


def edge_message_sum_backward(
    grad_out: np.ndarray,
    node_state: np.ndarray,
    edge_emb: np.ndarray,
    src: np.ndarray,
    etype: np.ndarray,
    dst: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Adjoints of edge_message_sum w.r.t. node_state and edge_emb."""
    grad_state = np.zeros_like(node_state)
    grad_emb = np.zeros_like(edge_emb)
    if len(src):
        pulled = grad_out[dst]
        np.add.at(grad_state, src, pulled * edge_emb[etype])
        np.add.at(grad_emb, etype, pulled * node_state[src])
    return grad_state, grad_emb
