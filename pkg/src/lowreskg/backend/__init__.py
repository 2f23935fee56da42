"""Kernel backend selection: compiled Cython extension when built, NumPy otherwise.

Both backends implement the same three functions with bit-identical
results; ``active_backend()`` reports which one is in use and
``use_backend()`` lets tests and benchmarks pin one explicitly.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import pure

try:
    from . import _kernels  # type: ignore[attr-defined]
except ImportError:
    _kernels = None

_FORCED = os.environ.get("LOWRESKG_BACKEND", "").strip().lower()
if _FORCED == "pure":
    _active: ModuleType = pure
elif _FORCED == "compiled" and _kernels is None:
    raise ImportError("LOWRESKG_BACKEND=compiled but the extension is not built")
else:
    _active = _kernels if _kernels is not None else pure


def available_backends() -> tuple[str, ...]:
    return ("pure", "compiled") if _kernels is not None else ("pure",)


def active_backend() -> str:
    return _active.NAME


def get_backend(name: str) -> ModuleType:
    if name == "pure":
        return pure
    if name == "compiled":
        if _kernels is None:
            raise ValueError("compiled backend is not built")
        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def use_backend(name: str) -> None:
    global _active
    _active = get_backend(name)


def scatter_add_rows(values, index, num_out):
    return _active.scatter_add_rows(values, index, num_out)


def edge_message_sum(node_state, edge_emb, src, etype, dst, num_out):
    return _active.edge_message_sum(node_state, edge_emb, src, etype, dst, num_out)


def edge_message_sum_backward(grad_out, node_state, edge_emb, src, etype, dst):
    return _active.edge_message_sum_backward(grad_out, node_state, edge_emb, src, etype, dst)
