"""Parameter checkpoints: a flat binary tensor container plus a text manifest.

The ``.bin`` file concatenates the raw little-endian float64 buffers; the
``.manifest`` file lists one tensor per line (name, shape, byte offset)
after optional ``#config`` header lines carrying model configuration.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import numpy as np

from ..errors import ParseError


def save_checkpoint(path: str | Path, tensors: Mapping[str, np.ndarray], config: Mapping[str, object] | None = None) -> None:
    path = Path(path)
    manifest_lines = []
    for key, value in (config or {}).items():
        manifest_lines.append(f"#config\t{key}\t{value}")
    offset = 0
    blobs = []
    for name in tensors:
        arr = np.ascontiguousarray(np.asarray(tensors[name], dtype=np.float64))
        blob = arr.astype("<f8").tobytes()
        shape = ",".join(str(s) for s in arr.shape)
        manifest_lines.append(f"{name}\t{shape}\t{offset}")
        blobs.append(blob)
        offset += len(blob)
    path.with_suffix(path.suffix + ".manifest").write_text("\n".join(manifest_lines) + "\n")
    path.write_bytes(b"".join(blobs))


def load_checkpoint(path: str | Path) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    path = Path(path)
    manifest_path = path.with_suffix(path.suffix + ".manifest")
    if not manifest_path.exists():
        raise ParseError(f"missing checkpoint manifest {manifest_path}")
    raw = path.read_bytes()
    tensors: dict[str, np.ndarray] = {}
    config: dict[str, str] = {}
    for lineno, line in enumerate(manifest_path.read_text().splitlines(), start=1):
        if not line:
            continue
        fields = line.split("\t")
        if fields[0] == "#config":
            if len(fields) != 3:
                raise ParseError(f"manifest line {lineno}: bad config line")
            config[fields[1]] = fields[2]
            continue
        if len(fields) != 3:
            raise ParseError(f"manifest line {lineno}: expected name, shape, offset")
        name, shape_text, offset_text = fields
        shape = tuple(int(s) for s in shape_text.split(",")) if shape_text else ()
        offset = int(offset_text)
        count = int(np.prod(shape)) if shape else 1
        end = offset + 8 * count
        if end > len(raw):
            raise ParseError(f"manifest line {lineno}: tensor extends past end of file")
        tensors[name] = np.frombuffer(raw[offset:end], dtype="<f8").reshape(shape).copy()
    return tensors, config
