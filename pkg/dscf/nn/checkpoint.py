"""
Checkpoint codec.

Layout: magic bytes, format version (uint32 LE), manifest length (uint32 LE),
JSON manifest naming every parameter and its shape, then the raw
little-endian float64 values of each parameter in manifest order.
"""
import struct
from collections import OrderedDict
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np

from dscf import data
from dscf.exceptions import ParseError
from dscf.schema.schemas import CheckpointManifest, ParameterEntry

_HEADER = struct.Struct("<8sII")


def save_checkpoint(path, state: Dict[str, np.ndarray], metadata: Optional[Dict[str, str]] = None) -> None:
    manifest = CheckpointManifest(
        format_version=data.CHECKPOINT_FORMAT_VERSION,
        parameters=[ParameterEntry(name=name, shape=list(values.shape)) for name, values in state.items()],
        metadata={key: str(value) for key, value in (metadata or {}).items()},
    )
    encoded = manifest.json().encode("utf-8")
    with open(Path(path), "wb") as handle:
        handle.write(_HEADER.pack(data.CHECKPOINT_MAGIC, data.CHECKPOINT_FORMAT_VERSION, len(encoded)))
        handle.write(encoded)
        for values in state.values():
            handle.write(np.ascontiguousarray(values, dtype="<f8").tobytes())


def load_checkpoint(path) -> Tuple["OrderedDict[str, np.ndarray]", CheckpointManifest]:
    """
    Read a checkpoint back into named float64 arrays and its manifest.

    Raises:
        ParseError: Wrong magic bytes, unsupported version or truncated payload.
    """
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ParseError(path, 0, "truncated checkpoint header")
    magic, version, length = _HEADER.unpack_from(raw)
    if magic != data.CHECKPOINT_MAGIC:
        raise ParseError(path, 0, "not a checkpoint file")
    if version != data.CHECKPOINT_FORMAT_VERSION:
        raise ParseError(path, 0, f"unsupported checkpoint version {version}")
    offset = _HEADER.size
    manifest = CheckpointManifest.parse_raw(raw[offset:offset + length].decode("utf-8"))
    offset += length

    state = OrderedDict()
    for entry in manifest.parameters:
        count = int(np.prod(entry.shape)) if entry.shape else 1
        end = offset + 8 * count
        if end > len(raw):
            raise ParseError(path, 0, f"truncated values of parameter {entry.name}")
        state[entry.name] = np.frombuffer(raw[offset:end], dtype="<f8").reshape(entry.shape).astype(np.float64)
        offset = end
    return state, manifest
