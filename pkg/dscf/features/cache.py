"""
Sequence cache codec.

Header: magic bytes, format version, l, H, walk seed, SHA-256 of the dataset
it was built from and the pair count. Body: one fixed-size record per pair
holding the target user, the target item and H x l (neighbor, item, rating)
steps, all little-endian int64.
"""
import struct
from pathlib import Path
from typing import Optional

import numpy as np

from dscf import data
from dscf.exceptions import ParseError, StateError
from dscf.features.sequences import SequenceStore

_HEADER = struct.Struct("<8sIIIq32sQ")


def _record_dtype(length: int, count: int) -> np.dtype:
    return np.dtype([("user", "<i8"), ("item", "<i8"), ("steps", "<i8", (count, length, 3))])


def save_sequence_store(path, store: SequenceStore, dataset_hash: bytes) -> None:
    records = np.empty(len(store), dtype=_record_dtype(store.length, store.count))
    records["user"] = store.users
    records["item"] = store.items
    records["steps"] = store.steps
    with open(Path(path), "wb") as handle:
        handle.write(_HEADER.pack(data.SEQUENCE_MAGIC, data.SEQUENCE_FORMAT_VERSION, store.length, store.count,
                                  store.seed, dataset_hash, len(store)))
        handle.write(records.tobytes())


def load_sequence_store(path, dataset_hash: Optional[bytes] = None, seed: Optional[int] = None) -> SequenceStore:
    """
    Read a sequence cache.

    Args:
        path: Cache file.
        dataset_hash: When given, the fingerprint the cache must have been built against.
        seed: When given, the walk seed the cache must have been built with.

    Raises:
        ParseError: Bad magic bytes, unknown version or truncated records.
        StateError: The cache was built from a different dataset or walk seed.

    Returns:
        SequenceStore: The cached sequences.
    """
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ParseError(path, 0, "truncated sequence cache header")
    magic, version, length, count, stored_seed, stored_hash, n_pairs = _HEADER.unpack_from(raw)
    if magic != data.SEQUENCE_MAGIC:
        raise ParseError(path, 0, "not a sequence cache")
    if version != data.SEQUENCE_FORMAT_VERSION:
        raise ParseError(path, 0, f"unsupported sequence cache version {version}")
    if dataset_hash is not None and stored_hash != dataset_hash:
        raise StateError(f"{path} was built from a different dataset; rerun `dscf walks`")
    if seed is not None and stored_seed != seed:
        raise StateError(f"{path} was built with walk seed {stored_seed}, not {seed}; rerun `dscf walks`")
    dtype = _record_dtype(length, count)
    if len(raw) - _HEADER.size != n_pairs * dtype.itemsize:
        raise ParseError(path, 0, f"expected {n_pairs} sequence records")
    records = np.frombuffer(raw, dtype=dtype, offset=_HEADER.size, count=n_pairs)
    return SequenceStore(records["user"], records["item"], records["steps"], length, count, stored_seed)
