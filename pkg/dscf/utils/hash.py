import hashlib

import numpy as np


def hash_arrays(*arrays) -> bytes:
    """
    SHA-256 digest over the dtype, shape and raw bytes of each array, in order.
    """
    digest = hashlib.sha256()
    for array in arrays:
        array = np.ascontiguousarray(array)
        digest.update(str(array.dtype).encode())
        digest.update(str(array.shape).encode())
        digest.update(array.tobytes())
    return digest.digest()
