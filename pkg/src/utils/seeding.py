"""
Deterministic randomness for GAMSum.

All randomness flows from one root seed. Streams are keyed by purpose and
identifier, so the order in which workers consume them never changes results.
"""

import hashlib
from typing import Union

import numpy as np

Key = Union[str, int]


def derive_seed(root_seed: int, *keys: Key) -> int:
    """
    Derive a 64-bit child seed from a root seed and a key path.

    Args:
        root_seed: The run's root seed
        *keys: Purpose and identifiers, e.g. ("bag", 3) or ("undersample", "repeat-2")

    Returns:
        Non-negative integer seed
    """
    material = ":".join([str(int(root_seed))] + [str(k) for k in keys])
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_rng(root_seed: int, *keys: Key) -> np.random.Generator:
    """Return a numpy Generator seeded from ``derive_seed(root_seed, *keys)``."""
    return np.random.default_rng(derive_seed(root_seed, *keys))
