"""Pure-Python reimplementation of the token-hash embedding (no numpy)."""

import hashlib
import math
import re


def reference_embed(text, dimension, seed=0):
    tokens = re.findall(r"[a-z0-9]+", text.lower())
    if not tokens:
        raise ValueError("no tokens")
    acc = [0.0] * dimension
    key = seed.to_bytes(8, "little")
    for token in tokens:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=key).digest()
        value = int.from_bytes(digest, "little")
        index = value % dimension
        sign = 1.0 if (value >> 63) & 1 else -1.0
        acc[index] += sign
    norm = math.sqrt(sum(v * v for v in acc))
    if norm == 0.0:
        acc[len(tokens) % dimension] = 1.0
        norm = 1.0
    return [v / norm for v in acc]
