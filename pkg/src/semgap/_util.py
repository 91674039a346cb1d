"""Shared helpers: stable seed derivation and counter-based random bits.

Reproducibility across runs, platforms and process boundaries requires that
every random decision be derivable from the run seed plus a stable label,
never from Python's per-process ``hash()``.
"""

from __future__ import annotations

import hashlib

import numpy as np

_U64 = np.uint64
_MASK64 = (1 << 64) - 1


def derive_seed(root: int, *labels) -> int:
    """Derive a 64-bit child seed from a root seed and a label path.

    Uses SHA-256 over the textual path, so the mapping is stable across
    platforms and Python versions.
    """
    text = ":".join([str(int(root))] + [str(x) for x in labels])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def mix_bits(values: np.ndarray, key: int) -> np.ndarray:
    """SplitMix64 finalizer applied elementwise to ``values ^ key``.

    Counter-based: bit i depends only on (key, values[i]), so decisions keyed
    by absolute indices are reproducible regardless of chunking.
    """
    z = values.astype(np.uint64) ^ _U64(key & _MASK64)
    with np.errstate(over="ignore"):
        z = z + _U64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


def counter_uniforms(start: int, count: int, key: int) -> np.ndarray:
    """Uniform [0, 1) doubles for counter positions ``start .. start+count``."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    return (mix_bits(idx, key) >> _U64(11)).astype(np.float64) * 2.0**-53


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
