"""Counter-based random streams.

Every stream is a Philox generator keyed by ``(seed, *key)`` through
``numpy.random.SeedSequence``. Two calls with the same key always return the
same numbers, independent of which process or thread asks, so replications
can be scheduled in any order.
"""
import zlib

import numpy as np

__all__ = ["stream", "purpose", "derive_seed", "open_uniform", "standard_normal"]

_MASK64 = (1 << 64) - 1


def purpose(tag: str) -> int:
    """Stable integer code for a purpose tag (e.g. ``"mb"``, ``"errors"``)."""
    return zlib.crc32(tag.encode("utf-8"))


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return a Philox generator keyed by ``seed`` and the integer ``key`` path."""
    if seed is None:
        raise ValueError("a seed is mandatory for reproducible streams")
    ss = np.random.SeedSequence(entropy=int(seed) & _MASK64,
                                spawn_key=tuple(int(k) & _MASK64 for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *key: int) -> int:
    """A child 64-bit seed for the sub-task identified by ``key``."""
    if seed is None:
        raise ValueError("a seed is mandatory for reproducible streams")
    ss = np.random.SeedSequence(entropy=int(seed) & _MASK64,
                                spawn_key=tuple(int(k) & _MASK64 for k in key))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


def open_uniform(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform draws on the open interval (0, 1), exact multiples of 2**-53."""
    return rng.integers(1, 1 << 53, size=size, dtype=np.int64) * (2.0 ** -53)


def standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    """Standard normals by inversion of open uniforms."""
    from ._normal import norm_ppf

    return norm_ppf(open_uniform(rng, size))
