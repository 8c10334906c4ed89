"""Named, counter-based random streams.

Every draw in the library flows from one master seed through streams whose
identity is a tuple of integers and tags.  A stream is a pure function of
its name, so the same randomness can be read again at the same time index
from any depth of a coupling-from-the-past search.
"""

from __future__ import annotations

import hashlib
from functools import lru_cache

import numpy as np


def _word(part) -> tuple:
    # (type code, value) keeps ints, strings and bytes in disjoint ranges
    if isinstance(part, (bool, np.bool_)):
        raise TypeError("booleans are not stream tags")
    if isinstance(part, (int, np.integer)):
        v = int(part)
        return (0, 2 * v if v >= 0 else -2 * v - 1)
    if isinstance(part, (str, bytes)):
        return _hashed(part)
    raise TypeError(f"unsupported stream tag {part!r}")


@lru_cache(maxsize=4096)
def _hashed(part) -> tuple:
    if isinstance(part, str):
        return (1, _digest(part.encode("utf-8")))
    return (2, _digest(part))


def _digest(data: bytes) -> int:
    return int.from_bytes(hashlib.blake2b(data, digest_size=16).digest(), "little")


def stream_key(*parts) -> tuple:
    """Flatten a stream name into the integer spawn key of a SeedSequence."""
    out = []
    for p in parts:
        if isinstance(p, tuple):
            out.append(3)
            out.extend(stream_key(*p))
            out.append(4)
        else:
            out.extend(_word(p))
    return tuple(out)


def named_stream(master_seed: int, *parts) -> np.random.Generator:
    """Independent Philox stream for ``(master_seed, *parts)``."""
    seq = np.random.SeedSequence(int(master_seed), spawn_key=stream_key(*parts))
    return np.random.Generator(np.random.Philox(seq))


def replica_rng(seed: int, *parts) -> np.random.Generator:
    """Stream for one Monte Carlo replica; used by the verification harness."""
    return named_stream(seed, "replica", *parts)


class RandomnessField:
    """Deterministic map ``(time n, tag...) -> random stream``.

    The field also memoizes objects derived purely from a stream (component
    tessellations) and records which time indices were read, which is what
    the null-anticipation audit inspects.  ``shifted(k)`` returns a view whose
    time ``n`` is this field's time ``n + k``; views share the memo.
    """

    def __init__(self, master_seed: int, *, _shift: int = 0, _shared=None):
        self.master_seed = int(master_seed)
        self.shift = _shift
        if _shared is None:
            _shared = {"memo": {}}
        self._shared = _shared
        self.accesses: list = []

    def __repr__(self):
        return f"RandomnessField(seed={self.master_seed}, shift={self.shift})"

    def shifted(self, k: int) -> "RandomnessField":
        return RandomnessField(self.master_seed, _shift=self.shift + k, _shared=self._shared)

    def stream(self, n: int, *tag) -> np.random.Generator:
        self.accesses.append(n)
        return named_stream(self.master_seed, "field", n + self.shift, *tag)

    def memo(self, n: int, tag: tuple, factory):
        """Return ``factory(n, tag)``, computing it at most once per name."""
        self.accesses.append(n)
        cache = self._shared["memo"]
        key = (n + self.shift, tag)
        try:
            return cache[key]
        except KeyError:
            value = cache[key] = factory(n, tag)
            return value

    def clear_memo(self) -> None:
        self._shared["memo"].clear()
