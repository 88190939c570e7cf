"""Deterministic seed derivation and counter-addressed random streams.

Every random draw in the package is addressed by a key path below a master
seed, never by sequential reseeding::

    SeedSequence(master, spawn_key=(sweep_index, frame_index))   # frame
        -> child(frame, STREAM_PHASE)                             # stream
            -> child(stream, block_index)                         # block

``SeedSequence`` hashes (entropy, spawn_key) into the PCG64 state, so sibling
keys are statistically independent.  Because a block's content depends only
on its key, any range of a stream can be regenerated without touching the
rest of it; results therefore do not depend on how a frame is chunked or how
many workers process frames.
"""
from __future__ import annotations

import numpy as np

STREAM_PHASE = 0
STREAM_DRIFT = 1
STREAM_CONTROL = 2
STREAM_NOISE = 3

DEFAULT_BLOCK_SIZE = 1 << 16


def as_seed_sequence(seed) -> np.random.SeedSequence:
    """Coerce an int (or an existing ``SeedSequence``) to a ``SeedSequence``."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an int or SeedSequence, got {type(seed).__name__}")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.SeedSequence(int(seed))


def child(seed, *key: int) -> np.random.SeedSequence:
    """Return the sub-seed at ``key`` below ``seed``."""
    ss = as_seed_sequence(seed)
    return np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + tuple(int(k) for k in key))


def frame_seed(master_seed: int, frame_index: int, sweep_index: int = 0) -> np.random.SeedSequence:
    """Seed for one simulated acquisition frame."""
    return np.random.SeedSequence(int(master_seed), spawn_key=(int(sweep_index), int(frame_index)))


def describe(seed) -> dict:
    """JSON-friendly description of a seed (for metadata sidecars)."""
    ss = as_seed_sequence(seed)
    return {"entropy": int(ss.entropy), "spawn_key": [int(k) for k in ss.spawn_key]}


class NormalStream:
    """Standard normal variates addressed by absolute index.

    Index ``i`` lives in block ``i // block_size``; each block is drawn from
    its own PCG64 generator seeded by ``child(seed, block)``.  The most
    recently used block is memoized because consecutive chunks overlap.
    """

    def __init__(self, seed, block_size: int = DEFAULT_BLOCK_SIZE):
        self._seed = as_seed_sequence(seed)
        self.block_size = int(block_size)
        self._memo: tuple[int, np.ndarray] | None = None

    def _block(self, b: int) -> np.ndarray:
        if self._memo is not None and self._memo[0] == b:
            return self._memo[1]
        gen = np.random.Generator(np.random.PCG64(child(self._seed, b)))
        values = gen.standard_normal(self.block_size)
        self._memo = (b, values)
        return values

    def take(self, start: int, stop: int, out: np.ndarray | None = None) -> np.ndarray:
        """Variates with indices ``start <= i < stop``."""
        if start < 0 or stop < start:
            raise ValueError(f"invalid index range [{start}, {stop})")
        n = stop - start
        if out is None:
            out = np.empty(n)
        bs = self.block_size
        pos = start
        while pos < stop:
            b, lo = divmod(pos, bs)
            hi = min(bs, lo + (stop - pos))
            out[pos - start:pos - start + hi - lo] = self._block(b)[lo:hi]
            pos += hi - lo
        return out


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def hashed_normals(seed, indices: np.ndarray) -> np.ndarray:
    """Random-access standard normals: one splitmix64 hash per index.

    Used where only a sparse subset of a long stream is needed (electrical
    noise is only ever observed at sampling instants).
    """
    from scipy.special import ndtri

    key = as_seed_sequence(seed).generate_state(1, np.uint64)[0]
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = _splitmix64(idx ^ key)
        z = _splitmix64(z)
    u = ((z >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)
    return ndtri(u)
