"""Throughput of the extraction stage: mean threshold, binarize, XOR, pack.

    python3 benchmarks/bench_extraction.py [--frame-length N] [--frames F] [--repeats R]

Reports extracted output bits per second (one output bit per pair of
samples), single-threaded, in two memory situations:

``frame``
    The pipeline's operating condition.  A frame pair is extracted right
    after it has been produced, so its samples are still cache resident.
    Before each timed call the pair is refreshed by copying new samples in.
``stream``
    Many distinct frame pairs, larger than the last-level cache, extracted
    back to back; bounded by main-memory bandwidth (16 bytes read per
    output bit).

The best of ``repeats`` passes is kept to reduce scheduler noise.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from phaseqrng.detection import SampleSeries
from phaseqrng.extraction import binarize, binarize_xor, xor_combine

DEFAULT_FRAME_LENGTH = 1_000_000


def _pool(frame_length: int, count: int, seed: int = 0) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [rng.standard_normal(frame_length) for _ in range(count)]


def _extract_fused(a: SampleSeries, b: SampleSeries):
    return binarize_xor(a, b)


def _extract_two_step(a: SampleSeries, b: SampleSeries):
    return xor_combine(binarize(a), binarize(b))


def frame_throughput(frame_length: int = DEFAULT_FRAME_LENGTH, frames: int = 16, repeats: int = 5,
                     extract=_extract_fused) -> float:
    """Mbit/s with each frame pair freshly produced just before extraction."""
    pool = _pool(frame_length, 2 * frames)
    a = SampleSeries(1e-9, np.empty(frame_length))
    b = SampleSeries(1e-9, np.empty(frame_length))
    extract(SampleSeries(1e-9, pool[0]), SampleSeries(1e-9, pool[1]))  # compile
    best = np.inf
    for _ in range(repeats):
        elapsed = 0.0
        for k in range(frames):
            np.copyto(a.values, pool[2 * k])
            np.copyto(b.values, pool[2 * k + 1])
            a.threshold = b.threshold = None
            t0 = time.perf_counter()
            extract(a, b)
            elapsed += time.perf_counter() - t0
        best = min(best, elapsed)
    return frames * frame_length / best / 1e6


def stream_throughput(frame_length: int = DEFAULT_FRAME_LENGTH, frames: int = 32, repeats: int = 3,
                      extract=_extract_fused) -> float:
    """Mbit/s over a working set far larger than the cache."""
    pool = [SampleSeries(1e-9, v) for v in _pool(frame_length, 2 * frames, seed=1)]
    extract(pool[0], pool[1])
    best = np.inf
    for _ in range(repeats):
        for s in pool:
            s.threshold = None
        t0 = time.perf_counter()
        for k in range(frames):
            extract(pool[2 * k], pool[2 * k + 1])
        best = min(best, time.perf_counter() - t0)
    return frames * frame_length / best / 1e6


def measure_throughput(frame_length: int = DEFAULT_FRAME_LENGTH, frames: int = 16, repeats: int = 5) -> dict:
    return {
        "frame_length": frame_length,
        "frame_fused_mbit_per_s": frame_throughput(frame_length, frames, repeats),
        "frame_two_step_mbit_per_s": frame_throughput(frame_length, frames, repeats, _extract_two_step),
        "stream_fused_mbit_per_s": stream_throughput(frame_length, 2 * frames, max(1, repeats // 2)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frame-length", type=int, default=DEFAULT_FRAME_LENGTH)
    ap.add_argument("--frames", type=int, default=16)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    r = measure_throughput(args.frame_length, args.frames, args.repeats)
    print(f"frame length {r['frame_length']}")
    for key, value in r.items():
        if key.endswith("mbit_per_s"):
            print(f"  {key[:-len('_mbit_per_s')]:<16} {value:8.1f} Mbit/s")


if __name__ == "__main__":
    main()
