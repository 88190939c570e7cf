"""Mean-threshold binarization, XOR extraction and packed bit streams.

Bits are packed MSB-first within each byte; a trailing partial byte is
zero-padded and the true bit count is stored alongside.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .detection import SampleSeries
from .errors import InvalidParameterError

PROVENANCES = ("raw", "xor-extracted")


@dataclass(eq=False)
class BitStream:
    data: np.ndarray  # packed uint8
    length: int
    provenance: str = "raw"
    generation_rate: float | None = None

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.uint8)
        if self.length <= 0:
            raise InvalidParameterError("a bit stream must contain at least one bit")
        if self.data.size != (self.length + 7) // 8:
            raise InvalidParameterError(
                f"{self.length} bits need {(self.length + 7) // 8} bytes, got {self.data.size}")
        if self.provenance not in PROVENANCES:
            raise InvalidParameterError(f"unknown provenance {self.provenance!r}")

    @classmethod
    def from_bits(cls, bits, provenance: str = "raw", generation_rate: float | None = None) -> BitStream:
        bits = np.asarray(bits)
        if bits.ndim != 1:
            raise InvalidParameterError("bits must be one-dimensional")
        if bits.size and not np.isin(bits, (0, 1)).all():
            raise InvalidParameterError("bits must be 0 or 1")
        return cls(pack_bits(bits), bits.size, provenance, generation_rate)

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitStream):
            return NotImplemented
        return self.length == other.length and np.array_equal(self.data, other.data)

    def bits(self) -> np.ndarray:
        """Unpacked bits as uint8 0/1."""
        return unpack_bits(self.data, self.length)

    def ones_fraction(self) -> float:
        return count_ones(self.data) / self.length

    def bias(self) -> float:
        """``P(1) - 1/2``."""
        return self.ones_fraction() - 0.5

    def to_bytes(self) -> bytes:
        return self.data.tobytes()

    def concatenate(self, other: BitStream) -> BitStream:
        if other.provenance != self.provenance:
            raise InvalidParameterError("cannot join streams of different provenance")
        if self.length % 8 == 0:
            data = np.concatenate([self.data, other.data])
        else:
            data = pack_bits(np.concatenate([self.bits(), other.bits()]))
        return BitStream(data, self.length + other.length, self.provenance, self.generation_rate)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    return np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="big")


def unpack_bits(data: np.ndarray, length: int) -> np.ndarray:
    return np.unpackbits(np.asarray(data, dtype=np.uint8), count=length, bitorder="big")


_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def count_ones(data: np.ndarray) -> int:
    # padding bits are always zero, so they never contribute
    return int(np.bincount(data, minlength=256) @ _POPCOUNT)


@numba.njit(cache=True, nogil=True, boundscheck=False)
def _pack_threshold(values, threshold, out):
    n = values.size
    nfull = n // 8
    for k in range(nfull):
        base = 8 * k
        byte = 0
        for j in range(8):
            byte = (byte << 1) | (values[base + j] > threshold)
        out[k] = byte
    rem = n - 8 * nfull
    if rem:
        byte = 0
        for j in range(8):
            bit = 0
            if j < rem:
                bit = values[8 * nfull + j] > threshold
            byte = (byte << 1) | bit
        out[nfull] = byte


@numba.njit(cache=True, nogil=True, boundscheck=False)
def _pack_threshold_xor(a, ta, b, tb, out):
    n = a.size
    nfull = n // 8
    for k in range(nfull):
        base = 8 * k
        byte = 0
        for j in range(8):
            byte = (byte << 1) | ((a[base + j] > ta) ^ (b[base + j] > tb))
        out[k] = byte
    rem = n - 8 * nfull
    if rem:
        byte = 0
        for j in range(8):
            bit = 0
            if j < rem:
                bit = (a[8 * nfull + j] > ta) ^ (b[8 * nfull + j] > tb)
            byte = (byte << 1) | bit
        out[nfull] = byte


def _as_values(series) -> np.ndarray:
    values = series.values if isinstance(series, SampleSeries) else series
    return np.ascontiguousarray(values, dtype=np.float64)


def mean_threshold(series: SampleSeries) -> float:
    """Arithmetic mean of the samples; also stored as ``series.threshold``."""
    if len(series.values) == 0:
        raise InvalidParameterError("cannot threshold an empty series")
    values = np.asarray(series.values)
    s0 = float(values.sum()) / values.size  # same pairwise sum as np.mean, less overhead
    series.threshold = s0
    return s0


def binarize(series: SampleSeries, threshold: float | None = None) -> BitStream:
    """Bit ``i`` is 1 iff sample ``i`` exceeds the threshold (ties give 0)."""
    if threshold is None:
        threshold = series.threshold if series.threshold is not None else mean_threshold(series)
    values = _as_values(series)
    if values.size == 0:
        raise InvalidParameterError("cannot binarize an empty series")
    out = np.empty((values.size + 7) // 8, dtype=np.uint8)
    _pack_threshold(values, float(threshold), out)
    return BitStream(out, values.size, "raw", series.sampling_rate)


def xor_combine(a: BitStream, b: BitStream) -> BitStream:
    """Bitwise XOR; two raw bits are consumed per output bit."""
    if a.length != b.length:
        raise InvalidParameterError(f"stream lengths differ: {a.length} vs {b.length}")
    rate = None
    if a.generation_rate is not None:
        rate = a.generation_rate / 2
    return BitStream(np.bitwise_xor(a.data, b.data), a.length, "xor-extracted", rate)


def binarize_xor(a: SampleSeries, b: SampleSeries, threshold_a: float | None = None,
                 threshold_b: float | None = None) -> BitStream:
    """Fused ``xor_combine(binarize(a), binarize(b))`` in a single pass."""
    va, vb = _as_values(a), _as_values(b)
    if va.size != vb.size:
        raise InvalidParameterError(f"series lengths differ: {va.size} vs {vb.size}")
    if va.size == 0:
        raise InvalidParameterError("cannot binarize an empty series")
    ta = mean_threshold(a) if threshold_a is None else threshold_a
    tb = mean_threshold(b) if threshold_b is None else threshold_b
    out = np.empty((va.size + 7) // 8, dtype=np.uint8)
    _pack_threshold_xor(va, float(ta), vb, float(tb), out)
    rate = a.sampling_rate / 2 if isinstance(a, SampleSeries) else None
    return BitStream(out, va.size, "xor-extracted", rate)


def xor_bias(bias_a: float, bias_b: float) -> float:
    """Expected output bias for independent inputs: ``-2 * e_a * e_b``."""
    return -2.0 * bias_a * bias_b


def binomial_sigma(n: int, p: float = 0.5) -> float:
    return math.sqrt(p * (1 - p) / n)
