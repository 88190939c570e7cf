"""Desk-scale statistical test battery (NIST SP 800-22 style subset).

Tests: frequency (monobit), block frequency (M=128), runs, longest run of
ones in a block, serial (m=2, two p-values), cumulative sums (forward and
backward) and approximate entropy (m=2).  Longest-run category
probabilities are computed exactly by dynamic programming rather than taken
from rounded tables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import erfc, gammaincc
from scipy.stats import norm

from ..errors import InvalidParameterError
from ..extraction import BitStream


@dataclass
class TestResult:
    name: str
    statistic: float | None
    p_value: float | None
    passed: bool
    ran: bool = True
    note: str = ""

    __test__ = False  # not a pytest class


@dataclass
class TestReport:
    results: list[TestResult]
    alpha: float
    length: int
    stream: str = ""
    extras: dict = field(default_factory=dict)

    __test__ = False

    @property
    def passed(self) -> bool:
        return all(r.ran and r.passed for r in self.results)

    @property
    def pass_rate(self) -> float:
        return sum(r.ran and r.passed for r in self.results) / len(self.results)

    def __getitem__(self, name: str) -> TestResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "stream": self.stream,
            "length": self.length,
            "alpha": self.alpha,
            "passed": self.passed,
            "tests": [
                {"name": r.name, "statistic": r.statistic, "p_value": r.p_value,
                 "passed": r.passed, "ran": r.ran, **({"note": r.note} if r.note else {})}
                for r in self.results
            ],
        }

    def summary(self) -> str:
        lines = [f"battery on {self.length} bits at alpha={self.alpha}: "
                 f"{'PASS' if self.passed else 'FAIL'}"]
        for r in self.results:
            if not r.ran:
                lines.append(f"  {r.name:<22} not run ({r.note})")
            else:
                lines.append(f"  {r.name:<22} p={r.p_value:.6f}  {'pass' if r.passed else 'FAIL'}")
        return "\n".join(lines)


def _pm1_sum(bits: np.ndarray) -> int:
    return 2 * int(np.count_nonzero(bits)) - bits.size


def monobit(bits: np.ndarray) -> tuple[float, float]:
    s = abs(_pm1_sum(bits)) / math.sqrt(bits.size)
    return s, float(erfc(s / math.sqrt(2)))


def block_frequency(bits: np.ndarray, block: int = 128) -> tuple[float, float]:
    nblocks = bits.size // block
    pi = bits[:nblocks * block].reshape(nblocks, block).sum(axis=1, dtype=np.int64) / block
    chi2 = 4.0 * block * float(np.sum((pi - 0.5) ** 2))
    return chi2, float(gammaincc(nblocks / 2, chi2 / 2))


def runs(bits: np.ndarray) -> tuple[float, float]:
    n = bits.size
    pi = np.count_nonzero(bits) / n
    if abs(pi - 0.5) >= 2 / math.sqrt(n):
        return float("nan"), 0.0  # frequency prerequisite failed
    v = 1 + int(np.count_nonzero(bits[1:] != bits[:-1]))
    num = abs(v - 2 * n * pi * (1 - pi))
    den = 2 * math.sqrt(2 * n) * pi * (1 - pi)
    return float(v), float(erfc(num / den))


@lru_cache(maxsize=None)
def _longest_run_cdf(m: int, r: int) -> float:
    """P(longest run of ones <= r) in m fair bits."""
    # state: length of the current trailing run of ones (0..r)
    p = np.zeros(r + 1)
    p[0] = 1.0
    for _ in range(m):
        nxt = np.zeros(r + 1)
        nxt[0] = 0.5 * p.sum()
        nxt[1:] = 0.5 * p[:-1]
        p = nxt
    return float(p.sum())


_LONGEST_RUN_LAYOUT = [
    # (min n, block size M, lowest category, highest category)
    (750_000, 10_000, 10, 16),
    (6_272, 128, 4, 9),
    (128, 8, 1, 4),
]


@lru_cache(maxsize=None)
def longest_run_probabilities(m: int, lo: int, hi: int) -> np.ndarray:
    cdf = [_longest_run_cdf(m, r) for r in range(lo, hi)]
    probs = [cdf[0]] + [cdf[i] - cdf[i - 1] for i in range(1, len(cdf))] + [1.0 - cdf[-1]]
    return np.array(probs)


def _longest_runs_per_block(bits: np.ndarray, m: int) -> np.ndarray:
    nblocks = bits.size // m
    b = bits[:nblocks * m].reshape(nblocks, m)
    padded = np.zeros((nblocks, m + 2), dtype=np.int8)
    padded[:, 1:-1] = b
    d = np.diff(padded.ravel())
    starts = np.nonzero(d == 1)[0]
    ends = np.nonzero(d == -1)[0]
    longest = np.zeros(nblocks, dtype=np.int64)
    if starts.size:
        np.maximum.at(longest, starts // (m + 2), ends - starts)
    return longest


def longest_run(bits: np.ndarray) -> tuple[float, float]:
    n = bits.size
    for min_n, m, lo, hi in _LONGEST_RUN_LAYOUT:
        if n >= min_n:
            break
    else:
        raise InvalidParameterError("longest-run test needs at least 128 bits")
    longest = _longest_runs_per_block(bits, m)
    counts = np.bincount(np.clip(longest, lo, hi) - lo, minlength=hi - lo + 1)
    probs = longest_run_probabilities(m, lo, hi)
    nb = longest.size
    chi2 = float(np.sum((counts - nb * probs) ** 2 / (nb * probs)))
    return chi2, float(gammaincc((hi - lo) / 2, chi2 / 2))


def _pattern_counts(bits: np.ndarray, m: int) -> np.ndarray:
    """Counts of overlapping m-bit patterns with wrap-around."""
    if m == 0:
        return np.array([bits.size])
    ext = np.concatenate([bits, bits[:m - 1]]).astype(np.int64)
    n = bits.size
    code = np.zeros(n, dtype=np.int64)
    for j in range(m):
        code = (code << 1) | ext[j:j + n]
    return np.bincount(code, minlength=1 << m)


def _psi2(bits: np.ndarray, m: int) -> float:
    if m <= 0:
        return 0.0
    counts = _pattern_counts(bits, m).astype(np.float64)
    n = bits.size
    return float((1 << m) / n * np.sum(counts ** 2) - n)


def serial(bits: np.ndarray, m: int = 2) -> tuple[tuple[float, float], tuple[float, float]]:
    p0, p1, p2 = _psi2(bits, m), _psi2(bits, m - 1), _psi2(bits, m - 2)
    d1 = p0 - p1
    d2 = p0 - 2 * p1 + p2
    return ((d1, float(gammaincc(2 ** (m - 2), d1 / 2))),
            (d2, float(gammaincc(2 ** (m - 3), d2 / 2))))


def cumulative_sums(bits: np.ndarray, reverse: bool = False) -> tuple[float, float]:
    x = bits[::-1] if reverse else bits
    s = np.cumsum(2 * x.astype(np.int64) - 1)
    n = bits.size
    z = int(np.max(np.abs(s)))
    if z == 0:
        return 0.0, 1.0
    sq = math.sqrt(n)
    k1 = np.arange(math.floor((-n / z + 1) / 4), math.floor((n / z - 1) / 4) + 1)
    k2 = np.arange(math.floor((-n / z - 3) / 4), math.floor((n / z - 1) / 4) + 1)
    term1 = np.sum(norm.cdf((4 * k1 + 1) * z / sq) - norm.cdf((4 * k1 - 1) * z / sq))
    term2 = np.sum(norm.cdf((4 * k2 + 3) * z / sq) - norm.cdf((4 * k2 + 1) * z / sq))
    p = 1.0 - term1 + term2
    return float(z), float(min(max(p, 0.0), 1.0))


def approximate_entropy(bits: np.ndarray, m: int = 2) -> tuple[float, float]:
    n = bits.size

    def phi(mm):
        c = _pattern_counts(bits, mm) / n
        c = c[c > 0]
        return float(np.sum(c * np.log(c)))

    apen = phi(m) - phi(m + 1)
    chi2 = 2.0 * n * (math.log(2) - apen)
    return chi2, float(gammaincc(2 ** (m - 1), chi2 / 2))


def _serial_pair(b):
    (s1, p1), (s2, p2) = serial(b)
    return [("serial_1", s1, p1), ("serial_2", s2, p2)]


# (result names, minimum length, runner returning [(name, statistic, p), ...])
_TESTS = [
    (["monobit"], 100, lambda b: [("monobit", *monobit(b))]),
    (["block_frequency"], 128, lambda b: [("block_frequency", *block_frequency(b))]),
    (["runs"], 100, lambda b: [("runs", *runs(b))]),
    (["longest_run"], 128, lambda b: [("longest_run", *longest_run(b))]),
    (["serial_1", "serial_2"], 100, _serial_pair),
    (["cusum_forward", "cusum_backward"], 100,
     lambda b: [("cusum_forward", *cumulative_sums(b)),
                ("cusum_backward", *cumulative_sums(b, reverse=True))]),
    (["approximate_entropy"], 256, lambda b: [("approximate_entropy", *approximate_entropy(b))]),
]

RECOMMENDED_LENGTH = 1_000_000


def run_battery(bits: BitStream, alpha: float = 0.01) -> TestReport:
    """Run every test; too-short inputs mark tests as not run (never passed)."""
    if not 0 < alpha < 1:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha!r}")
    b = bits.bits()
    results = []
    for names, min_len, fn in _TESTS:
        if b.size < min_len:
            results += [TestResult(nm, None, None, False, ran=False,
                                   note=f"needs >= {min_len} bits") for nm in names]
            continue
        for name, stat, p in fn(b):
            results.append(TestResult(name, float(stat), p, bool(p >= alpha)))
    return TestReport(results, alpha, len(bits), bits.provenance)
