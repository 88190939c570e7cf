"""Raw bit files, JSON sidecars, CSV tables and text reports.

A raw file is header-free packed bytes (MSB-first, final byte zero-padded),
directly consumable by external test suites.  Its sidecar ``<name>.json``
records the true bit length, provenance and generation details.
"""
from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np
import yaml

from .errors import InvalidParameterError
from .extraction import BitStream, pack_bits, unpack_bits

FORMAT = "packed-msb-first"


def sidecar_path(raw_path) -> Path:
    return Path(raw_path).with_suffix(".json")


class RawWriter:
    """Append bit streams to a raw file, packing across part boundaries."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh = open(self.path, "wb")
        self._pending = np.zeros(0, dtype=np.uint8)
        self.length = 0
        self._sha = hashlib.sha256()

    def _write(self, data: np.ndarray) -> None:
        b = data.tobytes()
        self._sha.update(b)
        self._fh.write(b)

    def append(self, stream: BitStream) -> None:
        if self._pending.size == 0 and stream.length % 8 == 0:
            self._write(stream.data)
        else:
            bits = np.concatenate([self._pending, stream.bits()])
            full = bits.size - bits.size % 8
            if full:
                self._write(pack_bits(bits[:full]))
            self._pending = bits[full:]
        self.length += stream.length

    def close(self) -> str:
        """Flush the padded tail byte; returns the file's SHA-256 hex digest."""
        if self._pending.size:
            self._write(pack_bits(self._pending))
            self._pending = self._pending[:0]
        self._fh.close()
        return self._sha.hexdigest()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        if not self._fh.closed:
            self.close()


def write_sidecar(raw_path, length: int, provenance: str, generation_rate: float | None,
                  digest: str | None = None, **extra) -> Path:
    meta = {
        "format": FORMAT,
        "bit_length": int(length),
        "byte_length": (int(length) + 7) // 8,
        "provenance": provenance,
        "generation_rate": generation_rate,
        **({"sha256": digest} if digest else {}),
        **extra,
    }
    path = sidecar_path(raw_path)
    path.write_text(json.dumps(meta, indent=2, sort_keys=False) + "\n")
    return path


def write_raw(path, stream: BitStream, **extra) -> str:
    """Write one stream plus sidecar; returns the SHA-256 digest of the raw file."""
    with RawWriter(path) as w:
        w.append(stream)
        digest = w.close()
    write_sidecar(path, stream.length, stream.provenance, stream.generation_rate, digest, **extra)
    return digest


def read_raw(path, length: int | None = None) -> BitStream:
    """Load a raw file; bit length comes from ``length``, the sidecar, or 8 x bytes."""
    path = Path(path)
    data = np.fromfile(path, dtype=np.uint8)
    provenance, rate = "raw", None
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text())
        if length is None:
            length = int(meta["bit_length"])
        provenance = meta.get("provenance", "raw")
        rate = meta.get("generation_rate")
    if length is None:
        length = 8 * data.size
    if length > 8 * data.size or length <= 0:
        raise InvalidParameterError(f"{path}: {data.size} bytes cannot hold {length} bits")
    nbytes = (length + 7) // 8
    data = data[:nbytes]
    if length % 8:
        data = pack_bits(unpack_bits(data, length))
    return BitStream(data, length, provenance, rate)


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_autocorrelation_csv(path, columns: dict[str, np.ndarray]) -> None:
    """Long format: ``stream,lag,coefficient``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["stream", "lag", "coefficient"])
        for name, coeffs in columns.items():
            for lag, c in enumerate(coeffs, start=1):
                w.writerow([name, lag, repr(float(c))])


def write_psd_csv(path, spectrum) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["frequency_hz", "density_db"])
        for f, d in zip(spectrum.frequencies, spectrum.power_density):
            w.writerow([repr(float(f)), repr(float(d))])


def write_rows_csv(path, rows: list[dict]) -> None:
    if not rows:
        raise InvalidParameterError("no rows to write")
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


def write_report(path, report: dict) -> None:
    Path(path).write_text(yaml.safe_dump(_plain(report), sort_keys=False))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
