"""Versioned on-disk caches for prime tables and family enumerations.

Format: one JSON header line (version, key fields, payload checksum)
followed by one JSON line per record.  A version or checksum mismatch,
or any parse failure, is treated as a miss: the caller rebuilds and the
stale file is overwritten.  Writes go through a temp file and an atomic
replace so concurrent commands sharing a cache directory never see a
half-written file.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import warnings
from dataclasses import dataclass

from . import biquad, ffpoly

CACHE_VERSION = 1

ENV_VAR = "FFSTAT_CACHE_DIR"


@dataclass(frozen=True)
class CacheEntry:
    kind: str  # "primes" | "family"
    q: int
    param: int  # degree or genus
    variant: str
    payload: tuple  # tuple of JSON-serializable records
    checksum: str

    @classmethod
    def build(cls, kind, q, param, variant, payload):
        payload = tuple(payload)
        return cls(kind, q, param, variant, payload, _checksum(payload))


def _checksum(payload):
    blob = json.dumps(list(payload), separators=(",", ":"), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _path(cache_dir, kind, q, param, variant):
    name = f"{kind}-q{q}-{param}-{variant}.jsonl"
    return os.path.join(cache_dir, name)


def store(cache_dir, entry):
    os.makedirs(cache_dir, exist_ok=True)
    path = _path(cache_dir, entry.kind, entry.q, entry.param, entry.variant)
    header = {
        "version": CACHE_VERSION,
        "kind": entry.kind,
        "q": entry.q,
        "param": entry.param,
        "variant": entry.variant,
        "checksum": entry.checksum,
    }
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(json.dumps(header) + "\n")
            for rec in entry.payload:
                fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    return path


def load(cache_dir, kind, q, param, variant):
    """CacheEntry on a clean hit, else None (with a warning on corruption)."""
    path = _path(cache_dir, kind, q, param, variant)
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            header = json.loads(fh.readline())
            if header.get("version") != CACHE_VERSION:
                return None
            payload = tuple(tuple(json.loads(line)) for line in fh if line.strip())
    except (ValueError, OSError):
        warnings.warn(f"corrupt cache file {path}; rebuilding")
        return None
    if _checksum(payload) != header.get("checksum"):
        warnings.warn(f"cache checksum mismatch in {path}; rebuilding")
        return None
    return CacheEntry(kind, q, param, variant, payload, header["checksum"])


def primes_cached(field, degree, cache_dir=None):
    """Monic primes of one degree, through the disk cache when enabled."""
    if cache_dir:
        entry = load(cache_dir, "primes", field.q, degree, "monic")
        if entry is not None:
            return [ffpoly.Poly.from_coeffs(field, rec) for rec in entry.payload]
    ps = ffpoly.primes(field, degree)
    if cache_dir:
        store(cache_dir, CacheEntry.build(
            "primes", field.q, degree, "monic",
            [list(p.coeffs) for p in ps],
        ))
    return list(ps)


def family_cached(field, g, variant=biquad.MONIC, cache_dir=None):
    """Monic family members through the disk cache; reload preserves the
    enumeration order exactly (checked by checksum).  The full variant
    derives from the monic payload, so only monic lists are stored."""
    if cache_dir:
        entry = load(cache_dir, "family", field.q, g, biquad.MONIC)
        if entry is not None:
            triples = tuple(
                biquad.CurveTriple(
                    ffpoly.Poly.from_coeffs(field, rec[0]),
                    ffpoly.Poly.from_coeffs(field, rec[1]),
                    ffpoly.Poly.from_coeffs(field, rec[2]),
                    biquad.MONIC,
                )
                for rec in entry.payload
            )
            biquad.preload_family(field, g, triples)
            return triples
    triples = biquad._monic_triples(field, g)
    if cache_dir:
        store(cache_dir, CacheEntry.build(
            "family", field.q, g, biquad.MONIC,
            [[list(t.f1.coeffs), list(t.f2.coeffs), list(t.f3.coeffs)]
             for t in triples],
        ))
    return triples
