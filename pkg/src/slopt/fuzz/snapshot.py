"""Versioned binary snapshots of a fuzzing campaign.

Layout (all integers little-endian)::

    b"SLOPTSNP" u32 version
    repeated:  4-byte tag, u64 payload length, payload
    final:     b"CRC!", u64 4, u32 crc32 of every preceding byte

Sections: META (JSON loop position and statistics), CORP (seed queue and
global coverage), CRSH (crash archive), BNDT (JSON bandit state or null),
RNGS (JSON generator state). Loading is all-or-nothing: any defect raises
``SnapshotError`` naming the byte offset where it was found.
"""

from __future__ import annotations

import json
import os
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from slopt.fuzz.corpus import Corpus, Crash, Seed
from slopt.mutation import MutationRecord, SloptState
from slopt.rng import RngStream

MAGIC = b"SLOPTSNP"
VERSION = 1
_SECTIONS = (b"META", b"CORP", b"CRSH", b"BNDT", b"RNGS")
_CRC_TAG = b"CRC!"
_NONE32 = 0xFFFFFFFF


class SnapshotError(ValueError):
    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"malformed snapshot at byte {offset}: {message}")
        self.offset = offset


@dataclass
class Snapshot:
    corpus: Corpus
    slopt_state: SloptState | None
    rng: RngStream | None = None
    meta: dict[str, Any] = field(default_factory=dict)


# -- encoding -----------------------------------------------------------------

def _u32s(values) -> bytes:
    vals = list(values)
    return struct.pack(f"<I{len(vals)}I", len(vals), *vals)


def _blob(data: bytes) -> bytes:
    return struct.pack("<I", len(data)) + data


def _encode_corpus(corpus: Corpus) -> bytes:
    out = [struct.pack("<II", corpus.cursor, len(corpus.seeds))]
    for s in corpus.seeds:
        rec = s.record
        out.append(struct.pack(
            "<IqB4iQI",
            s.id,
            -1 if s.parent is None else s.parent,
            rec is not None,
            *((rec.operator, rec.exponent, rec.group, rec.seed_id) if rec else (0, 0, 0, 0)),
            s.timestamp,
            s.edge_count,
        ))
        out.append(_blob(s.data))
        out.append(_u32s(sorted(s.edges)))
    out.append(_u32s(sorted(corpus.edges)))
    return b"".join(out)


def _encode_crashes(corpus: Corpus) -> bytes:
    out = [struct.pack("<I", len(corpus.crashes))]
    for c in corpus.crashes:
        out.append(_blob(c.data))
        out.append(bytes.fromhex(c.key))
        out.append(struct.pack("<Q", c.timestamp))
        if c.reason is None:
            out.append(struct.pack("<I", _NONE32))
        else:
            out.append(_blob(c.reason.encode("utf-8")))
        out.append(_u32s(sorted(c.edges)))
    return b"".join(out)


def _json(obj: Any) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def encode_snapshot(snap: Snapshot) -> bytes:
    payloads = {
        b"META": _json(snap.meta),
        b"CORP": _encode_corpus(snap.corpus),
        b"CRSH": _encode_crashes(snap.corpus),
        b"BNDT": _json(None if snap.slopt_state is None else snap.slopt_state.to_state()),
        b"RNGS": _json(None if snap.rng is None else snap.rng.get_state()),
    }
    parts = [MAGIC, struct.pack("<I", VERSION)]
    for tag in _SECTIONS:
        parts.append(tag + struct.pack("<Q", len(payloads[tag])) + payloads[tag])
    body = b"".join(parts)
    return body + _CRC_TAG + struct.pack("<QI", 4, zlib.crc32(body))


# -- decoding -----------------------------------------------------------------

class _Reader:
    def __init__(self, data: bytes, base: int = 0) -> None:
        self.data = data
        self.pos = 0
        self.base = base

    @property
    def offset(self) -> int:
        return self.base + self.pos

    def take(self, n: int, what: str) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise SnapshotError(f"truncated while reading {what} ({n} bytes needed)", self.offset)
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str, what: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))

    def blob(self, what: str) -> bytes:
        (n,) = self.unpack("<I", what + " length")
        return self.take(n, what)

    def u32s(self, what: str) -> list[int]:
        (n,) = self.unpack("<I", what + " count")
        return list(struct.unpack(f"<{n}I", self.take(4 * n, what)))

    def done(self, what: str) -> None:
        if self.pos != len(self.data):
            raise SnapshotError(f"{len(self.data) - self.pos} trailing bytes in {what}", self.offset)


def _decode_corpus(r: _Reader) -> Corpus:
    corpus = Corpus()
    cursor, n = r.unpack("<II", "corpus header")
    for expected_id in range(n):
        at = r.offset
        sid, parent, has_rec, op, exp, grp, rsid, ts, ecount = r.unpack("<IqB4iQI", "seed header")
        if sid != expected_id:
            raise SnapshotError(f"seed id {sid} out of order (expected {expected_id})", at)
        data = r.blob("seed bytes")
        edges = frozenset(r.u32s("seed edges"))
        try:
            rec = MutationRecord(op, exp, grp, rsid) if has_rec else None
            seed = Seed(sid, data, None if parent < 0 else parent, rec, ts, ecount, edges)
        except ValueError as exc:
            raise SnapshotError(str(exc), at) from None
        corpus.seeds.append(seed)
        corpus.datas.append(seed.data)
        corpus._sorted_counts.append(ecount)
    corpus._sorted_counts.sort()
    at = r.offset
    corpus.edges = set(r.u32s("global edges"))
    union = set().union(*(s.edges for s in corpus.seeds)) if corpus.seeds else set()
    if union != corpus.edges:
        raise SnapshotError("global edge set differs from the union of seed edges", at)
    if cursor > n:
        raise SnapshotError(f"cursor {cursor} beyond queue of {n}", at)
    corpus.cursor = cursor
    r.done("CORP")
    return corpus


def _decode_crashes(r: _Reader, corpus: Corpus) -> None:
    (n,) = r.unpack("<I", "crash count")
    for _ in range(n):
        at = r.offset
        data = r.blob("crash bytes")
        key = r.take(16, "crash key").hex()
        (ts,) = r.unpack("<Q", "crash timestamp")
        (rlen,) = r.unpack("<I", "crash reason length")
        reason = None if rlen == _NONE32 else r.take(rlen, "crash reason").decode("utf-8", "replace")
        edges = frozenset(r.u32s("crash edges"))
        if key in corpus.crash_keys:
            raise SnapshotError("duplicate crash key", at)
        corpus.crash_keys.add(key)
        corpus.crashes.append(Crash(data, edges, key, ts, reason))
    r.done("CRSH")


def _load_json(payload: bytes, offset: int, what: str) -> Any:
    try:
        return json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SnapshotError(f"{what} is not valid JSON ({exc})", offset) from None


def decode_snapshot(data: bytes) -> Snapshot:
    r = _Reader(data)
    if r.take(len(MAGIC), "magic") != MAGIC:
        raise SnapshotError("bad magic", 0)
    (version,) = r.unpack("<I", "version")
    if version != VERSION:
        raise SnapshotError(f"unsupported version {version}", len(MAGIC))
    sections: dict[bytes, tuple[int, bytes]] = {}
    for tag in _SECTIONS:
        at = r.offset
        got = r.take(4, "section tag")
        if got != tag:
            raise SnapshotError(f"expected section {tag!r}, found {got!r}", at)
        (n,) = r.unpack("<Q", f"{tag.decode()} length")
        start = r.offset
        sections[tag] = (start, r.take(n, f"{tag.decode()} payload"))
    crc_at = r.offset
    if r.take(4, "checksum tag") != _CRC_TAG:
        raise SnapshotError("missing checksum section", crc_at)
    n, crc = r.unpack("<QI", "checksum")
    if n != 4 or zlib.crc32(data[:crc_at]) != crc:
        raise SnapshotError("checksum mismatch", crc_at)
    r.done("snapshot")

    start, payload = sections[b"META"]
    meta = _load_json(payload, start, "META")
    start, payload = sections[b"CORP"]
    corpus = _decode_corpus(_Reader(payload, start))
    start, payload = sections[b"CRSH"]
    _decode_crashes(_Reader(payload, start), corpus)
    start, payload = sections[b"BNDT"]
    bandit = _load_json(payload, start, "BNDT")
    start, payload = sections[b"RNGS"]
    rng_state = _load_json(payload, start, "RNGS")
    try:
        state = None if bandit is None else SloptState.from_state(bandit)
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotError(f"bad bandit state ({exc})", sections[b"BNDT"][0]) from None
    try:
        rng = None if rng_state is None else RngStream.from_state(rng_state)
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotError(f"bad generator state ({exc})", sections[b"RNGS"][0]) from None
    return Snapshot(corpus, state, rng, meta)


def save_snapshot(
    corpus: Corpus,
    slopt_state: SloptState | None,
    path: str | Path,
    rng: RngStream | None = None,
    meta: dict[str, Any] | None = None,
) -> None:
    """Write atomically: a reader never sees a half-written snapshot."""
    blob = encode_snapshot(Snapshot(corpus, slopt_state, rng, meta or {}))
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(blob)
    os.replace(tmp, path)


def load_snapshot(path: str | Path) -> Snapshot:
    return decode_snapshot(Path(path).read_bytes())
