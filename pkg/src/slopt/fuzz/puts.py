"""In-process programs under test with hand-placed edge semantics.

Every harness is a pure function from input bytes to an ``ExecutionResult``:
no state survives between calls, and every edge id it reports is below the
harness's declared bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable


@dataclass(frozen=True, slots=True)
class ExecutionResult:
    edges: frozenset[int]
    crashed: bool = False
    abort_reason: str | None = None


@dataclass(frozen=True)
class PutHarness:
    name: str
    execute: Callable[[bytes], ExecutionResult] = field(repr=False)
    edge_bound: int
    description: str = ""
    default_seeds: tuple[bytes, ...] = ()
    dictionary: tuple[bytes, ...] = ()


# -- magic_gate ---------------------------------------------------------------
# Four 4-byte magic words at offsets 0, 4, 8, 12. Comparisons are split per
# byte, so every matched prefix byte is its own edge.

MAGIC_WORDS = (b"\x89PNG", b"%PDF", b"\x7fELF", b"PK\x03\x04")
_MAGIC = b"".join(MAGIC_WORDS)
_MAGIC_CRASH_EDGE = 1 + len(_MAGIC)


def _magic_gate(data: bytes) -> ExecutionResult:
    edges = {0}
    matched = 0
    for i, want in enumerate(_MAGIC):
        if i >= len(data) or data[i] != want:
            break
        edges.add(1 + i)
        matched += 1
    if matched == len(_MAGIC):
        edges.add(_MAGIC_CRASH_EDGE)
        return ExecutionResult(frozenset(edges), True, "all magic gates passed")
    return ExecutionResult(frozenset(edges))


# -- chunk_parser -------------------------------------------------------------
# A walk over TLV records  [type:1][len:1][value:len][checksum:1]  where the
# checksum is (type + sum(value)) mod 256. The walk stops at the first record
# that is malformed or fails its checksum.

CHUNK_TYPES = 8
CHUNK_MAX_RECORDS = 32
_CK_RECORD = 1                                      # (index, type, ok)
_CK_LENCLASS = _CK_RECORD + CHUNK_MAX_RECORDS * CHUNK_TYPES * 2
_CK_BADTYPE = _CK_LENCLASS + CHUNK_TYPES * 4
_CK_TRUNC = _CK_BADTYPE + CHUNK_MAX_RECORDS
_CK_CRASH = _CK_TRUNC + CHUNK_MAX_RECORDS
_CK_BOUND = _CK_CRASH + 1


def _len_class(n: int) -> int:
    if n == 0:
        return 0
    if n < 4:
        return 1
    if n < 16:
        return 2
    return 3


def _chunk_parser(data: bytes) -> ExecutionResult:
    edges = {0}
    pos = 0
    size = len(data)
    for i in range(CHUNK_MAX_RECORDS):
        if pos >= size:
            break
        rtype = data[pos]
        if rtype >= CHUNK_TYPES:
            edges.add(_CK_BADTYPE + i)
            break
        if pos + 1 >= size:
            edges.add(_CK_TRUNC + i)
            break
        n = data[pos + 1]
        end = pos + 2 + n
        if end >= size:
            edges.add(_CK_TRUNC + i)
            break
        ok = (rtype + sum(data[pos + 2:end])) & 0xFF == data[end]
        edges.add(_CK_RECORD + (i * CHUNK_TYPES + rtype) * 2 + ok)
        if not ok:
            break
        edges.add(_CK_LENCLASS + rtype * 4 + _len_class(n))
        if rtype == 7 and n > 200:
            # oversized type-7 payload overruns a fixed 200-byte buffer
            edges.add(_CK_CRASH)
            return ExecutionResult(frozenset(edges), True, "type-7 record overflow")
        pos = end + 1
    return ExecutionResult(frozenset(edges))


def make_chunk_record(rtype: int, value: bytes) -> bytes:
    return bytes([rtype, len(value)]) + value + bytes([(rtype + sum(value)) & 0xFF])


# -- arith_checker ------------------------------------------------------------
# Branches on arithmetic relations between adjacent bytes in the first
# ARITH_PAIRS + 1 bytes. Every (position, relation) is an edge.

ARITH_PAIRS = 24
_ARITH_RELATIONS = 6


def _arith_checker(data: bytes) -> ExecutionResult:
    edges = {0}
    add = edges.add
    a = data[:ARITH_PAIRS]
    b = data[1:ARITH_PAIRS + 1]
    base = 1
    for x, y in zip(a, b):
        if x == y:
            add(base)
        elif y == (x + 1) & 0xFF:
            add(base + 1)
        elif x ^ y == 0xFF:
            add(base + 2)
        if y == (x << 1) & 0xFF:
            add(base + 3)
        if (x + y) & 0xFF == 0:
            add(base + 4)
        if (y - x) & 0xFF == 0x10:
            add(base + 5)
        base += _ARITH_RELATIONS
    return ExecutionResult(frozenset(edges))


# -- length_field -------------------------------------------------------------
# "LF" magic, a little-endian u16 body length, then the body.
# Short bodies (< 64 bytes) are strict: the declared length must match exactly,
# otherwise the input is rejected with one edge per length bucket. Each byte is
# a key (even offset) or value (odd offset), and every (slot, byte) is an edge.
# Long bodies are lenient: both lengths must be at least 64, and the first
# min(declared, actual) bytes are read as 8-byte records [tag][value][6 zero
# padding bytes]. Records with non-zero padding are skipped; every valid
# (tag, value >> 4) pair is an edge. Small inputs are mostly header, so many
# mutations per input tend to break them; large inputs are mostly records, so
# many mutations per input touch more tags.

LF_MAGIC = b"LF"
LF_HEADER = 4
LF_COMPACT_LIMIT = 64
LF_RECORD = 8
_LF_PAD = bytes(LF_RECORD - 2)
_LF_BADMAGIC = 1
_LF_MISMATCH = 2                                     # 2 * 17 buckets
_LF_COMPACT = _LF_MISMATCH + 34                      # 2 slots * 256 values
_LF_RECORDS = _LF_COMPACT + 2 * 256                  # 256 tags * 16 value classes
_LF_COUNT = _LF_RECORDS + 256 * 16                   # 17 record-count buckets
_LF_TRAILING = _LF_COUNT + 17                        # declared < actual, declared > actual
_LF_BOUND = _LF_TRAILING + 2


def _length_field(data: bytes) -> ExecutionResult:
    if len(data) < LF_HEADER or data[:2] != LF_MAGIC:
        return ExecutionResult(frozenset((0, _LF_BADMAGIC)))
    declared = data[2] | (data[3] << 8)
    body_len = len(data) - LF_HEADER
    long_body = body_len >= LF_COMPACT_LIMIT and declared >= LF_COMPACT_LIMIT
    if declared != body_len and not long_body:
        bucket = min(body_len.bit_length(), 16)
        return ExecutionResult(frozenset((0, _LF_MISMATCH + 2 * bucket + (declared > body_len))))
    if not long_body:
        edges = {_LF_COMPACT + ((i & 1) << 8) + v for i, v in enumerate(data[LF_HEADER:])}
    else:
        used = min(declared, body_len)
        end = LF_HEADER + used - LF_RECORD + 1
        pad = _LF_PAD
        edges = {
            _LF_RECORDS + (data[i] << 4) + (data[i + 1] >> 4)
            for i in range(LF_HEADER, end, LF_RECORD)
            if data[i + 2:i + LF_RECORD] == pad
        }
        edges.add(_LF_COUNT + min((used // LF_RECORD).bit_length(), 16))
        if declared != body_len:
            edges.add(_LF_TRAILING + (declared > body_len))
    edges.add(0)
    return ExecutionResult(frozenset(edges))


def make_length_field_input(body: bytes) -> bytes:
    if len(body) > 0xFFFF:
        raise ValueError("body too long for a u16 length field")
    return LF_MAGIC + len(body).to_bytes(2, "little") + body


def make_length_field_record(tag: int, value: int) -> bytes:
    return bytes([tag, value]) + _LF_PAD


LF_SMALL_SEED = make_length_field_input(b"\x00\x00")
LF_LARGE_SEED = make_length_field_input(bytes(LF_RECORD * 160))


_CATALOG = {
    "magic_gate": PutHarness(
        "magic_gate", _magic_gate, _MAGIC_CRASH_EDGE + 1,
        "four sequential 4-byte magic comparisons; crashes once all pass",
        default_seeds=(bytes(16),),
        dictionary=MAGIC_WORDS,
    ),
    "chunk_parser": PutHarness(
        "chunk_parser", _chunk_parser, _CK_BOUND,
        "TLV record walker with a checksum branch per record type",
        default_seeds=(
            make_chunk_record(0, b"ab") + make_chunk_record(3, b"hello"),
            b"".join(make_chunk_record(t, bytes([0x30 + t] * (t + 1))) for t in range(CHUNK_TYPES)),
        ),
        dictionary=(),
    ),
    "arith_checker": PutHarness(
        "arith_checker", _arith_checker, 1 + ARITH_PAIRS * _ARITH_RELATIONS,
        "branches on arithmetic relations between adjacent bytes",
        default_seeds=(bytes(range(0x40, 0x40 + ARITH_PAIRS + 1)),),
    ),
    "length_field": PutHarness(
        "length_field", _length_field, _LF_BOUND,
        "length-prefixed body: strict compact layout, lenient padded-record layout",
        default_seeds=(LF_SMALL_SEED, LF_LARGE_SEED),
    ),
}


def builtin_puts() -> dict[str, PutHarness]:
    return dict(_CATALOG)


def get_put(name: str) -> PutHarness:
    try:
        return _CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown PUT {name!r}; choose from {sorted(_CATALOG)}") from None
