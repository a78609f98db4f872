"""Havoc-style byte-level mutation operators.

Each operator mutates a ``bytearray`` in place, returns it, and is applied
at a caller-chosen position. Unit operators
never change the buffer length; chunk operators may, but always keep the
length within ``[1, max_input_len]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from slopt.rng import RngStream

DEFAULT_MAX_INPUT_LEN = 1 << 20

# Signed 8/16-bit interesting values (havoc tradition); stored two's complement.
INTERESTING_8 = (-128, -1, 0, 1, 16, 32, 64, 100, 127)
INTERESTING_16 = INTERESTING_8 + (-32768, -129, 128, 255, 256, 512, 1000, 1024, 4096, 32767)
ARITH_MAX = 35

_INTERESTING_8_U = tuple(v & 0xFF for v in INTERESTING_8)
_INTERESTING_16_LE = tuple((v & 0xFFFF).to_bytes(2, "little") for v in INTERESTING_16)
_INTERESTING_16_BE = tuple((v & 0xFFFF).to_bytes(2, "big") for v in INTERESTING_16)

UNIT = "unit"
CHUNK = "chunk"


@dataclass
class MutationAux:
    """Auxiliary material some operators draw from."""

    tokens: Sequence[bytes] = ()
    donors: Sequence[bytes] = ()
    max_input_len: int = DEFAULT_MAX_INPUT_LEN


@dataclass(frozen=True)
class MutationOperator:
    id: int
    name: str
    category: str
    fn: Callable = field(repr=False, compare=False)
    inserts: bool = False


def _choose_block_len(rng: RngStream, limit: int) -> int:
    """Block length in [1, limit]; mostly short, occasionally long."""
    if limit <= 1:
        return 1
    cls = rng.below(3)
    if cls == 0:
        hi = 32
    elif cls == 1:
        hi = 128
    else:
        hi = 1500
    hi = min(hi, limit)
    return 1 + rng.below(hi)


# -- unit operators -----------------------------------------------------------

def flip_bit(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux) -> bytearray:
    buf[pos] ^= 1 << rng.below(8)
    return buf


def set_random_byte(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux) -> bytearray:
    # xor with a non-zero value so the byte always changes
    buf[pos] ^= 1 + rng.below(255)
    return buf


def add_sub_byte(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux) -> bytearray:
    delta = 1 + rng.below(ARITH_MAX)
    if rng.below(2):
        delta = -delta
    buf[pos] = (buf[pos] + delta) & 0xFF
    return buf


def _add_sub_wide(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux, width: int) -> bytearray:
    if pos + width > len(buf):
        return add_sub_byte(buf, pos, rng, aux)
    order = "big" if rng.below(2) else "little"
    delta = 1 + rng.below(ARITH_MAX)
    if rng.below(2):
        delta = -delta
    mask = (1 << (8 * width)) - 1
    v = (int.from_bytes(buf[pos:pos + width], order) + delta) & mask
    buf[pos:pos + width] = v.to_bytes(width, order)
    return buf


def add_sub_word(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux) -> bytearray:
    return _add_sub_wide(buf, pos, rng, aux, 2)


def add_sub_dword(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux) -> bytearray:
    return _add_sub_wide(buf, pos, rng, aux, 4)


def set_interesting_byte(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux) -> bytearray:
    buf[pos] = _INTERESTING_8_U[rng.below(len(_INTERESTING_8_U))]
    return buf


def set_interesting_word(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux) -> bytearray:
    if pos + 2 > len(buf):
        return set_interesting_byte(buf, pos, rng, aux)
    table = _INTERESTING_16_BE if rng.below(2) else _INTERESTING_16_LE
    buf[pos:pos + 2] = table[rng.below(len(table))]
    return buf


def overwrite_dict_token(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux) -> bytearray:
    tokens = aux.tokens
    if not tokens:
        return set_random_byte(buf, pos, rng, aux)
    tok = tokens[rng.below(len(tokens))]
    n = min(len(tok), len(buf) - pos)
    buf[pos:pos + n] = tok[:n]
    return buf


# -- chunk operators ----------------------------------------------------------

def clone_bytes(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux) -> bytearray:
    """Insert a copy of a block of the buffer itself before ``pos``."""
    room = aux.max_input_len - len(buf)
    if room <= 0 or not buf:
        return buf
    n = _choose_block_len(rng, min(len(buf), room))
    src = rng.below(len(buf) - n + 1)
    buf[pos:pos] = buf[src:src + n]
    return buf


def overwrite_chunk_from_self(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux) -> bytearray:
    if len(buf) < 2:
        return buf
    n = _choose_block_len(rng, len(buf) - pos)
    src = rng.below(len(buf) - n + 1)
    buf[pos:pos + n] = buf[src:src + n]
    return buf


def delete_bytes(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux) -> bytearray:
    if len(buf) <= 1:
        return buf
    # never delete the whole buffer
    limit = min(len(buf) - pos, len(buf) - 1)
    n = _choose_block_len(rng, limit)
    del buf[pos:pos + n]
    return buf


def insert_random_chunk(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux) -> bytearray:
    """Insert either a run of one random byte or fresh random bytes."""
    room = aux.max_input_len - len(buf)
    if room <= 0:
        return buf
    n = _choose_block_len(rng, min(max(len(buf), 1), room))
    if rng.below(2):
        chunk = bytes([rng.below(256)]) * n
    else:
        chunk = rng.getrandbits(8 * n).to_bytes(n, "little")
    buf[pos:pos] = chunk
    return buf


def overwrite_from_donor_seed(buf: bytearray, pos: int, rng: RngStream, aux: MutationAux) -> bytearray:
    donors = aux.donors
    if not donors:
        return overwrite_chunk_from_self(buf, pos, rng, aux)
    donor = donors[rng.below(len(donors))]
    if not donor:
        return buf
    n = _choose_block_len(rng, min(len(donor), len(buf) - pos))
    src = rng.below(len(donor) - n + 1)
    buf[pos:pos + n] = donor[src:src + n]
    return buf


CATALOG: tuple[MutationOperator, ...] = tuple(
    MutationOperator(i, fn.__name__, cat, fn, ins)
    for i, (fn, cat, ins) in enumerate((
        (flip_bit, UNIT, False),
        (set_random_byte, UNIT, False),
        (add_sub_byte, UNIT, False),
        (add_sub_word, UNIT, False),
        (add_sub_dword, UNIT, False),
        (set_interesting_byte, UNIT, False),
        (set_interesting_word, UNIT, False),
        (overwrite_dict_token, UNIT, False),
        (clone_bytes, CHUNK, True),
        (overwrite_chunk_from_self, CHUNK, False),
        (delete_bytes, CHUNK, False),
        (insert_random_chunk, CHUNK, True),
        (overwrite_from_donor_seed, CHUNK, False),
    ))
)

OPERATOR_FNS = tuple(op.fn for op in CATALOG)
N_OPERATORS = len(CATALOG)


def operator_by_name(name: str) -> MutationOperator:
    for op in CATALOG:
        if op.name == name:
            return op
    raise KeyError(name)


def apply_operator(
    op: MutationOperator,
    buffer: bytearray,
    pos: int,
    rng: RngStream,
    aux: MutationAux | None = None,
) -> bytearray:
    """Apply ``op`` once at ``pos``. Mutates ``buffer`` in place and returns it."""
    if aux is None:
        aux = MutationAux()
    if not buffer:
        if not op.inserts:
            raise ValueError(f"{op.name} cannot be applied to an empty buffer")
        pos = 0
    elif not 0 <= pos < len(buffer):
        raise ValueError(f"position {pos} outside buffer of length {len(buffer)}")
    return op.fn(buffer, pos, rng, aux)
