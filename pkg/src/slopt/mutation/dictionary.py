"""Token dictionary files: one token per line, non-printable bytes as ``\\xHH``.

Blank lines and lines starting with ``#`` are ignored. A literal backslash is
written ``\\\\``.
"""

from __future__ import annotations

import re
from pathlib import Path

_ESCAPE = re.compile(rb"\\(x[0-9A-Fa-f]{2}|\\)")


class DictionaryError(ValueError):
    pass


def decode_token(line: str, lineno: int = 0) -> bytes:
    raw = line.encode("latin-1")
    out = bytearray()
    i = 0
    while i < len(raw):
        if raw[i] == 0x5C:  # backslash
            m = _ESCAPE.match(raw, i)
            if m is None:
                raise DictionaryError(f"line {lineno}: bad escape at column {i + 1}")
            esc = m.group(1)
            out.append(0x5C if esc == b"\\" else int(esc[1:], 16))
            i = m.end()
        else:
            out.append(raw[i])
            i += 1
    return bytes(out)


def encode_token(token: bytes) -> str:
    parts = []
    for b in token:
        if b == 0x5C:
            parts.append("\\\\")
        elif 0x21 <= b <= 0x7E and b != 0x23:
            parts.append(chr(b))
        else:
            parts.append(f"\\x{b:02x}")
    return "".join(parts)


def load_dictionary(path: str | Path) -> list[bytes]:
    tokens = []
    with open(path, encoding="latin-1") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            tok = decode_token(line, lineno)
            if tok:
                tokens.append(tok)
    return tokens


def save_dictionary(tokens: list[bytes], path: str | Path) -> None:
    Path(path).write_text("".join(encode_token(t) + "\n" for t in tokens), encoding="latin-1")
