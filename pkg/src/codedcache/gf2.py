"""Byte-block XOR and GF(2) linear algebra over int bitsets.

A basis vector is a Python ``int`` whose bit ``c`` is set iff column ``c``
(one subfile) takes part in the XOR.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

Block = bytes


def xor_blocks(a: Block, b: Block) -> Block:
    if len(a) != len(b):
        raise ValueError("block size mismatch")
    return (int.from_bytes(a, "little") ^ int.from_bytes(b, "little")).to_bytes(len(a), "little")


def xor_all(blocks: Iterable[Block]) -> Block:
    """XOR of a non-empty collection of equal-length blocks."""
    return reduce(xor_blocks, blocks)


def vector(columns: Iterable[int]) -> int:
    """Bitset for a collection of column indices; repeated indices cancel."""
    v = 0
    for c in columns:
        if c < 0:
            raise ValueError(f"negative column index {c}")
        v ^= 1 << c
    return v


def unit(column: int) -> int:
    return 1 << column


def columns(v: int) -> list[int]:
    """Sorted column indices of a bitset."""
    out = []
    c = 0
    while v:
        if v & 1:
            out.append(c)
        v >>= 1
        c += 1
    return out


def _reduce(v: int, basis: dict[int, int]) -> int:
    while v:
        top = v.bit_length() - 1
        pivot = basis.get(top)
        if pivot is None:
            return v
        v ^= pivot
    return 0


def echelon(rows: Iterable[int]) -> dict[int, int]:
    """Row-reduce into a basis keyed by leading bit."""
    basis: dict[int, int] = {}
    for r in rows:
        r = _reduce(r, basis)
        if r:
            basis[r.bit_length() - 1] = r
    return basis


def rank(rows: Iterable[int]) -> int:
    """GF(2) rank of a collection of bitset rows (0 for no rows)."""
    return len(echelon(rows))


def in_span(v: int, rows: Sequence[int] | dict[int, int]) -> bool:
    """True iff ``v`` lies in the GF(2) span of ``rows``.

    ``rows`` may also be a basis already returned by :func:`echelon`, which
    avoids repeating the elimination when probing many vectors.
    """
    basis = rows if isinstance(rows, dict) else echelon(rows)
    return _reduce(v, basis) == 0
