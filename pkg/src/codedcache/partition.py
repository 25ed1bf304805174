"""Subfile index space and byte-level split/reassembly of files.

Each file ``n`` is cut into ``K(K-1)`` subfiles ``W[n, {i, j}, tag]`` with
``tag`` in ``{i, j}``. Byte ranges are assigned in canonical order, i.e.
lexicographic in ``(file, min(pair), max(pair), tag)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

from codedcache.errors import ConfigError
from codedcache.gf2 import Block


@dataclass(frozen=True, order=True)
class SubfileId:
    file: int
    pair: tuple[int, int]
    tag: int

    def __post_init__(self):
        i, j = self.pair
        if not i < j:
            raise ValueError(f"pair must be sorted and distinct, got {self.pair}")
        if self.tag not in self.pair:
            raise ValueError(f"tag {self.tag} not in pair {self.pair}")

    def __str__(self):
        return f"W[{self.file},{{{self.pair[0]},{self.pair[1]}}}]^{self.tag}"

    def to_json(self) -> list:
        return [self.file, list(self.pair), self.tag]


def sid(file: int, i: int, j: int, tag: int) -> SubfileId:
    """SubfileId for an unordered pair given in either order."""
    return SubfileId(file, (min(i, j), max(i, j)), tag)


def enumerate_subfiles(K: int, n: int) -> list[SubfileId]:
    """All ``K(K-1)`` subfile ids of file ``n`` in canonical order."""
    return [SubfileId(n, (i, j), t) for i, j in combinations(range(1, K + 1), 2) for t in (i, j)]


def normalize_anchor_pair(k: int, K: int) -> tuple[int, int]:
    """User ``k``'s anchor pair ``{k-1, k}``; user 1 wraps to ``{1, K}``."""
    if not 1 <= k <= K:
        raise ValueError(f"user index {k} out of range [1, {K}]")
    prev = K if k == 1 else k - 1
    return (min(prev, k), max(prev, k))


@dataclass(frozen=True)
class PartitionSpec:
    K: int
    N: int
    F_bits: int

    def __post_init__(self):
        if self.K < 2:
            raise ConfigError("K must be at least 2")
        if self.N < 1:
            raise ConfigError("N must be at least 1")
        parts = self.K * (self.K - 1)
        if self.F_bits <= 0 or self.F_bits % parts:
            raise ConfigError(f"F_bits={self.F_bits} not divisible by K(K-1)={parts}")
        if (self.F_bits // parts) % 8:
            raise ConfigError(f"subfile size {self.F_bits // parts} bits is not byte aligned")

    @classmethod
    def minimal(cls, K: int, N: int | None = None, bytes_per_subfile: int = 1) -> "PartitionSpec":
        return cls(K, K if N is None else N, 8 * bytes_per_subfile * K * (K - 1))

    @property
    def subfiles_per_file(self) -> int:
        return self.K * (self.K - 1)

    @property
    def subfile_bits(self) -> int:
        return self.F_bits // self.subfiles_per_file

    @property
    def subfile_bytes(self) -> int:
        return self.subfile_bits // 8

    @property
    def file_bytes(self) -> int:
        return self.F_bits // 8


def split_file(file_bytes: bytes, spec: PartitionSpec, n: int) -> dict[SubfileId, Block]:
    if len(file_bytes) != spec.file_bytes:
        raise ValueError(f"file {n} has {len(file_bytes)} bytes, expected {spec.file_bytes}")
    size = spec.subfile_bytes
    return {
        s: bytes(file_bytes[p * size:(p + 1) * size])
        for p, s in enumerate(enumerate_subfiles(spec.K, n))
    }


def reassemble(parts: Mapping[SubfileId, Block], spec: PartitionSpec, n: int) -> bytes:
    ids = enumerate_subfiles(spec.K, n)
    missing = [s for s in ids if s not in parts]
    if missing:
        raise KeyError("missing subfiles: " + ", ".join(map(str, missing)))
    return b"".join(parts[s] for s in ids)


def subfile_columns(K: int, N: int) -> dict[SubfileId, int]:
    """Global column index of every subfile of files ``1..N``."""
    ids = [s for n in range(1, N + 1) for s in enumerate_subfiles(K, n)]
    return {s: c for c, s in enumerate(ids)}
