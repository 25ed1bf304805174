"""Maddah-Ali--Niesen uncoded placement with XOR delivery.

Each file is cut into ``C(K, r)`` pieces ``W[n, T]`` indexed by r-subsets
``T`` of the users; user ``k`` caches every piece with ``k in T``. For every
(r+1)-subset ``S`` the server sends ``sum_{k in S} W[d_k, S - {k}]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from codedcache.bounds import RatePoint
from codedcache.errors import ConfigError, IntegrityError
from codedcache.gf2 import xor_all
from codedcache.scheme_kk import CacheEntry, RunResult, UserCache, expr


@dataclass(frozen=True, order=True)
class MNSubfileId:
    file: int
    subset: tuple[int, ...]

    def __str__(self):
        return f"W[{self.file},{{{','.join(map(str, self.subset))}}}]"


def subsets(K: int, r: int) -> list[tuple[int, ...]]:
    return list(combinations(range(1, K + 1), r))


def _check(N: int, K: int, r: int, F_bits: int | None = None):
    if not 0 <= r <= K:
        raise ConfigError(f"r={r} outside [0, {K}]")
    if F_bits is not None and F_bits % (8 * comb(K, r)):
        raise ConfigError(f"F_bits={F_bits} not a multiple of 8*C({K},{r})={8 * comb(K, r)}")


def split(data: bytes, N: int, K: int, r: int, n: int) -> dict[MNSubfileId, bytes]:
    _check(N, K, r, 8 * len(data))
    size = len(data) // comb(K, r)
    return {MNSubfileId(n, T): data[p * size:(p + 1) * size] for p, T in enumerate(subsets(K, r))}


def _blocks(N, K, r, files):
    if len(files) != N:
        raise ConfigError(f"expected {N} files, got {len(files)}")
    out = {}
    for n, data in enumerate(files, start=1):
        out.update(split(data, N, K, r, n))
    return out


def placement_exprs_mn(N: int, K: int, r: int) -> list[list[tuple]]:
    _check(N, K, r)
    return [[(MNSubfileId(n, T),) for n in range(1, N + 1) for T in subsets(K, r) if k in T]
            for k in range(1, K + 1)]


def delivery_exprs_mn(demand: Sequence[int], r: int) -> list[tuple]:
    K = len(demand)
    _check(max(demand), K, r)
    if r == K:
        return []
    out = []
    for S in subsets(K, r + 1):
        out.append(expr(MNSubfileId(demand[k - 1], tuple(u for u in S if u != k)) for k in S))
    return out


def place_mn(N: int, K: int, r: int, files: Sequence[bytes]) -> list[UserCache]:
    blocks = _blocks(N, K, r, files)
    return [UserCache(k, [CacheEntry(e, blocks[e[0]]) for e in rows])
            for k, rows in enumerate(placement_exprs_mn(N, K, r), start=1)]


def deliver_mn(demand: Sequence[int], r: int, files: Sequence[bytes]) -> list[CacheEntry]:
    K = len(demand)
    if any(not 1 <= d <= len(files) for d in demand):
        raise ConfigError(f"demand {tuple(demand)} names a file outside [1, {len(files)}]")
    blocks = _blocks(len(files), K, r, files)
    return [CacheEntry(e, xor_all(blocks[s] for s in e)) for e in delivery_exprs_mn(demand, r)]


def decode_mn(k: int, cache: UserCache, packets: Sequence[CacheEntry], demand: Sequence[int],
              r: int, subfile_bytes: int | None = None) -> bytes:
    K = len(demand)
    want = demand[k - 1]
    stored = cache.lookup()
    if [p.expr for p in packets] != delivery_exprs_mn(demand, r):
        raise IntegrityError("broadcast does not match the delivery for this demand")
    by_expr = {p.expr: p.payload for p in packets}
    parts = []
    for T in subsets(K, r):
        target = MNSubfileId(want, T)
        if k in T:
            try:
                parts.append(stored[(target,)])
            except KeyError:
                raise IntegrityError(f"user {k} cache lacks {target}") from None
            continue
        S = tuple(sorted(T + (k,)))
        e = expr(MNSubfileId(demand[u - 1], tuple(v for v in S if v != u)) for u in S)
        others = [s for s in e if s != target]
        try:
            parts.append(xor_all([by_expr[e]] + [stored[(s,)] for s in others]))
        except KeyError as exc:
            raise IntegrityError(f"user {k} cannot resolve {target}: missing {exc}") from None
    return b"".join(parts)


def measure_mn(caches: Sequence[UserCache], packets: Sequence[CacheEntry], F_bits: int, r: int
               ) -> RatePoint:
    sizes = {c.bits for c in caches}
    if len(sizes) != 1:
        raise IntegrityError(f"unequal cache sizes: {sorted(sizes)}")
    return RatePoint(Fraction(sizes.pop(), F_bits), Fraction(sum(p.bits for p in packets), F_bits),
                     f"mn(r={r})")


def dump_caches_mn(exprs: Sequence[Sequence[tuple]]) -> str:
    lines = []
    for k, rows in enumerate(exprs, start=1):
        for (s,) in rows:
            lines.append(json.dumps({"user": k, "file": s.file, "subset": list(s.subset)}))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MNScheme:
    N: int
    K: int
    r: int

    @property
    def granularity_bits(self) -> int:
        return 8 * comb(self.K, self.r)

    @property
    def label(self) -> str:
        return f"mn(r={self.r})"

    def run(self, files: Sequence[bytes], demand: Sequence[int]) -> RunResult:
        caches = place_mn(self.N, self.K, self.r, files)
        packets = deliver_mn(demand, self.r, files)
        F_bits = 8 * len(files[0])
        measure_mn(caches, packets, F_bits, self.r)
        decoded = [decode_mn(k, caches[k - 1], packets, demand, self.r)
                   for k in range(1, self.K + 1)]
        return RunResult(decoded, caches[0].bits, sum(p.bits for p in packets), F_bits)
