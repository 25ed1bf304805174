"""Coded-prefetching scheme for the (K, K) network at M = K - 1 - 1/K.

Placement, for user ``k`` with anchor pair ``a = {k-1, k}``:

1. every subfile ``W[n, {i, j}]`` whose pair avoids ``k``;
2. ``W[n, a]^k + W[n, {j, k}]^k`` for every file ``n`` and ``j`` outside
   ``a``, followed by the single sum ``sum_n W[n, a]^k``.

For a permutation demand ``d`` the server sends, for each ``i``, the packet
``sum_{k != i} W[d_k, {k, i}]^i``; that is K subfiles worth, R = 1/(K-1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

from codedcache.bounds import RatePoint
from codedcache.errors import ConfigError, IntegrityError
from codedcache.gf2 import Block, xor_all, xor_blocks
from codedcache.partition import (
    PartitionSpec,
    SubfileId,
    enumerate_subfiles,
    normalize_anchor_pair,
    reassemble,
    sid,
    split_file,
)

Expr = tuple  # canonically sorted tuple of subfile ids, read as their XOR


def expr(ids: Iterable[Hashable]) -> Expr:
    ids = list(ids)
    if len(set(ids)) != len(ids):
        raise ValueError("repeated subfile in expression")
    return tuple(sorted(ids))


@dataclass(frozen=True)
class CacheEntry:
    expr: Expr
    payload: Block

    @property
    def bits(self) -> int:
        return 8 * len(self.payload)


@dataclass
class UserCache:
    user: int
    entries: list[CacheEntry] = field(default_factory=list)

    @property
    def bits(self) -> int:
        return sum(e.bits for e in self.entries)

    def lookup(self) -> dict[Expr, Block]:
        return {e.expr: e.payload for e in self.entries}


@dataclass(frozen=True)
class RunResult:
    decoded: list[bytes]
    cache_bits: int
    broadcast_bits: int
    F_bits: int

    @property
    def point(self) -> tuple[Fraction, Fraction]:
        return Fraction(self.cache_bits, self.F_bits), Fraction(self.broadcast_bits, self.F_bits)


def check_permutation(demand: Sequence[int], K: int) -> tuple[int, ...]:
    d = tuple(int(x) for x in demand)
    if sorted(d) != list(range(1, K + 1)):
        raise ConfigError("scheme_kk requires distinct-file (permutation) demands")
    return d


def _anchor_partner(k: int, K: int) -> int:
    return K if k == 1 else k - 1


def placement_exprs(K: int) -> list[list[Expr]]:
    """Symbolic content of every cache, ``[user - 1][entry]``, in dump order."""
    if K < 2:
        raise ConfigError("scheme_kk needs K >= 2")
    caches = []
    for k in range(1, K + 1):
        a = normalize_anchor_pair(k, K)
        rows: list[Expr] = []
        for n in range(1, K + 1):
            rows += [(s,) for s in enumerate_subfiles(K, n) if k not in s.pair]
        for n in range(1, K + 1):
            for j in range(1, K + 1):
                if j in a:
                    continue
                rows.append(expr([SubfileId(n, a, k), sid(n, j, k, k)]))
        rows.append(expr(SubfileId(n, a, k) for n in range(1, K + 1)))
        caches.append(rows)
    return caches


def delivery_exprs(demand: Sequence[int]) -> list[Expr]:
    """Packet ``i`` (list index ``i - 1``) serves the user set ``[K] - {i}``."""
    K = len(demand)
    d = check_permutation(demand, K)
    return [expr(sid(d[k - 1], k, i, i) for k in range(1, K + 1) if k != i)
            for i in range(1, K + 1)]


def _file_blocks(spec: PartitionSpec, files: Sequence[bytes]) -> dict[SubfileId, Block]:
    if len(files) != spec.N:
        raise ConfigError(f"expected {spec.N} files, got {len(files)}")
    blocks: dict[SubfileId, Block] = {}
    for n, data in enumerate(files, start=1):
        blocks.update(split_file(data, spec, n))
    return blocks


def _materialize(e: Expr, blocks) -> CacheEntry:
    return CacheEntry(e, xor_all(blocks[s] for s in e))


def place(spec: PartitionSpec, files: Sequence[bytes]) -> list[UserCache]:
    if spec.N != spec.K:
        raise ConfigError("scheme requires N=K")
    blocks = _file_blocks(spec, files)
    return [UserCache(k, [_materialize(e, blocks) for e in rows])
            for k, rows in enumerate(placement_exprs(spec.K), start=1)]


def deliver(spec: PartitionSpec, demand: Sequence[int], files: Sequence[bytes]) -> list[CacheEntry]:
    if spec.N != spec.K:
        raise ConfigError("scheme requires N=K")
    check_permutation(demand, spec.K)
    blocks = _file_blocks(spec, files)
    return [_materialize(e, blocks) for e in delivery_exprs(demand)]


class _Acc:
    """Payload together with the set of subfiles it is the XOR of."""

    def __init__(self, e: Expr, payload: Block):
        self.ids = frozenset(e)
        self.payload = payload

    def add(self, e: Expr, payload: Block) -> "_Acc":
        self.ids = self.ids.symmetric_difference(e)
        self.payload = xor_blocks(self.payload, payload)
        return self

    @property
    def expr(self) -> Expr:
        return tuple(sorted(self.ids))


def decode(k: int, cache: UserCache, packets: Sequence[CacheEntry], demand: Sequence[int],
           spec: PartitionSpec, trace: list | None = None) -> bytes:
    """Recover ``W[d_k]`` at user ``k`` from its cache and the broadcast.

    If ``trace`` is a list, the symbolic value of every intermediate XOR is
    appended to it as ``(step, expr)``.
    """
    K = spec.K
    d = check_permutation(demand, K)
    if cache.user != k:
        raise IntegrityError(f"cache belongs to user {cache.user}, not {k}")
    expected = delivery_exprs(d)
    if [p.expr for p in packets] != expected:
        raise IntegrityError("broadcast does not match the delivery for this demand")
    stored = cache.lookup()

    def cached(e: Expr) -> Block:
        try:
            return stored[e]
        except KeyError:
            raise IntegrityError(f"user {k} cache lacks {' + '.join(map(str, e))}") from None

    def note(step, acc):
        if trace is not None:
            trace.append((step, acc.expr))

    want = d[k - 1]
    got: dict[SubfileId, Block] = {}

    def settle(acc: _Acc, target: SubfileId):
        if acc.expr != (target,):
            raise IntegrityError(f"decoding {target} left {acc.expr}")
        got[target] = acc.payload

    # subfiles whose pair avoids k are cached as-is
    for s in enumerate_subfiles(K, want):
        if k not in s.pair:
            got[s] = cached((s,))

    # stage A: strip the other users' (cached) subfiles from packet i
    for i in range(1, K + 1):
        if i == k:
            continue
        acc = _Acc(packets[i - 1].expr, packets[i - 1].payload)
        for m in range(1, K + 1):
            if m not in (i, k):
                e = (sid(d[m - 1], m, i, i),)
                acc.add(e, cached(e))
        note(f"A{i}", acc)
        settle(acc, sid(want, k, i, i))

    # stage B: turn packet k into sum_{j != k} W[d_j, a]^k, then peel
    a = normalize_anchor_pair(k, K)
    prev = _anchor_partner(k, K)
    acc = _Acc(packets[k - 1].expr, packets[k - 1].payload)
    for j in range(1, K + 1):
        if j in (k, prev):
            continue
        e = expr([SubfileId(d[j - 1], a, k), sid(d[j - 1], j, k, k)])
        acc.add(e, cached(e))
    note("B-anchor-sum", acc)
    e = expr(SubfileId(n, a, k) for n in range(1, K + 1))
    acc.add(e, cached(e))
    note("B-anchor", acc)
    anchor_sub = SubfileId(want, a, k)
    settle(acc, anchor_sub)
    for j in range(1, K + 1):
        if j in a:
            continue
        e = expr([anchor_sub, sid(want, j, k, k)])
        acc = _Acc((anchor_sub,), got[anchor_sub]).add(e, cached(e))
        note(f"B{j}", acc)
        settle(acc, sid(want, j, k, k))

    return reassemble(got, spec, want)


def measure(caches: Sequence[UserCache], packets: Sequence[CacheEntry], spec: PartitionSpec
            ) -> RatePoint:
    sizes = {c.bits for c in caches}
    if len(sizes) != 1:
        raise IntegrityError(f"unequal cache sizes: {sorted(sizes)}")
    bc = sum(p.bits for p in packets)
    return RatePoint(Fraction(sizes.pop(), spec.F_bits), Fraction(bc, spec.F_bits), f"kk(K={spec.K})")


def dump_caches(exprs: Sequence[Sequence[Expr]]) -> str:
    """One JSON record per cache entry, users and entries in canonical order."""
    lines = []
    for k, rows in enumerate(exprs, start=1):
        for e in rows:
            lines.append(json.dumps({"user": k, "expr": [s.to_json() for s in e]}))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CodedScheme:
    K: int

    @property
    def granularity_bits(self) -> int:
        return 8 * self.K * (self.K - 1)

    @property
    def label(self) -> str:
        return f"kk(K={self.K})"

    def run(self, files: Sequence[bytes], demand: Sequence[int]) -> RunResult:
        spec = PartitionSpec(self.K, self.K, 8 * len(files[0]))
        caches = place(spec, files)
        packets = deliver(spec, demand, files)
        measure(caches, packets, spec)
        decoded = [decode(k, caches[k - 1], packets, demand, spec) for k in range(1, self.K + 1)]
        return RunResult(decoded, caches[0].bits, sum(p.bits for p in packets), spec.F_bits)
