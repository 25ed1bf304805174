"""Memory sharing between two schemes on a prefix/suffix split of each file."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Protocol, Sequence

from codedcache.bounds import RatePoint
from codedcache.errors import ConfigError
from codedcache.scheme_kk import RunResult


class Scheme(Protocol):
    granularity_bits: int
    label: str

    def run(self, files: Sequence[bytes], demand: Sequence[int]) -> RunResult: ...


@dataclass(frozen=True)
class SharePlan:
    alpha: Fraction
    scheme_a: Scheme
    scheme_b: Scheme
    F_bits: int

    @property
    def F_a(self) -> int:
        return int(self.alpha * self.F_bits)

    @property
    def F_b(self) -> int:
        return self.F_bits - self.F_a


def plan_share(alpha, scheme_a: Scheme, scheme_b: Scheme, F_hint: int = 1,
               F_cap: int = 1 << 24) -> SharePlan:
    """Smallest ``F >= F_hint`` giving each segment a size its scheme accepts."""
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ConfigError(f"alpha={alpha} outside [0, 1]")
    p, q = alpha.numerator, alpha.denominator
    # F = q*t, F_a = p*t, F_b = (q-p)*t
    step = 1
    for share, g in ((p, scheme_a.granularity_bits), (q - p, scheme_b.granularity_bits)):
        if share:
            step = lcm(step, g // gcd(share, g))
    unit = q * step
    F = unit * max(1, -(-F_hint // unit))
    if F > F_cap:
        raise ConfigError(f"need F to be a multiple of {unit} bits, above cap {F_cap}")
    return SharePlan(alpha, scheme_a, scheme_b, F)


def run_share(plan: SharePlan, files: Sequence[bytes], demand: Sequence[int]
              ) -> tuple[list[bytes], RatePoint]:
    if any(8 * len(f) != plan.F_bits for f in files):
        raise ConfigError(f"files must be {plan.F_bits // 8} bytes for this plan")
    cut = plan.F_a // 8
    K = len(demand)
    pieces = [[b""] * K, [b""] * K]
    cache_bits = broadcast_bits = 0
    for side, scheme, seg in ((0, plan.scheme_a, [f[:cut] for f in files]),
                              (1, plan.scheme_b, [f[cut:] for f in files])):
        if not seg[0]:
            continue
        res = scheme.run(seg, demand)
        pieces[side] = res.decoded
        cache_bits += res.cache_bits
        broadcast_bits += res.broadcast_bits
    decoded = [a + b for a, b in zip(*pieces)]
    label = f"share({plan.scheme_a.label},{plan.scheme_b.label},alpha={plan.alpha})"
    return decoded, RatePoint(Fraction(cache_bits, plan.F_bits),
                              Fraction(broadcast_bits, plan.F_bits), label)
