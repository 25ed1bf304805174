"""Lower bounds, the achievable-point atlas and the achievable envelope.

All values are exact ``Fraction``s in file units; floats appear only when a
table is written out.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence


@dataclass(frozen=True)
class RatePoint:
    M: Fraction
    R: Fraction
    source: str = ""
    verified: bool = True

    def __post_init__(self):
        object.__setattr__(self, "M", Fraction(self.M))
        object.__setattr__(self, "R", Fraction(self.R))
        if self.M < 0 or self.R < 0:
            raise ValueError(f"negative rate point ({self.M}, {self.R})")

    @property
    def pair(self) -> tuple[Fraction, Fraction]:
        return (self.M, self.R)


@dataclass(frozen=True)
class BoundLine:
    """The half-plane ``a*M + b*R >= c`` restricted to ``M`` in ``m_range``."""

    a: Fraction
    b: Fraction
    c: Fraction
    source: str
    m_range: tuple[Fraction, Fraction] | None = None

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError("BoundLine needs b > 0")

    def rate_at(self, M) -> Fraction:
        return max(Fraction(0), (Fraction(self.c) - Fraction(self.a) * Fraction(M)) / Fraction(self.b))

    def satisfied_by(self, p: RatePoint) -> bool:
        return self.a * p.M + self.b * p.R >= self.c


def theorem2_line(K: int) -> BoundLine:
    return BoundLine(Fraction(K), Fraction(K * (K - 1)), Fraction(K * K - 1), f"kk-converse(K={K})")


# Computer-derived (3, 3) bound; numerically equal to theorem2_line(3), kept
# separately so it is labeled as its own curve.
LEMMA1 = BoundLine(Fraction(3), Fraction(6), Fraction(8), "tian(3,3)")


def theorem2_bound(K: int, M) -> Fraction:
    """Smallest rate allowed by ``K*M + K(K-1)*R >= K^2 - 1`` (N = K)."""
    if K < 2:
        raise ValueError("K must be at least 2")
    return theorem2_line(K).rate_at(M)


def lemma1_bound(M) -> Fraction:
    return LEMMA1.rate_at(M)


def cutset_bound(N: int, K: int, M) -> Fraction:
    """``max_s (s - s*M / floor(N/s))`` over ``s = 1..min(N, K)``, floored at 0."""
    M = Fraction(M)
    best = Fraction(0)
    for s in range(1, min(N, K) + 1):
        best = max(best, s - s * M / (N // s))
    return best


def max_lower_bound(N: int, K: int, M) -> Fraction:
    vals = [cutset_bound(N, K, M)]
    if N == K:
        vals.append(theorem2_bound(K, M))
        if K == 3:
            vals.append(lemma1_bound(M))
    return max(vals)


def new_scheme_point(K: int) -> RatePoint:
    return RatePoint(Fraction(K * K - K - 1, K), Fraction(1, K - 1), f"kk(K={K})")


def mn_point(N: int, K: int, r: int) -> RatePoint:
    return RatePoint(Fraction(N * r, K), Fraction(K - r, 1 + r), f"mn(r={r})")


def _binom(n: int, k: int) -> int:
    return comb(n, k) if n >= 0 else 0


def atlas_points(N: int, K: int) -> list[RatePoint]:
    """Every formula-generated point of the prior-work points plus the new one.

    Points of schemes that have no bit-level implementation here are marked
    ``verified=False``.
    """
    pts: list[RatePoint] = []
    if N <= K:
        pts.append(RatePoint(Fraction(1, K), N * (1 - Fraction(1, K)), "chen", verified=False))
    if 1 < N <= K:
        pts.append(RatePoint(Fraction(N - 1, K), N * (1 - Fraction(N, 2 * K)), "amiri-gunduz",
                             verified=False))
    for q in range(1, N + 1):
        R = N * (1 - Fraction(N + 1, K * (q + 1)))
        if R >= 0:
            pts.append(RatePoint(Fraction(N, K * q), R, f"gomez-vilardebo(q={q})", verified=False))
    if K > 1:
        for t in range(0, N + 1):
            M = Fraction(t * ((N - 1) * t + K - N), K * (K - 1))
            R = N * (1 - Fraction(t, K))
            if M >= 0 and R >= 0:
                pts.append(RatePoint(M, R, f"tian-chen(t={t})", verified=False))
    for r in range(0, K + 1):
        pts.append(mn_point(N, K, r))
        yu = Fraction(_binom(K, r + 1) - _binom(K - N, r + 1), comb(K, r))
        pts.append(RatePoint(Fraction(N * r, K), yu, f"yu(r={r})", verified=False))
    if N == K and K >= 2:
        pts.append(new_scheme_point(K))
    return pts


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_envelope(points: Iterable[RatePoint]) -> list[RatePoint]:
    """Breakpoints of the lower convex, non-increasing envelope of ``points``.

    Collinear interior points are dropped. Beyond the last breakpoint the
    envelope is flat (unused memory costs nothing).
    """
    best: dict[Fraction, RatePoint] = {}
    for p in points:
        cur = best.get(p.M)
        if cur is None or p.R < cur.R or (p.R == cur.R and p.verified and not cur.verified):
            best[p.M] = p
    if not best:
        raise ValueError("lower_envelope needs at least one point")
    hull: list[RatePoint] = []
    for p in sorted(best.values(), key=lambda q: q.M):
        while len(hull) >= 2 and _cross(hull[-2].pair, hull[-1].pair, p.pair) <= 0:
            hull.pop()
        hull.append(p)
    # truncate after the minimum rate so the envelope never increases
    i_min = min(range(len(hull)), key=lambda i: (hull[i].R, i))
    return hull[: i_min + 1]


def envelope_at(breakpoints: Sequence[RatePoint], M) -> tuple[Fraction, str]:
    """Envelope value at ``M`` and a label for the schemes that achieve it."""
    M = Fraction(M)
    if M < breakpoints[0].M:
        raise ValueError(f"M={M} below the smallest achievable memory {breakpoints[0].M}")
    for p in breakpoints:
        if p.M == M:
            return p.R, p.source
    for lo, hi in zip(breakpoints, breakpoints[1:]):
        if lo.M < M < hi.M:
            t = (M - lo.M) / (hi.M - lo.M)
            return lo.R + t * (hi.R - lo.R), f"{lo.source}+{hi.source}"
    last = breakpoints[-1]
    return last.R, last.source


@dataclass(frozen=True)
class GapRow:
    M: Fraction
    R_envelope: Fraction
    R_theorem2: Fraction | None
    R_cutset: Fraction
    R_lemma1: Fraction | None
    source: str

    @property
    def R_lower(self) -> Fraction:
        return max(v for v in (self.R_theorem2, self.R_cutset, self.R_lemma1) if v is not None)

    @property
    def gap(self) -> Fraction:
        return self.R_envelope - self.R_lower


def rational_grid(lo, hi, steps: int) -> list[Fraction]:
    lo, hi = Fraction(lo), Fraction(hi)
    return [lo + (hi - lo) * Fraction(j, steps) for j in range(steps + 1)]


def gap_report(N: int, K: int, M_grid: Iterable, points: Iterable[RatePoint] | None = None
               ) -> list[GapRow]:
    env = lower_envelope(atlas_points(N, K) if points is None else points)
    rows = []
    for M in M_grid:
        M = Fraction(M)
        R, src = envelope_at(env, M)
        rows.append(GapRow(
            M=M,
            R_envelope=R,
            R_theorem2=theorem2_bound(K, M) if N == K else None,
            R_cutset=cutset_bound(N, K, M),
            R_lemma1=lemma1_bound(M) if N == K == 3 else None,
            source=src,
        ))
    return rows


CSV_COLUMNS = ["M", "R_envelope", "R_theorem2", "R_cutset", "R_lemma1", "gap", "achieving_source"]


def fmt(x: Fraction | None) -> str:
    return "" if x is None else format(float(x), ".12g")


def tradeoff_grid(N: int, K: int, steps: int = 60) -> list[Fraction]:
    """Uniform grid over ``[0, N]`` merged with the envelope breakpoints."""
    env = lower_envelope(atlas_points(N, K))
    return sorted(set(rational_grid(0, N, steps)) | {p.M for p in env})


def gap_csv(rows: Iterable[GapRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([fmt(r.M), fmt(r.R_envelope), fmt(r.R_theorem2), fmt(r.R_cutset),
                    fmt(r.R_lemma1), fmt(r.gap), r.source])
    return buf.getvalue()
