"""Exit criteria. Each test prints one ``criterion N: PASS|FAIL`` line (use -s)."""

import csv
import io
import time
from contextlib import contextmanager
from fractions import Fraction as Fr
from itertools import permutations
from math import comb

import pytest

from codedcache import bounds, entropy
from codedcache.cli import golden_text, main
from codedcache.memshare import plan_share, run_share
from codedcache.partition import PartitionSpec, sid
from codedcache.scheme_kk import (
    CodedScheme,
    decode,
    deliver,
    delivery_exprs,
    dump_caches,
    measure,
    place,
    placement_exprs,
)
from codedcache.scheme_mn import MNScheme
from conftest import random_files


@contextmanager
def criterion(n, what):
    try:
        yield
    except BaseException:
        print(f"\ncriterion {n}: FAIL  {what}")
        raise
    print(f"\ncriterion {n}: PASS  {what}")


@pytest.mark.parametrize("K", [2, 3, 4, 5, 6])
def test_c1_scheme_correctness(K):
    with criterion(1, f"K={K}: all {K}! demands decode, (M,R) exact"):
        t0 = time.perf_counter()
        spec = PartitionSpec.minimal(K)
        files = random_files(K, spec.file_bytes, seed=K)
        caches = place(spec, files)
        n = 0
        for d in permutations(range(1, K + 1)):
            packets = deliver(spec, d, files)
            for k in range(1, K + 1):
                assert decode(k, caches[k - 1], packets, d, spec) == files[d[k - 1] - 1]
                n += 1
            p = measure(caches, packets, spec)
            assert (p.M, p.R) == (Fr(K * K - K - 1, K), Fr(1, K - 1))
        assert n == K * len(list(permutations(range(K))))
        assert time.perf_counter() - t0 < 30


def test_c2_golden_placement():
    with criterion(2, "K=3 dump equals the hand transcription"):
        exprs = placement_exprs(3)
        assert dump_caches(exprs) == golden_text()
        for rows in exprs:
            assert len(rows) == 10
            assert sum(len(e) == 1 for e in rows) == 6
            assert sum(len(e) > 1 for e in rows) == 4


def test_c3_three_three_numbers():
    with criterion(3, "(3,3): broadcast F/2, cache 5F/3, packets for d=(1,2,3)"):
        spec = PartitionSpec.minimal(3, bytes_per_subfile=4)
        files = random_files(3, spec.file_bytes)
        caches = place(spec, files)
        packets = deliver(spec, (1, 2, 3), files)
        assert 2 * sum(p.bits for p in packets) == spec.F_bits
        assert all(3 * c.bits == 5 * spec.F_bits for c in caches)
        assert delivery_exprs((1, 2, 3)) == [
            tuple(sorted([sid(2, 1, 2, 1), sid(3, 1, 3, 1)])),
            tuple(sorted([sid(3, 2, 3, 2), sid(1, 1, 2, 2)])),
            tuple(sorted([sid(1, 1, 3, 3), sid(2, 2, 3, 3)])),
        ]


@pytest.mark.parametrize("K", [2, 3, 4, 5, 6])
def test_c4_bound_tightness(K):
    with criterion(4, f"K={K}: K*M + K(K-1)*R = K^2-1"):
        spec = PartitionSpec.minimal(K)
        files = random_files(K, spec.file_bytes)
        p = measure(place(spec, files), deliver(spec, tuple(range(1, K + 1)), files), spec)
        assert K * p.M + K * (K - 1) * p.R == K * K - 1
        assert bounds.theorem2_bound(K, p.M) == p.R
        if K == 3:
            assert 3 * p.M + 6 * p.R == 8


@pytest.mark.parametrize("K", [3, 4, 5])
def test_c5_exact_tradeoff_segment(K):
    with criterion(5, f"K={K}: zero gap on [(K^2-K-1)/K, K-1]"):
        lo, hi = Fr(K * K - K - 1, K), Fr(K - 1)
        grid = bounds.rational_grid(lo, hi, 24)
        assert len(grid) >= 20
        rows = bounds.gap_report(K, K, grid)
        assert all(r.gap == 0 for r in rows)
        outside = bounds.gap_report(K, K, bounds.rational_grid(0, K, 30))
        assert all(r.gap >= 0 for r in outside)
        print(f"K={K} max gap outside segment: {max(r.gap for r in outside)}")


def test_c6_memory_sharing():
    with criterion(6, "K=3 sharing lands on R = 4/3 - M/2, bit-exact"):
        a, b = CodedScheme(3), MNScheme(3, 3, 2)
        for alpha in (Fr(0), Fr(1, 4), Fr(1, 2), Fr(3, 4), Fr(1)):
            plan = plan_share(alpha, a, b)
            files = random_files(3, plan.F_bits // 8, seed=alpha.denominator)
            for d in permutations((1, 2, 3)):
                decoded, p = run_share(plan, files, d)
                assert decoded == [files[x - 1] for x in d]
            assert p.R == Fr(4, 3) - p.M / 2
            assert p.pair == (alpha * Fr(5, 3) + (1 - alpha) * 2,
                              alpha * Fr(1, 2) + (1 - alpha) * Fr(1, 3))


@pytest.mark.parametrize("K", [2, 3, 4, 5, 6])
def test_c7_entropy_suite(K):
    with criterion(7, f"K={K}: rank checks of the converse"):
        rep = entropy.run_suite(K, lemma2_max_size=3 if K == 6 else None)
        assert rep.all_passed, rep.failures()[:5]
        names = {r.check for r in rep.rows}
        assert {"decodability", "rotation-all-but-last", "rotation-last", "lemma2"} <= names
        if K in (3, 4, 5):
            chain = [r for r in rep.rows if r.check.startswith("theorem2")]
            assert len(chain) == len(entropy.theorem2_chain(entropy.build_variables(K)))
            assert all(r.passed for r in chain)


@pytest.mark.parametrize("K, r", [(K, r) for K in (2, 3, 4) for r in range(K + 1)])
def test_c8_mn_baseline(K, r):
    with criterion(8, f"MN K={K} r={r}: (Nr/K, (K-r)/(1+r)), bit-exact"):
        s = MNScheme(K, K, r)
        files = random_files(K, comb(K, r), seed=r)
        for d in permutations(range(1, K + 1)):
            res = s.run(files, d)
            assert res.decoded == [files[x - 1] for x in d]
            assert res.point == (Fr(K * r, K), Fr(K - r, 1 + r))


# vertices of the lower-bound curve drawn for (3,3)
GRAY = [(Fr(0), Fr(3)), (Fr(1, 3), Fr(2)), (Fr(2, 3), Fr(4, 3)), (Fr(1), Fr(1)),
        (Fr(7, 6), Fr(5, 6)), (Fr(5, 3), Fr(1, 2)), (Fr(2), Fr(1, 3)), (Fr(3), Fr(0))]


def gray_at(M):
    for (m0, r0), (m1, r1) in zip(GRAY, GRAY[1:]):
        if m0 <= M <= m1:
            return r0 + (M - m0) / (m1 - m0) * (r1 - r0)
    raise ValueError(M)


def test_c9_fig2_reproduction(tmp_path):
    with criterion(9, "K=3 tradeoff CSV: breakpoints and bound lines"):
        out = tmp_path / "fig2.csv"
        assert main(["tradeoff", "-K", "3", "--out", str(out)]) == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        got = {(r["M"], r["R_envelope"]) for r in rows}
        for M, R in [(Fr(1, 3), 2), (Fr(1, 2), Fr(5, 3)), (1, 1), (Fr(5, 3), Fr(1, 2)), (2, Fr(1, 3))]:
            assert (bounds.fmt(Fr(M)), bounds.fmt(Fr(R))) in got
        grid = bounds.tradeoff_grid(3, 3)
        for row in bounds.gap_report(3, 3, grid):
            if Fr(5, 3) <= row.M <= 2:
                assert row.R_lemma1 == gray_at(row.M)
            assert row.R_lower <= gray_at(row.M)
        for M, R in [GRAY[0], GRAY[1], GRAY[5], GRAY[6], GRAY[7]]:
            assert bounds.max_lower_bound(3, 3, M) == R
