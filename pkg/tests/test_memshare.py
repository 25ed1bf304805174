from fractions import Fraction
from itertools import permutations

import pytest

from codedcache.errors import ConfigError
from codedcache.memshare import plan_share, run_share
from codedcache.scheme_kk import CodedScheme
from codedcache.scheme_mn import MNScheme
from conftest import random_files

A3, B3 = CodedScheme(3), MNScheme(3, 3, 2)


def test_plan_endpoints():
    p1 = plan_share(1, A3, B3)
    assert (p1.F_a, p1.F_b) == (48, 0)
    p0 = plan_share(0, A3, B3)
    assert (p0.F_a, p0.F_b) == (0, 24)


def test_plan_half_k3():
    # lcm(6, 3) subfiles * 2 halves * 8 bits
    p = plan_share(Fraction(1, 2), A3, B3)
    assert p.F_bits == 96
    assert plan_share(Fraction(1, 2), A3, B3, F_hint=97).F_bits == 192


@pytest.mark.parametrize("alpha", [Fraction(1, 3), Fraction(2, 7), Fraction(5, 6)])
def test_plan_exact_split(alpha):
    p = plan_share(alpha, A3, B3)
    assert Fraction(p.F_a, p.F_bits) == alpha
    assert p.F_a % 48 == 0 and p.F_b % 24 == 0


def test_plan_errors():
    with pytest.raises(ConfigError):
        plan_share(Fraction(3, 2), A3, B3)
    with pytest.raises(ConfigError, match="multiple of"):
        plan_share(Fraction(1, 1009), A3, B3, F_cap=1000)


def test_midpoint_k3():
    plan = plan_share(Fraction(1, 2), A3, B3)
    files = random_files(3, plan.F_bits // 8)
    for d in permutations((1, 2, 3)):
        decoded, point = run_share(plan, files, d)
        assert decoded == [files[x - 1] for x in d]
    assert point.pair == (Fraction(11, 6), Fraction(5, 12))


@pytest.mark.parametrize("K", [4, 5])
def test_segment_general_k(K):
    plan = plan_share(Fraction(1, 3), CodedScheme(K), MNScheme(K, K, K - 1))
    files = random_files(K, plan.F_bits // 8, seed=K)
    d = tuple(range(K, 0, -1))
    decoded, p = run_share(plan, files, d)
    assert decoded == [files[x - 1] for x in d]
    assert p.R == Fraction(K + 1, K) - p.M / (K - 1)
    assert p.M == Fraction(1, 3) * Fraction(K * K - K - 1, K) + Fraction(2, 3) * (K - 1)


def test_wrong_file_size():
    plan = plan_share(Fraction(1, 2), A3, B3)
    with pytest.raises(ConfigError):
        run_share(plan, random_files(3, 5), (1, 2, 3))
