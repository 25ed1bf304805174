import json

import pytest

from codedcache.cli import config_from_args, golden_diff, golden_text, main
from codedcache.errors import ConfigError
from codedcache.scheme_kk import dump_caches, placement_exprs


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_verify_k3(capsys):
    code, out = run(capsys, "verify", "-K", "3")
    assert code == 0
    assert "demands: 6/6 pass" in out
    assert "decodes: 18/18 bit-exact" in out
    assert "measured: M=5/3 R=1/2" in out
    assert "(tight)" in out


def test_verify_k4_explicit_demand(capsys):
    code, out = run(capsys, "verify", "-K", "4", "--demand", "2,4,1,3")
    assert code == 0 and "demands: 1/1 pass" in out and "M=11/4 R=1/3" in out


def test_verify_mn(capsys):
    code, out = run(capsys, "verify", "-K", "3", "--scheme", "mn", "-r", "1")
    assert code == 0 and "M=1 R=1" in out


def test_verify_parallel_matches_serial(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "-K", "4", "--json", str(a)]) == 0
    assert main(["verify", "-K", "4", "--jobs", "3", "--json", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_deterministic_output(tmp_path):
    outs = []
    for n in range(2):
        p = tmp_path / f"v{n}.txt"
        main(["verify", "-K", "3", "--seed", "99", "--F-bits", "96", "--out", str(p)])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert b"seed=99" in outs[0] and b"prng=" in outs[0]


@pytest.mark.parametrize("argv", [
    ["verify", "-K", "3", "--demand", "1,1,2"],
    ["verify", "-K", "3", "--F-bits", "50"],
    ["verify", "-K", "1"],
    ["verify", "-K", "3", "-N", "4"],
    ["golden", "-K", "4"],
    ["share", "--alpha", "3/2"],
])
def test_config_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_argparse_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["nope"])
    assert exc.value.code == 2


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\nK = 4\nseed = 7\nalpha = 1/4\n")
    c = config_from_args(["share", "--config", str(cfg), "--seed", "8"])
    assert (c.K, c.seed, c.alpha, c.r, c.N) == (4, 8, 0.25, 3, 4)
    cfg.write_text("bogus = 1\n")
    with pytest.raises(ConfigError):
        config_from_args(["verify", "--config", str(cfg)])


def test_golden(capsys, tmp_path):
    code, out = run(capsys, "golden")
    assert code == 0 and "no diff" in out
    lines = golden_text().splitlines(True)
    # swap two stage-2 pairwise sums of user 1
    lines[6], lines[7] = lines[7], lines[6]
    mutated = tmp_path / "g.jsonl"
    mutated.write_text("".join(lines))
    code, out = run(capsys, "golden", "--golden", str(mutated))
    assert code == 1 and out.startswith("---")


def test_golden_diff_negative_control():
    exprs = placement_exprs(3)
    exprs[0][6], exprs[0][7] = exprs[0][7], exprs[0][6]
    assert golden_diff(dump_caches(exprs), golden_text())


def test_tradeoff_csv(capsys, tmp_path):
    p = tmp_path / "t.csv"
    assert main(["tradeoff", "-K", "3", "--out", str(p)]) == 0
    rows = p.read_text().splitlines()
    assert rows[0].startswith("M,R_envelope")
    assert any(r.startswith("1.66666666667,0.5,") for r in rows)


def test_entropy_cmd(capsys, tmp_path):
    j = tmp_path / "e.json"
    code, out = run(capsys, "entropy", "-K", "3", "--json", str(j))
    assert code == 0
    assert "K*M+K(K-1)*R = 8 with M=5/3 R=1/2" in out
    data = json.loads(j.read_text())
    assert data and all(r["pass"] for r in data)
    assert {"check", "K", "params", "lhs", "rhs", "relation", "pass"} <= set(data[0])


def test_entropy_k2(capsys):
    assert run(capsys, "entropy", "-K", "2")[0] == 0


def test_bounds_cmd(capsys):
    code, out = run(capsys, "bounds", "-K", "4")
    assert code == 0 and "# max gap on [11/4, 3]: 0" in out


def test_share_cmd(capsys):
    code, out = run(capsys, "share", "-K", "3", "--alpha", "1/2")
    assert code == 0
    assert "M=11/6 R=5/12" in out and "on R=(K+1)/K-M/(K-1): True" in out
