import math
from fractions import Fraction

import pytest

from common import FIXTURES
from wcc.cli import run_command

DB2 = str(FIXTURES / "db2.graph")
GM = str(FIXTURES / "gm.graph")


def run(capsys, *argv):
    code = run_command([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def report(text):
    return {ln.split(" ", 1)[0]: ln.split(" ", 1)[1] for ln in text.splitlines() if " " in ln}


def build_concat(tmp_path, capsys):
    pool = tmp_path / "pool.wccpool"
    inner = tmp_path / "inner.wccec"
    man = tmp_path / "code.wcccat"
    common = ["--graph", DB2, "--chain", "uniform"]
    assert run(capsys, "pool", "build", *common, "--n", 24, "--alpha", "1/2", "--zeta", "1/10",
               "--root", 0, "--out", pool)[0] == 0
    assert run(capsys, "expurgate", *common, "--codebook", pool, "--eps", "1/20", "--mode", "greedy",
               "--out", inner)[0] == 0
    code, out, _ = run(capsys, "concat", "plan", *common, "--inner", inner, "--K", 3, "--out", man)
    assert code == 0
    return man, report(out)


def test_analyze_gm(capsys):
    code, out, _ = run(capsys, "analyze", GM)
    assert code == 0
    rep = report(out)
    assert rep["irreducible"] == "true"
    cap = float(rep["capacity"].split()[0])
    assert cap == pytest.approx(math.log2((1 + math.sqrt(5)) / 2), abs=1e-12)
    assert out.splitlines()[-1].startswith("summary ")


def test_capacity_and_quantize(capsys, tmp_path):
    chain_file = tmp_path / "gm.chain"
    assert run(capsys, "capacity", GM, "--out", chain_file)[0] == 0
    code, out, _ = run(capsys, "quantize", "--graph", GM, "--chain", chain_file, "--n", 10)
    assert code == 0
    counts = [int(ln.split()[-1]) for ln in out.splitlines() if ln.startswith("count ")]
    assert sorted(counts) == [3, 3, 4]


def test_pool_build_db2_n8(capsys, tmp_path):
    out_file = tmp_path / "p.wccpool"
    code, out, _ = run(capsys, "pool", "build", "--graph", DB2, "--chain", "uniform", "--n", 8,
                       "--alpha", "1/2", "--zeta", "1/5", "--root", 0, "--out", out_file)
    assert code == 0 and report(out)["codewords"] == "2"
    words = out_file.read_text().splitlines()[6:]
    assert len(words) == 2
    code, out, _ = run(capsys, "pool", "verify", "--graph", DB2, "--chain", "uniform", "--codebook", out_file)
    assert code == 0 and report(out)["violations"] == "0"


def test_pool_sample_and_rate(capsys, tmp_path):
    code, out, _ = run(capsys, "pool", "build", "--graph", GM, "--n", 15, "--alpha", "1/2", "--zeta", "1/4",
                       "--root", "a", "--sample", 5, "--seed", 3)
    assert code == 0 and report(out)["seed"] == "3"
    code, out, _ = run(capsys, "pool", "rate", "--graph", DB2, "--chain", "uniform", "--n", 12,
                       "--alpha", "1/2", "--zeta", "1/5", "--root", 0, "--exact")
    assert code == 0
    rep = report(out)
    assert math.log2(int(rep["pool_exact"].split()[0])) >= float(rep["log2_pool_lower"].split()[0])


def test_rationals_must_be_exact(capsys):
    code, _, err = run(capsys, "pool", "build", "--graph", DB2, "--n", 8, "--alpha", "0.5", "--zeta", "1/5",
                       "--root", 0)
    assert code == 2 and "--alpha" in err


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "pool", "build", "--graph", DB2, "--n", 8, "--alpha", "1/2", "--zeta", "1/5",
               "--root", 0, "--seed", -1)[0] == 2


def test_domain_errors(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", tmp_path / "missing.graph")
    assert code == 1 and err.startswith("error:")
    code, _, _ = run(capsys, "bounds", "asymptotic", "--graph", DB2, "--chain", "uniform", "--alpha", "1/2",
                     "--zeta", "0/1", "--eps", "1/2")
    assert code == 1


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "finite", "--graph", DB2, "--chain", "uniform", "--n", 40,
                       "--alpha", "1/2", "--zeta", "1/5", "--root", 0, "--eps", "1/10")
    assert code == 0 and out.splitlines()[-1].startswith("summary bounds finite")
    code, out, _ = run(capsys, "bounds", "asymptotic", "--graph", DB2, "--chain", "uniform", "--alpha", "1/1",
                       "--zeta", "0/1", "--eps", "1/4")
    assert code == 0


def test_expurgate_reports_distance(capsys, tmp_path):
    pool = tmp_path / "fb.wccpool"
    fb = str(FIXTURES / "fb.graph")
    assert run(capsys, "pool", "build", "--graph", fb, "--chain", "uniform", "--n", 12, "--alpha", "1/2",
               "--zeta", "1/4", "--root", "v", "--out", pool)[0] == 0
    code, out, _ = run(capsys, "expurgate", "--graph", fb, "--chain", "uniform", "--codebook", pool,
                       "--eps", "3/10", "--seed", 4)
    assert code == 0
    rep = report(out)
    dist = rep["min_prefix_rel_distance"]
    assert dist == "inf" if rep["kept"].split()[0] in ("0", "1") else Fraction(dist) >= Fraction(1, 5)
    assert rep["seed"] == "4"


def test_concat_round_trip(capsys, tmp_path):
    man, plan = build_concat(tmp_path, capsys)
    assert plan["q"] == "7"
    code, out, _ = run(capsys, "concat", "encode", "--manifest", man, "--graph", DB2, "--message", "1 5 2")
    assert code == 0
    word = report(out)["codeword"].split()
    assert len(word) == 144
    word[0] = "1" if word[0] == "0" else "0"
    code, out, _ = run(capsys, "concat", "decode", "--manifest", man, "--graph", DB2, "--word", " ".join(word))
    assert code == 0 and report(out)["message"] == "1 5 2"
    code, out, _ = run(capsys, "simulate", "--manifest", man, "--graph", DB2, "--p", "1/100", "--trials", 50)
    assert code == 0 and report(out)["guaranteed_violations"].split()[0] == "0"


def test_tampered_manifest(capsys, tmp_path):
    man, _ = build_concat(tmp_path, capsys)
    _, out, _ = run(capsys, "concat", "encode", "--manifest", man, "--graph", DB2, "--message", "0 0 0")
    word = report(out)["codeword"]
    lines = man.read_text().splitlines()
    key, value = lines[-1].split(" ")
    assert key == "innerhash"
    flipped = ("0" if value[0] != "0" else "1") + value[1:]
    man.write_text("\n".join(lines[:-1] + [f"innerhash {flipped}"]) + "\n")
    code, _, err = run(capsys, "concat", "decode", "--manifest", man, "--graph", DB2, "--word", word)
    assert code == 1 and "hash" in err


def test_wrong_graph_for_manifest(capsys, tmp_path):
    man, _ = build_concat(tmp_path, capsys)
    code, _, err = run(capsys, "concat", "encode", "--manifest", man, "--graph", GM, "--message", "0 0 0")
    assert code == 1 and "hash" in err


def test_scale_plan_cli(capsys):
    code, out, _ = run(capsys, "concat", "plan", "--graph", DB2, "--chain", "uniform", "--target", 2**20,
                       "--root", 0)
    assert code == 0 and report(out)["n"].split()[0] == "40"
    assert run(capsys, "concat", "plan", "--graph", DB2, "--target", 2**20)[0] == 2
