import csv
import io
import subprocess
import sys

import pytest

from common import ROOT


def run_script(name, *args):
    out = subprocess.run([sys.executable, str(ROOT / "scripts" / name), *args], capture_output=True, text=True,
                         check=True, cwd=ROOT)
    return list(csv.DictReader(io.StringIO(out.stdout)))


def test_gv_curve_matches_closed_form():
    rows = run_script("gv_curve.py", "--points", "6")
    assert len(rows) == 6
    assert all(abs(float(r["difference"])) <= 1e-4 for r in rows)


def test_rate_table_lists_every_graph():
    rows = run_script("rate_table.py")
    assert {r["graph"] for r in rows} == {"fb", "db2", "gm"}
    assert all(float(r["R_ec"]) <= float(r["R2"]) + 1e-12 for r in rows)


@pytest.mark.parametrize("graph", ["db2", "gm"])
def test_channel_sim_never_violates_guarantee(graph):
    rows = run_script("channel_sim.py", "--graph", graph, "--trials", "100")
    assert rows[0]["message_error_rate"] == "0.00000"
    assert all(r["guaranteed_violations"] == "0" for r in rows)
