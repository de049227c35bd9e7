"""Command-line interface: exit codes, JSON reports and file outputs."""

import json
import subprocess
import sys

import pytest

from modspace import __version__
from modspace.cli import EXIT_USAGE, main
from modspace.lattice import Sequence
from modspace.sampling import COMB_ATOM, make_window
from modspace.witnesses import box


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


DECIDE = ("decide", "--family", "modulation", "--n", "1")


class TestDecide:
    def test_algebra(self, capsys):
        code, rep = run_json(capsys, *DECIDE, "--kind", "product",
                             "--in", "inf,1,0,0", "--in", "inf,1,0,0", "--out", "inf,1,0,0")
        assert code == 0
        v = rep["verdict"]
        assert v["holds"] and v["spatial"]["tag"] == "B2" and v["frequency"]["tag"] == "A2"
        assert rep["schema"] == 1 and rep["version"] == __version__

    def test_convolution(self, capsys):
        code, rep = run_json(capsys, *DECIDE, "--kind", "convolution",
                             "--in", "1,1,0,0", "--in", "1,1,0,0", "--out", "1,1,0,0")
        assert code == 0
        assert rep["verdict"]["spatial"]["tag"] == "A2"
        assert rep["verdict"]["frequency"]["tag"] == "B2"

    def test_failing_product(self, capsys):
        code, rep = run_json(capsys, *DECIDE, "--kind", "product",
                             "--in", "2,2,0,0", "--in", "2,2,0,0", "--out", "2,2,0,0")
        assert code == 1
        assert not rep["verdict"]["holds"] and not rep["verdict"]["frequency"]["holds"]

    def test_embedding(self, capsys):
        code, rep = run_json(capsys, *DECIDE, "--kind", "embedding",
                             "--in", "2,2,1,1", "--out", "1,1,0,0")
        assert code == 0 and rep["verdict"]["holds"]

    def test_out_of_range(self, capsys):
        code, rep = run_json(capsys, *DECIDE, "--kind", "product",
                             "--in", "1/2,1,0,0", "--in", "1/2,1,0,0", "--out", "1/4,1,0,0")
        assert code == 2
        assert rep["error_type"] == "OutOfRange"

    def test_rationals_echoed_exactly(self, capsys):
        _, rep = run_json(capsys, *DECIDE, "--kind", "embedding",
                          "--in", "3/2,4/3,1/3,-2/5", "--out", "2,2,0,0")
        assert rep["query"]["inputs"][0] == {"p": "3/2", "q": "4/3", "s": "1/3", "t": "-2/5"}

    def test_deterministic(self, capsys):
        argv = (*DECIDE, "--kind", "product", "--in", "2,1,1,1", "--in", "inf,2,1,0",
                "--out", "2,2,0,0")
        a = run(capsys, *argv)
        b = run(capsys, *argv)
        assert a == b

    @pytest.mark.parametrize("argv", [
        (*DECIDE, "--kind", "product", "--in", "2,2,0,0", "--out", "2,2"),
        (*DECIDE, "--kind", "product", "--in", "x,2", "--in", "2,2", "--out", "2,2"),
        (*DECIDE, "--kind", "product", "--in", "2,2,0", "--in", "2,2", "--out", "2,2"),
        (*DECIDE, "--kind", "product", "--in", "2,2,1/0,0", "--in", "2,2", "--out", "2,2"),
        (*DECIDE, "--kind", "product", "--in", "2,2"),
        ("decide", "--family", "besov", "--kind", "product"),
        ("nonsense",),
        (),
    ])
    def test_usage_errors(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code == EXIT_USAGE
        assert out == "" and "modspace: error" in err


class TestOracle:
    def test_bounded(self, capsys):
        code, rep = run_json(capsys, "oracle", "--kind", "convolution",
                             "--in", "1", "--in", "1", "--out", "1")
        assert code == 0 and rep["verdict"] == "Bounded"

    def test_blowup_with_points_csv(self, capsys, tmp_path):
        code, rep = run_json(capsys, "oracle", "--kind", "convolution", "--in", "2",
                             "--in", "2", "--out", "2", "--no-confirm", "--out-dir", str(tmp_path))
        assert code == 1 and rep["verdict"] == "BlowUp"
        lines = (tmp_path / "oracle_points.csv").read_text().splitlines()
        assert lines[0] == "family,window,N,ratio"
        assert len(lines) == 1 + 5 * len(rep["reports"])

    def test_families_and_nmax(self, capsys):
        code, rep = run_json(capsys, "oracle", "--kind", "product", "--in", "4", "--in", "4",
                             "--out", "1", "--families", "Box", "--nmax", "64", "--no-confirm")
        assert code == 1
        assert rep["query"]["N_list"] == [8, 16, 32, 64]
        assert all(r["family"].startswith("Box") for r in rep["reports"])

    @pytest.mark.parametrize("extra", [("--families", "Nope"), ("--nmax", "16")])
    def test_usage(self, capsys, extra):
        code, _, _ = run(capsys, "oracle", "--kind", "product", "--in", "4", "--in", "4",
                         "--out", "1", *extra)
        assert code == EXIT_USAGE


class TestWitness:
    def test_box_csv(self, capsys):
        code, out, _ = run(capsys, "witness", "--witness", "box", "--N", "2")
        assert code == 0
        assert Sequence.from_csv(out) == box(2)

    def test_holder(self, capsys, tmp_path):
        code, out, _ = run(capsys, "witness", "--witness", "holder", "--N", "3",
                           "--in", "inf", "--in", "inf", "--out", "1", "--slot", "1",
                           "--out-dir", str(tmp_path))
        assert code == 0 and Sequence.from_csv(out) == box(3)
        assert (tmp_path / "witness_holder_N3.csv").read_text() == out

    def test_invalid_branch(self, capsys):
        code, _, _ = run(capsys, "witness", "--witness", "holder", "--in", "2", "--in", "2",
                         "--out", "2")
        assert code == EXIT_USAGE


class TestNorm:
    def test_lp_of_atom(self, capsys):
        code, rep = run_json(capsys, "norm", "--gen", "comb", "--index", "inf,1",
                             "--method", "lp", "--M", "1024")
        assert code == 0 and rep["value"] == pytest.approx(1.0)

    def test_input_csv(self, capsys, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text(make_window(COMB_ATOM, M=1024).to_csv())
        _, a = run_json(capsys, "norm", "--input", str(path), "--index", "2,1,1,0")
        _, b = run_json(capsys, "norm", "--gen", "comb", "--coeffs", "0:1", "--M", "1024",
                        "--index", "2,1,1,0")
        assert a["value"] == pytest.approx(b["value"], rel=1e-12)

    @pytest.mark.parametrize("method", ["discrete", "continuous", "wiener"])
    def test_methods(self, capsys, method):
        code, rep = run_json(capsys, "norm", "--gen", "gabor", "--coeffs", "1:1,-2:0.5",
                             "--M", "1024", "--index", "2,2,1,1", "--method", method)
        assert code == 0 and rep["value"] > 0

    def test_bad_coeffs(self, capsys):
        code, _, _ = run(capsys, "norm", "--coeffs", "1=2", "--index", "2,2")
        assert code == EXIT_USAGE


class TestPartitionCheck:
    @pytest.mark.parametrize("K,n", [(16, 1), (4, 2)])
    def test_pass(self, capsys, K, n):
        code, rep = run_json(capsys, "partition-check", "--K", str(K), "--n", str(n))
        assert code == 0 and rep["pass"] and rep["defect"] <= 1e-9

    def test_too_wide(self, capsys):
        code, _, _ = run(capsys, "partition-check", "--K", "40")
        assert code == EXIT_USAGE


class TestReport:
    def test_cross_form(self, capsys, tmp_path):
        code, rep = run_json(capsys, "report", "--suite", "cross-form", "--out-dir", str(tmp_path))
        assert code == 0
        assert rep["suites"]["cross-form"]["mismatches"] == []

    def test_partition_rows(self, capsys, tmp_path):
        code, rep = run_json(capsys, "report", "--suite", "partition", "--out-dir", str(tmp_path))
        assert code == 0
        assert (tmp_path / "partition.csv").read_text().startswith("K,L,M,defect,dim,support_leak")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "modspace.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == __version__
