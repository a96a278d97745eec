import csv
import subprocess
import sys

import numpy as np
import pytest

from trispectral.basis import ParamTriple
from trispectral.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_VERIFY, cache_path, main
from trispectral.coupling import TABLE_VERSION, build_itilde
from trispectral.diffmat import assemble_x, read_coo


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_assemble_level_zero(tmp_path, capsys):
    assert main(["assemble", "--level", "0", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "D=1" in out and "max_skew_residual=0" in out
    assert (tmp_path / "X.txt").read_text() == ""
    assert (tmp_path / "Y.txt").read_text() == ""


def test_assemble_deterministic(tmp_path):
    for d in ("a", "b"):
        assert main(["assemble", "--level", "4", "--out", str(tmp_path / d)]) == EXIT_OK
    for name in ("X.txt", "Y.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    A = read_coo(tmp_path / "a" / "X.txt", 15)
    assert np.array_equal(A, assemble_x(4, (2, 2, 2)).dense)


def test_assemble_verify(tmp_path, capsys):
    assert main(["assemble", "--level", "4", "--verify", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("PASS") == 2 and "FAIL" not in out


def test_bench(tmp_path):
    path = tmp_path / "bench.csv"
    assert main(["bench", "--level", "20", "--alpha", "1", "--beta", "2", "--gamma", "3",
                 "--out", str(path), "--verify"]) == EXIT_OK
    rs = rows(path)
    assert [int(r["M"]) for r in rs] == [2, 5, 10, 20]
    for r in rs:
        M = int(r["M"])
        assert int(r["D"]) == (M + 1) * (M + 2) // 2
        assert float(r["max_rel_err_vs_dense"]) <= 1e-11
        assert 0.9 <= int(r["flops_F"]) / (2 * (M + 1) * (M + 2)) <= 1.1
    f10, f20 = (int(r["flops_F"]) for r in rs[2:])
    assert abs(f20 / f10 / 4 - 1) <= 0.15


def test_converge_example1(tmp_path, capsys):
    path = tmp_path / "c.csv"
    args = ["converge", "--function", "ex1_sqrt", "--alpha", "1", "--beta", "1", "--gamma", "1",
            "--out", str(path), "--verify"]
    assert main(args) == EXIT_OK
    err = capsys.readouterr().err
    assert "PASS" in err and "NON-SPECTRAL" not in err
    rs = rows(path)
    assert len(rs) == 45 and float(rs[-1]["e_2"]) <= 1e-8


def test_converge_example2_flag(tmp_path, capsys):
    assert main(["converge", "--function", "ex1_sqrt", "--out", str(tmp_path / "c.csv")]) == EXIT_OK
    assert "NON-SPECTRAL" in capsys.readouterr().err


def test_converge_example3(tmp_path, capsys):
    assert main(["converge", "--function", "ex3_sine", "--out", str(tmp_path / "c.csv"), "--verify"]) == EXIT_OK
    err = capsys.readouterr().err
    assert "polynomial" in err and "PASS" in err


def test_converge_custom_and_unknown(tmp_path):
    assert main(["converge", "--function", "custom:x*y*(1-x-y)", "--nmax", "3",
                 "--out", str(tmp_path / "c.csv")]) == EXIT_OK
    assert main(["converge", "--function", "nope"]) == EXIT_CONFIG


def test_evolve(tmp_path, capsys):
    path = tmp_path / "e.csv"
    assert main(["evolve", "--level", "6", "--dt", "0.01", "--tfinal", "0.1", "--out", str(path)]) == EXIT_OK
    rs = rows(path)
    assert len(rs) == 11 and float(rs[0]["t"]) == 0.0
    assert "drift" in capsys.readouterr().err
    assert main(["evolve", "--dt", "0"]) == EXIT_CONFIG
    assert main(["evolve", "--dt=-1e-3"]) == EXIT_CONFIG


@pytest.mark.parametrize("name, g", [("affine", lambda x, y: 1.0 + 2.0 * x - 3.0 * y),
                                     ("constant", lambda x, y: 1.0 + 0 * x)])
def test_lift_reproduces(name, g, tmp_path):
    path = tmp_path / "l.csv"
    assert main(["lift", "--function", name, "--grid", "6", "--out", str(path), "--verify"]) == EXIT_OK
    data = np.array([[float(r[c]) for c in ("x", "y", "mu")] for r in rows(path)])
    assert np.abs(data[:, 2] - g(data[:, 0], data[:, 1])).max() <= 1e-14


def test_lift_boundary_rows(tmp_path):
    path = tmp_path / "l.csv"
    assert main(["lift", "--out", str(path), "--verify"]) == EXIT_OK
    data = np.array([[float(r[c]) for c in ("x", "y", "mu")] for r in rows(path)])
    x, y, mu = data.T
    edge = (x == 0) | (y == 0) | np.isclose(x + y, 1, rtol=0, atol=1e-14)
    assert np.abs(mu[edge] - np.exp(x[edge]) * np.cos(2 * y[edge])).max() <= 1e-12


def test_csv_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["converge", "--function", "ex3_sine", "--nmax", "4", "--out", str(p)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("args", [["assemble", "--alpha", "0"], ["assemble", "--level", "201"],
                                  ["assemble", "--level", "-1"], ["converge", "--quad", "64"],
                                  ["converge", "--grid", "0"]])
def test_config_errors(args, capsys):
    assert main(args) == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["assemble", "--level", "2", "--out", str(blocker / "sub")]) == EXIT_IO
    assert main(["lift", "--out", str(tmp_path / "missing" / "l.csv")]) == EXIT_IO


def test_verify_failure_exit(tmp_path, capsys):
    # nmax=2 cannot reach the example-1 threshold
    args = ["converge", "--function", "ex1_sqrt", "--alpha", "1", "--beta", "1", "--gamma", "1",
            "--nmax", "2", "--verify", "--out", str(tmp_path / "c.csv")]
    assert main(args) == EXIT_VERIFY
    assert "FAIL" in capsys.readouterr().err


def test_cache(tmp_path):
    cache = tmp_path / "cache"
    args = ["assemble", "--level", "5", "--cache", str(cache), "--out", str(tmp_path / "o")]
    assert main(args) == EXIT_OK
    path = cache_path(cache, ParamTriple(2.0, 2.0, 2.0), 5)
    assert path.exists() and f"_v{TABLE_VERSION}" in path.name
    first = path.read_bytes()
    assert main(args) == EXIT_OK
    assert path.read_bytes() == first
    # stale version byte: ignored and rebuilt
    stale = bytearray(first)
    stale[32] = TABLE_VERSION + 1
    path.write_bytes(bytes(stale))
    assert main(args) == EXIT_OK
    assert path.read_bytes() == first
    assert np.array_equal(read_coo(tmp_path / "o" / "X.txt", 21), assemble_x(5, (2, 2, 2), build_itilde(5, (2, 2, 2))).dense)


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "trispectral", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "assemble" in r.stdout
