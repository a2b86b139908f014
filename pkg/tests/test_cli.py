import csv
import io
import json
import subprocess
import sys

import pytest

from ougap import cli, model1d


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_table_rows(capsys):
    code, out, _ = run(["table"], capsys)
    assert code == 0
    data = rows(out)
    assert data[0] == ["D", "lambda1_scaled", "lambda2_scaled", "gap_normalized"]
    by_d = {r[0]: [float(v) for v in r[1:]] for r in data[1:]}
    assert by_d["7.0"] == pytest.approx([24.771932, 76.264955, 1.739111], abs=1e-5)
    assert by_d["8.0"] == pytest.approx([32.063557, 96.863410, 2.188533], abs=1e-5)
    assert "\r\n" in out


def test_table_zero_row(capsys):
    _, out, _ = run(["table", "-D", "0"], capsys)
    assert rows(out)[1] == ["0.0", "9.869604", "39.478418", "1.000000"]


def test_table_json(capsys):
    _, out, _ = run(["table", "-D", "1", "-D", "2", "--format", "json"], capsys)
    data = json.loads(out)
    assert [r["D"] for r in data] == [1.0, 2.0]


def test_figure(capsys):
    code, out, _ = run(["figure"], capsys)
    data = rows(out)[1:]
    assert code == 0 and len(data) == 100
    g = [float(r[1]) for r in data]
    assert all(b > a for a, b in zip(g, g[1:]))
    assert data[0] == ["0.1", "1.000000"]
    assert data[-1][0] == "10.0" and float(data[-1][1]) == pytest.approx(3.378412, abs=1e-5)


def test_solve1d_ou(capsys):
    code, out, _ = run(["solve1d", "-D", "10", "--gauge", "ou"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["gauge"] == "ornstein_uhlenbeck"
    assert rec["lambda1"] == pytest.approx(1.421e-5, abs=1e-6)


def test_solve1d_csv(capsys):
    _, out, _ = run(["solve1d", "-D", "2", "--format", "csv"], capsys)
    data = rows(out)
    assert float(dict(zip(*data))["gap"]) == pytest.approx(7.440203, abs=1e-6)


def test_solve2d_disk(tmp_path, capsys):
    f = tmp_path / "disk.txt"
    f.write_text("type = ellipse\na = 1\nb = 1\n")
    code, out, _ = run(["solve2d", "--domain", str(f), "-h", "0.03125"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["verdict"] == "pass" and rec["margin"] > 0
    assert rec["diameter"] == 2.0


def test_solve2d_malformed(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("type = rectangle\nw = 1\nheight = 2\n")
    code, _, err = run(["solve2d", "--domain", str(f)], capsys)
    assert code == 2 and "'h'" in err


def test_solve2d_missing_file(tmp_path, capsys):
    code, _, _ = run(["solve2d", "--domain", str(tmp_path / "none.txt")], capsys)
    assert code == 2


def test_verify_pass(capsys):
    code, out, _ = run(["verify", "gap-monotone", "--suite", "table"], capsys)
    data = json.loads(out)
    assert code == 0
    assert {d["claim_id"] for d in data} == {"gap-monotone", "table"}


def test_verify_single(capsys):
    code, out, _ = run(["verify", "gap-monotone"], capsys)
    assert code == 0 and len(json.loads(out)) == 1


def test_verify_unknown(capsys):
    code, _, err = run(["verify", "nonsense"], capsys)
    assert code == 2 and "nonsense" in err


def test_verify_corrupted(monkeypatch, capsys):
    real = model1d.solve_scaled
    monkeypatch.setattr(model1d, "solve_scaled", lambda D, N=None: (real(D, N)[0], real(D, N)[1] + 1e-3))
    code, _, err = run(["verify", "table", "small-diameter-limit"], capsys)
    assert code == 1
    assert "table" in err and "small-diameter-limit" in err


@pytest.mark.parametrize("argv", [
    ["table", "-N", "16"],
    ["figure", "--range", "5:1:0.1"],
    ["solve1d"],
])
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_bad_range_syntax(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["table", "--range", "1:2"])
    assert info.value.code == 2


def test_numerical_failure_exit_code(monkeypatch, capsys):
    from ougap.errors import ConvergenceError

    def boom(*a, **k):
        raise ConvergenceError("no", {})
    monkeypatch.setattr(model1d, "solve_model", boom)
    assert run(["solve1d", "-D", "1"], capsys)[0] == 3


def test_out_file_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["figure", "--range", "1:3:0.5", "--out", str(a)]) == 0
    assert cli.main(["figure", "--range", "1:3:0.5", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_output_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        cli.main(["verify", "log-concavity", "--seed", "7", "--out", str(p)])
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())[0]["inputs"]["seed"] == 7


def test_json_non_finite():
    assert json.loads(cli.to_json({"x": float("inf")})) == {"x": None}


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ougap", "table", "-D", "1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert rows(res.stdout)[1][1] == "9.877771"
