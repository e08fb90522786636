import io
import subprocess
import sys

import pytest

from qcomplement.cli import CSV_COLUMNS, main, parse_range, UsageError


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def rows(text):
    lines = text.strip("\n").split("\n")
    head = lines[0].split(",")
    return [dict(zip(head, map(float, line.split(",")))) for line in lines[1:]]


def test_parse_range():
    assert parse_range("0.3").count == 1
    r = parse_range("0:1:5")
    assert list(r.values()) == [0, 0.25, 0.5, 0.75, 1]
    assert parse_range("1e-3:10:4:log").values()[-1] == pytest.approx(10)
    for bad in ("0:1:0", "1:0:3", "a", "0:1", "0:1:3:cubic", "0:1:3:log"):
        with pytest.raises(UsageError):
            parse_range(bad)


def test_sweep_single_points():
    code, text = run("sweep", "--a", "0.5", "--b", "0", "--lambda", "1")
    assert code == 0
    assert text.split("\n")[0] == ",".join(CSV_COLUMNS)
    (row,) = rows(text)
    assert row["Ebar"] == pytest.approx(0.4, abs=1e-15)
    assert row["D"] == pytest.approx(0.2, abs=1e-15)
    assert row["Gbar"] == pytest.approx(0.6, abs=1e-15)
    assert row["margin_EG"] == pytest.approx(0.0, abs=1e-15)
    code, text = run("sweep", "--a", "0.5", "--lambda", "0")
    (row,) = rows(text)
    assert (row["Ebar"], row["D"], row["margin_ED"]) == pytest.approx((0, 1, 0), abs=1e-15)


def test_sweep_grid_file_is_deterministic(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["sweep", "--a", "0:0.5:6", "--theta", "0:0.785:4", "--lambda", "1e-3:50:5:log", "--phi", "0:3:2"]
    assert run(*argv, "--output", str(out1))[0] == 0
    assert run(*argv, "--output", str(out2))[0] == 0
    data = out1.read_bytes()
    assert data == out2.read_bytes()
    assert b"\r" not in data and data.endswith(b"\n")
    assert len(data.decode().strip().split("\n")) == 1 + 6 * 4 * 5 * 2
    first = data.decode().split("\n")[1].split(",")
    # 17 significant digits round-trip
    assert all(float(repr(float(x))) == float(x) for x in first)


def test_sweep_usage_errors(tmp_path):
    assert run("sweep", "--a", "0:0.5:0")[0] == 2
    assert run("sweep", "--a", "0.7")[0] == 2
    assert run("sweep", "--lambda", "-1")[0] == 2
    assert run("sweep", "--theta", "1.2")[0] == 2
    assert run("sweep", "--output", str(tmp_path / "missing" / "x.csv"))[0] == 2
    assert run("sweep", "--bogus")[0] == 2
    assert run()[0] == 2


def tokens(text):
    out = {}
    for line in text.splitlines():
        for tok in line.split():
            if "=" in tok:
                k, v = tok.split("=", 1)
                out[k] = v
    return out


def test_discriminate():
    code, text = run("discriminate", "--a", "0.5", "--b", "0", "--lambda", "1")
    assert code == 0
    eig = next(l for l in text.splitlines() if l.startswith("eigenvalues:")).split()[1:]
    assert [float(x) for x in eig] == pytest.approx([-0.3, 0.3], abs=1e-15)
    assert float(tokens(text)["Gbar"]) == pytest.approx(0.6, abs=1e-15)
    code, text = run("discriminate", "--a", "0.5", "--lambda", "0")
    t = tokens(text)
    assert code == 0 and float(t["Gbar"]) == 1.0
    assert float(t["P(e|0)"]) == 0.0 and float(t["P(e|1)"]) == 0.0
    code, text = run("discriminate", "--a", "0", "--b", "0.25", "--lambda", "1")
    assert code == 0 and "optimum <= prior-only: yes" in text
    assert run("discriminate", "--a", "0.8")[0] == 2
    assert run("discriminate", "--b", "0.9")[0] == 2


def test_povm():
    code, text = run("povm", "--lambda", "0")
    assert code == 0 and "D=1 " in text
    code, text = run("povm", "--lambda", "1")
    assert "D=0.20000000000000001" in text and "F=0.80000000000000004" in text
    assert "+0.894427190999916" in text  # 2/sqrt(5)
    code, text = run("povm", "--lambda", "1", "--theta", "0.39269908169872414", "--phi", "1.0")
    residual = float(text.split("completeness residual=")[1].split()[0])
    assert residual <= 1e-15
    assert run("povm", "--lambda", "-2")[0] == 2
    assert run("povm", "--theta", "1.0")[0] == 2


def field(text, key):
    for line in text.splitlines():
        if line.startswith(key + "="):
            return line.split("=", 1)[1]
    raise KeyError(key)


def test_eavesdrop():
    code, text = run("eavesdrop", "--eve", "--lambda-e", "0", "--pairs", "100000", "--seed", "7")
    assert code == 0 and field(text, "detection") == "true"
    assert abs(float(field(text, "s_estimate")) - 2**0.5) <= 0.1
    code, text = run("eavesdrop", "--no-eve", "--pairs", "100000", "--seed", "7")
    assert code == 0 and field(text, "detection") == "false"
    assert abs(float(field(text, "s_estimate")) - 2 * 2**0.5) <= 0.1
    code, text = run("eavesdrop", "--eve", "--lambda-e", "50")
    assert code == 0 and field(text, "detection") == "false" and field(text, "god_view_bound_holds") == "true"
    assert run("eavesdrop", "--eta", "2")[0] == 2
    assert run("eavesdrop", "--pairs", "0")[0] == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# monitoring run\neve = true\nlambda-e = 0  # strong\npairs = 20000\nseed = 3\n")
    code, text = run("eavesdrop", "--config", str(cfg))
    assert code == 0 and field(text, "detection") == "true" and field(text, "n_test") == "20000"
    # flags override the file
    code, text = run("eavesdrop", "--config", str(cfg), "--pairs", "5000")
    assert field(text, "n_test") == "5000"
    code, text = run("eavesdrop", "--config", str(cfg), "--no-eve")
    assert field(text, "detection") == "false"

    bad = tmp_path / "bad.cfg"
    bad.write_text("pairs 100\n")
    assert run("eavesdrop", "--config", str(bad))[0] == 2
    bad.write_text("colour = red\n")
    assert run("eavesdrop", "--config", str(bad))[0] == 2
    bad.write_text("pairs = many\n")
    assert run("eavesdrop", "--config", str(bad))[0] == 2
    assert run("eavesdrop", "--config", str(tmp_path / "nope.cfg"))[0] == 2

    sweep_cfg = tmp_path / "sweep.cfg"
    sweep_cfg.write_text("a = 0.5\nb = 0\nlambda = 1\n")
    code, text = run("sweep", "--config", str(sweep_cfg))
    assert code == 0 and rows(text)[0]["Gbar"] == pytest.approx(0.6)


SMALL_VERIFY = ("verify", "--n-random", "2000", "--mixed-samples", "50")


def test_verify_passes_and_is_deterministic():
    code, text = run(*SMALL_VERIFY, "--seed", "42")
    assert code == 0
    assert text.rstrip().endswith("overall: PASS")
    assert "worst margin_EG" in text
    assert "factorization reading matching the closed-form right-hand side: h2^2 - h1^2" in text
    assert run(*SMALL_VERIFY, "--seed", "42")[1] == text


def test_verify_injected_bug():
    code, text = run(*SMALL_VERIFY, "--inject-bug")
    assert code == 1
    assert "overall: FAIL" in text
    line = next(l for l in text.splitlines() if l.strip().startswith("check=E_bar+D<=1"))
    for key in ("a=", "b=", "lambda=", "phi="):
        assert key in line


def test_verify_usage():
    assert run("verify", "--mixed-samples", "0")[0] == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qcomplement", "povm", "--lambda", "1"], capture_output=True, text=True)
    assert res.returncode == 0 and "F=0.80000000000000004" in res.stdout
    res = subprocess.run([sys.executable, "-m", "qcomplement", "sweep", "--a", "0:0.5:0"], capture_output=True, text=True)
    assert res.returncode == 2 and "error:" in res.stderr
