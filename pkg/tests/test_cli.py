import csv
import io
import json

import pytest

from levybarrier.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_price_default_config(capsys):
    code, out, _ = _run(capsys, "price", "--x", "0", "0.06", "--threads", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["x", "T", "value", "error_estimate", "method", "elapsed_ms", "flag"]
    assert abs(float(rows[0]["value"]) - 0.216239237263554) <= 1e-12
    assert rows[1]["flag"] == "knocked" and float(rows[1]["value"]) == 0.0


def test_price_byte_stable(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": {"nu": 1.2}, "payoff": {"kind": "digital", "a": -0.01},
                               "run": {"T": 0.25, "x": [-0.02, 0.0]}}))
    a = _run(capsys, "price", "--config", str(cfg), "--no-timing", "--threads", "2", "--dual-run")[1]
    b = _run(capsys, "price", "--config", str(cfg), "--no-timing", "--threads", "2", "--dual-run")[1]
    assert a == b and "0.0786094461300" in a


def test_unknown_config_key_exits_2(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"model": {"nu": 1.2, "sigma": 0.3}}))
    code, _, err = _run(capsys, "price", "--config", str(cfg))
    assert code == 2 and "sigma" in err and len(err.strip().splitlines()) == 1


def test_malformed_config_exits_2(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert _run(capsys, "price", "--config", str(cfg))[0] == 2


def test_method_model_mismatch_exits_2(capsys):
    code, _, err = _run(capsys, "price", "--nu", "0.2", "--mu", "0.02", "--method", "sinh", "--x", "0")
    assert code == 2 and "GWR" in err


def test_table_command(capsys, tmp_path):
    out = tmp_path / "t.csv"
    code, _, _ = _run(capsys, "table", "table1", "--T", "0.25", "--threads", "1", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 5
    assert max(abs(float(r["deviation"])) for r in rows) <= 1e-9


def test_table_unknown(capsys):
    assert _run(capsys, "table", "table9")[0] == 2


def test_curve_single_point_matches_price(capsys):
    code, out, _ = _run(capsys, "curve", "--points", "1", "--T", "0.25", "--threads", "1")
    assert code == 0
    row = list(csv.DictReader(io.StringIO(out)))[0]
    assert float(row["x"]) == 0.0
    assert abs(float(row["value"]) - 0.216239237263554) <= 1e-12


def test_curve_normalize_column(capsys):
    code, out, _ = _run(capsys, "curve", "--points", "9", "--normalize", "--T", "0.25")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 9
    assert all(float(r["normalized"]) > 0 for r in rows)


def test_selftest_pass_and_injected_failure(capsys):
    code, out, _ = _run(capsys, "selftest")
    assert code == 0 and "FAIL" not in out
    code, out, _ = _run(capsys, "selftest", "--zeta-scale", "3")
    assert code != 0 and "FAIL laplace sinh" in out


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["price", "--method", "euler"])
    assert exc.value.code == 2
