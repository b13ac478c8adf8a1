import csv
import io
import json
import subprocess
import sys

import pytest

from jetmorse.cli import ConfigError, config_hash, dumps, main, parse_config, serialize_config


def invoke(tmp_path, capsys, command, doc, *extra):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    code = main([command, "--config", str(path), *extra])
    out = capsys.readouterr()
    return code, out.out, out.err


def payload(out):
    return json.loads(out)["payload"]


# -- single runs -----------------------------------------------------------------


def test_dim(tmp_path, capsys):
    code, out, _ = invoke(tmp_path, capsys, "dim", {"k": 2, "m": 2, "r": 1})
    assert code == 0 and payload(out) == {"dimension": 2}
    rec = json.loads(out)
    assert rec["command"] == "dim" and len(rec["config_hash"]) == 64
    assert rec["provenance"]["tool"] == "jetmorse" and "timestamp" in rec


def test_jets_lists_profiles(tmp_path, capsys):
    code, out, _ = invoke(tmp_path, capsys, "jets", {"k": 2, "m": 2, "r": 1})
    assert payload(out) == {"count": 2, "profiles": [[[2], [0]], [[0], [1]]], "truncated": False}
    code, out, _ = invoke(tmp_path, capsys, "jets", {"k": 3, "m": 6, "r": 2, "limit": 3})
    p = payload(out)
    assert p["truncated"] and len(p["profiles"]) == 3


def test_certify(tmp_path, capsys):
    code, out, _ = invoke(tmp_path, capsys, "certify", {"model": "P1xP1", "eta": "2*w1+3*w2", "grid": 8})
    p = payload(out)
    assert code == 0 and p["positive"] is True and p["margin"] == 12
    code, out, _ = invoke(tmp_path, capsys, "certify", {"model": "P1xP1", "eta": "2*w1-3*w2", "grid": 8})
    assert payload(out)["positive"] is False


def test_morse_payload(tmp_path, capsys):
    code, out, _ = invoke(tmp_path, capsys, "morse", {"model": "P1xP1", "field": "1*w1-2*w2", "grid": 8, "m": 3})
    p = payload(out)
    assert code == 0
    assert p["integrals"] == [0, 4, 0]
    assert p["exact_cohomology"] == [0, 20, 0]
    assert p["wm_bound"][1] == 18


def test_bounded_and_closure(tmp_path, capsys):
    _, out, _ = invoke(tmp_path, capsys, "bounded", {"d": 1, "weights": [[0, "1/2"]], "m": 2})
    assert payload(out) == {"dimension": 2}
    _, out, _ = invoke(tmp_path, capsys, "closure", {"generators": [[2, 0], [0, 3]], "beta": [1, 2]})
    p = payload(out)
    assert p["generators"] == [[2, 0], [1, 2], [0, 3]] and p["member"] is True
    _, out, _ = invoke(tmp_path, capsys, "closure", {"generators": [[1]], "p": "5/2"})
    assert payload(out)["generators"] == [[3]] and payload(out)["p"] == "5/2"


def test_gg_record_fields(tmp_path, capsys):
    doc = {"vb": {"w": [[-1]]}, "theta_F": "0*w", "k": 2, "N": 4000, "seed": 5}
    code, out, _ = invoke(tmp_path, capsys, "gg", doc)
    p = payload(out)
    assert code == 0
    for key in ("value", "stderr", "N", "seed", "config_hash", "rhs", "ratio"):
        assert key in p
    assert p["seed"] == 5 and p["N"] == 4000 and p["value"] > 0
    code, out2, _ = invoke(tmp_path, capsys, "gg", doc, "--seed", "6")
    assert payload(out2)["value"] != p["value"]


# -- errors and exit codes ---------------------------------------------------------


@pytest.mark.parametrize(
    "command,doc,key",
    [
        ("bounded", {"d": 1, "weights": [[0, "1/0"]], "m": 2}, "weights[0]"),
        ("dim", {"k": 2, "m": 2, "r": 1, "colour": 3}, "colour"),
        ("dim", {"k": 2, "m": 2}, "r"),
        ("dim", {"k": 0, "m": 2, "r": 1}, "k"),
        ("dim", {"k": 2, "m": {"range": [1, 3]}, "r": {"values": [1, 2]}}, "r"),
        ("morse", {"model": "P3", "field": "w"}, "model"),
        ("morse", {"model": "P2", "field": "w1"}, "field"),
        ("closure", {"generators": [[1, 0]], "beta": [1]}, "beta"),
        ("dim", {"command": "morse", "k": 1, "m": 1, "r": 1}, "command"),
        ("dim", {"k": 1, "m": 1, "r": 1, "ratio": {"numerator": "dimension", "denominator": "dimension"}}, "ratio"),
    ],
)
def test_validation_errors_name_the_key(tmp_path, capsys, command, doc, key):
    code, out, err = invoke(tmp_path, capsys, command, doc)
    assert code == 2 and out == ""
    info = json.loads(err)["error"]
    assert info["type"] == "validation" and info["key"] == key and info["message"]


def test_invalid_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["dim", "--config", str(path)]) == 2
    assert json.loads(capsys.readouterr().err)["error"]["key"] == "config"


def test_degenerate_field_exits_3(tmp_path, capsys):
    code, out, _ = invoke(tmp_path, capsys, "morse", {"model": "P1xP1", "field": "0*w", "grid": 4})
    assert code == 3 and payload(out)["flagged"] is True


def test_output_file_and_csv(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, out, _ = invoke(tmp_path, capsys, "dim", {"k": 2, "m": 3, "r": 1}, "--format", "csv", "--output", str(target))
    assert code == 0 and out == ""
    assert target.read_text() == "dimension\n2\n"


# -- sweeps ------------------------------------------------------------------------


def _table(out):
    rows = list(csv.reader(io.StringIO(out)))
    return rows[0], rows[1:]


def test_dim_sweep(tmp_path, capsys):
    code, out, _ = invoke(tmp_path, capsys, "dim", {"k": 2, "m": {"range": [1, 10]}, "r": 1}, "--format", "csv")
    header, rows = _table(out)
    assert code == 0 and header == ["m", "dimension"]
    assert [int(r[1]) for r in rows] == [1, 2, 2, 3, 3, 4, 4, 5, 5, 6]


def test_morse_sweep_ratio(tmp_path, capsys):
    doc = {"model": "P1", "field": "3*w", "grid": 8, "m": {"range": [1, 6]},
           "ratio": {"numerator": "exact_cohomology.0", "denominator": "wm_bound.0"}}
    code, out, _ = invoke(tmp_path, capsys, "morse", doc, "--format", "csv")
    header, rows = _table(out)
    col = header.index("ratio_column")
    for row in rows:
        m = int(row[0])
        assert float(row[col]) == pytest.approx(1 + 1 / (3 * m), rel=1e-11)


def test_gg_sweep_columns(tmp_path, capsys):
    doc = {"vb": {"w": [[-1]]}, "k": {"values": [2, 3]}, "N": 2000,
           "ratio": {"numerator": "value", "denominator": "rhs"}}
    code, out, _ = invoke(tmp_path, capsys, "gg", doc, "--format", "csv")
    header, rows = _table(out)
    assert code == 0 and len(rows) == 2
    for col in ("k", "value", "stderr", "ratio", "ratio_stderr", "ratio_column"):
        assert col in header


def test_sweep_json_has_records_and_table(tmp_path, capsys):
    code, out, _ = invoke(tmp_path, capsys, "bounded", {"d": 2, "m": {"values": [1, 2, 3]}})
    doc = json.loads(out)
    assert [r["payload"]["dimension"] for r in doc["records"]] == [3, 5, 7]
    assert doc["table"]["columns"] == ["m", "dimension"]


def test_ranged_parameter_validation():
    with pytest.raises(ConfigError) as exc:
        parse_config({"k": 2, "m": {"range": [1, 3], "values": [1]}, "r": 1}, "dim")
    assert exc.value.key == "m"
    with pytest.raises(ConfigError) as exc:
        parse_config({"k": 2, "m": {"range": [3, 1]}, "r": 1}, "dim")
    assert exc.value.key == "m.range"
    with pytest.raises(ConfigError) as exc:
        parse_config({"k": 2, "m": {"range": [1, 3], "stride": 2}, "r": 1}, "dim")
    assert exc.value.key == "m.stride"


# -- hashing and reproducibility --------------------------------------------------------


def test_hash_stable_under_reordering_and_round_trip():
    a = {"model": "P1xP1", "eta": "2*w1+3*w2", "grid": 8, "seed": 4}
    b = dict(reversed(list(a.items())))
    ca, cb = parse_config(a, "certify"), parse_config(b, "certify")
    assert config_hash(ca) == config_hash(cb)
    again = parse_config(json.loads(dumps(serialize_config(ca))), "certify")
    assert config_hash(again) == config_hash(ca)
    sweep_cfg = parse_config({"k": 2, "m": {"range": [1, 4]}, "r": 1}, "dim")
    back = parse_config(json.loads(dumps(serialize_config(sweep_cfg))), "dim")
    assert config_hash(back) == config_hash(sweep_cfg) and back.sweep_values == [1, 2, 3, 4]
    gg = parse_config({"vb": {"w": [["1/3"]]}, "k": 2, "eps": [1, "1/5"]}, "gg")
    assert config_hash(parse_config(json.loads(dumps(serialize_config(gg))), "gg")) == config_hash(gg)


def test_repeat_runs_identical_payload(tmp_path, capsys):
    doc = {"model": "P1xP1", "field": "w1-w2+y1", "grid": 10}
    first = invoke(tmp_path, capsys, "morse", doc)[1]
    second = invoke(tmp_path, capsys, "morse", doc)[1]
    assert json.dumps(payload(first)) == json.dumps(payload(second))


def test_console_entry_point(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"k": 3, "m": 3, "r": 1}))
    res = subprocess.run([sys.executable, "-m", "jetmorse.cli", "dim", "--config", str(path)],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["payload"] == {"dimension": 3}
