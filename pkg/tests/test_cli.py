import json

from ppforge.cli import main

HALF_POWER_SPEC = json.dumps({
    "schema_version": 1,
    "family": "half_power",
    "field": "3^1:2",
    "params": {"k": 1, "a": "nonzero", "b": "nonzero", "delta": "all"},
})


def test_field_info(capsys):
    assert main(["field-info", "3^1:2"]) == 0
    out = capsys.readouterr().out
    assert "order q^n      9" in out
    assert "x^2 + 1" in out
    assert "|D0|           4" in out
    assert "generator" in out


def test_field_info_nonprime(capsys):
    assert main(["field-info", "4^1:1"]) == 2
    assert "not prime" in capsys.readouterr().err


def test_field_info_order_64(capsys):
    assert main(["field-info", "2^2:3"]) == 0
    out = capsys.readouterr().out
    assert "order q^n      64" in out


def test_field_info_parse_error_position(capsys):
    assert main(["field-info", "3^1:x"]) == 2
    assert "position" in capsys.readouterr().err


def test_verify_half_power_grid(capsys):
    assert main(["verify", HALF_POWER_SPEC]) == 0
    out = capsys.readouterr().out
    assert "grid size    576" in out
    assert "agreements   576" in out


def test_verify_json_output_round_trips(capsys):
    assert main(["verify", HALF_POWER_SPEC, "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["agreements"] == 576
    assert doc["disagreements"] == []
    assert doc["spec"]["family"] == "half_power"
    # the embedded spec is itself a valid input
    assert main(["verify", json.dumps(doc["spec"])]) == 0


def test_verify_malformed_json(capsys):
    assert main(["verify", "{not json"]) == 2
    assert "error" in capsys.readouterr().err


def test_verify_unknown_family(capsys):
    assert main(["verify", '{"family": "nope", "field": "3^1:2"}']) == 2
    assert "unknown" in capsys.readouterr().err


def test_verify_reports_skips_without_failing(capsys):
    spec = json.dumps({
        "family": "additive_g",
        "field": "3^1:2",
        "params": {"g": [{"kind": "m_sum", "h": {"mono": 1}, "d": 2},
                         {"kind": "trace_of_h", "h": {"mono": 1}}],
                   "L": ["identity"], "delta": "all"},
    })
    assert main(["verify", spec]) == 0
    out = capsys.readouterr().out
    assert "skipped      9" in out
    assert "bad_divisor" in out


def test_verify_csv(tmp_path, capsys):
    out_csv = tmp_path / "rows.csv"
    assert main(["verify", HALF_POWER_SPEC, "--csv", str(out_csv)]) == 0
    rows = out_csv.read_text().splitlines()
    assert rows[0] == "k,a,b,delta,predicted,observed,status,cycle_type"
    assert len(rows) == 577


def test_verify_threads_match_sequential(tmp_path):
    one = tmp_path / "one.csv"
    four = tmp_path / "four.csv"
    assert main(["verify", HALF_POWER_SPEC, "--csv", str(one)]) == 0
    assert main(["verify", HALF_POWER_SPEC, "--csv", str(four), "--threads", "4"]) == 0
    assert one.read_bytes() == four.read_bytes()


def test_census_default_grid(tmp_path, capsys):
    out_csv = tmp_path / "census.csv"
    assert main(["census", "n4k", "3^1:4", "-o", str(out_csv)]) == 0
    rows = out_csv.read_text().splitlines()
    assert rows[0] == "variant,delta,a,predicted,observed,status,cycle_type"
    assert len(rows) == 1 + 324
    assert all(",agree," in row or row.startswith("variant") for row in rows)


def test_census_split_matches_residue_classes(tmp_path):
    out_csv = tmp_path / "hp.csv"
    assert main(["census", "half_power", "3^1:2", "-o", str(out_csv)]) == 0
    import csv

    from ppforge.gf import ResidueClass, make_field
    f9 = make_field(3, 1, 2)
    with open(out_csv) as fh:
        for row in csv.DictReader(fh):
            a = f9.from_coords([int(c) for c in row["a"].split(",")])
            b = f9.from_coords([int(c) for c in row["b"].split(",")])
            expected = (a * b).residue_class() == ResidueClass.D0
            assert row["predicted"] == str(expected).lower()
            assert row["status"] == "agree"


def test_census_empty_grid(tmp_path, capsys):
    out_csv = tmp_path / "empty.csv"
    assert main(["census", "half_power", "3^1:2", "-o", str(out_csv),
                 "--params", '{"k": 1, "a": [], "b": "nonzero", "delta": "all"}']) == 0
    rows = out_csv.read_text().splitlines()
    assert rows == ["k,a,b,delta,predicted,observed,status,cycle_type"]


def test_census_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(["census", "half_power", "3^1:2", "-o", str(a)]) == 0
    assert main(["census", "half_power", "3^1:2", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_agw_check(capsys):
    spec = json.dumps({
        "family": "even_t",
        "field": "3^1:2",
        "params": {"t": [0, 2], "delta": "sign_kernel",
                   "L": ["identity", "trace"]},
    })
    assert main(["agw-check", spec]) == 0
    out = capsys.readouterr().out
    assert "12 satisfy the fiber criterion" in out


def test_cap_flag(capsys):
    assert main(["verify", HALF_POWER_SPEC, "--cap", "4"]) == 2
    assert "exceeds cap" in capsys.readouterr().err


def test_cap_env(capsys, monkeypatch):
    monkeypatch.setenv("PPFORGE_CAP", "4")
    assert main(["verify", HALF_POWER_SPEC]) == 2
    monkeypatch.setenv("PPFORGE_CAP", "1000")
    assert main(["verify", HALF_POWER_SPEC]) == 0


def test_usage_error_exit_code(capsys):
    assert main(["no-such-command"]) == 2


def test_seed_flag_feeds_random_pp(capsys):
    spec = json.dumps({
        "family": "additive_g",
        "field": "3^1:2",
        "params": {"g": [{"kind": "trace_of_h", "h": {"mono": 2}}],
                   "L": ["random_pp"], "delta": "all"},
    })
    assert main(["verify", spec, "--seed", "5"]) == 0
