import csv
import io
import json

import pytest

from kpb import cli
from kpb.errors import ConfigError


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_spectrum_config():
    cfg = cli.parse_config(["spectrum", "--a", "0.1", "--sigma", "1", "--ell", "0.02",
                            "--gamma", "0"])
    assert cfg.command == "spectrum"
    assert (cfg["a"], cfg["sigma"], cfg["ell"], cfg["gamma"]) == (0.1, 1, 0.02, 0.0)


def test_gamma_out_of_range_is_config_error():
    with pytest.raises(ConfigError) as info:
        cli.parse_config(["spectrum", "--ell", "0.1", "--gamma", "0.7"])
    assert info.value.key == "gamma"


def test_flags_override_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"a": 0.05, "ell_range": [0.1, 0.2, 3], "sigma": -1}))
    cfg = cli.parse_config(["scan", "--config", str(path), "--a", "0.1"])
    assert cfg["a"] == 0.1
    assert cfg["sigma"] == -1
    assert cfg["ell_range"] == (0.1, 0.2, 3)


@pytest.mark.parametrize("payload,key", [({"nope": 1}, "nope"), ({"a": "big"}, "a"),
                                         ({"sigma": 2}, "sigma"), ({"n_trunc": 1.5}, "n_trunc")])
def test_bad_file_values(tmp_path, payload, key):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(ConfigError) as info:
        cli.parse_config(["wave", "--config", str(path)])
    assert info.value.key == key


def test_unknown_flag_exits_2(capsys):
    code, _, err = run(["wave", "--bogus", "1"], capsys)
    assert code == 2 and "config error" in err


def test_bad_range_exits_2(capsys):
    code, _, _ = run(["scan", "--ell-range", "0.3:0.1:4"], capsys)
    assert code == 2


def test_scan_rows_and_header(capsys):
    code, out, _ = run(["scan", "--a", "0.05", "--sigma", "1", "--gamma", "0.25",
                        "--ell-range", "0.25:0.40:64"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["gamma", "ell", "max_re", "k_u", "n_L", "krein_ok"]
    assert len(rows) == 65
    assert any(r[3] == "1" for r in rows[1:]) and any(r[3] == "0" for r in rows[1:])
    assert all(r[5] == "true" for r in rows[1:])


def test_csv_floats_round_trip(capsys):
    _, out, _ = run(["scan", "--a", "0.1", "--ell-range", "0.01:0.05:5"], capsys)
    rows = list(csv.reader(io.StringIO(out)))[1:]
    for r in rows:
        for text in r[:3]:
            assert format(float(text), ".17g") == text
    assert rows[0][1] == format(0.01, ".17g")


def test_scan_failure_flushes_partial_rows(monkeypatch, capsys):
    import kpb.scanner as sc
    from kpb.errors import NoConvergence
    real = sc.evaluate

    def flaky(w, sigma, gamma, ell, *args):
        if ell > 0.03:
            raise NoConvergence("synthetic")
        return real(w, sigma, gamma, ell, *args)

    monkeypatch.setattr(sc, "evaluate", flaky)
    code, out, _ = run(["scan", "--a", "0.1", "--ell-range", "0.01:0.05:5"], capsys)
    assert code == 1
    lines = out.strip().splitlines()
    assert len(lines) == 1 + 3 + 1
    assert lines[-1].startswith("# FAILED")


def test_computational_error_exits_1(capsys):
    code, _, err = run(["boundary", "--a", "0.1", "--sigma", "-1",
                        "--bracket", "0.005:0.05"], capsys)
    assert code == 1 and "NoSignChange" in err


def test_spectrum_json_round_trip(capsys):
    argv = ["spectrum", "--a", "0.1", "--ell", "0.02", "--n-trunc", "16"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["schema_version"] == cli.SCHEMA_VERSION
    assert rec["command"] == "spectrum"
    assert rec["provenance"]["n_trunc"] == 16
    assert rec["results"]["unstable_count"] == 1
    assert json.loads(cli.render_json(rec)) == rec
    eig = rec["results"]["eigenvalues"]
    assert all(len(z) == 2 for z in eig)


def test_output_is_deterministic(capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"o{i}.json"
        assert cli.main(["bubble", "--a", "0.05", "--gamma", "0.5", "--coarse-step",
                         "0.004", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_dispersion_csv(capsys):
    code, out, _ = run(["dispersion", "--sigma", "-1", "--ell", "0.8"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["k", "omega", "mu"]
    assert len(rows) == 1 + 2 * 401
    for k, om, mu in rows[1:]:
        k, om, mu = float(k), float(om), float(mu)
        assert abs(om - (-k ** 3 + k + 0.64 / k)) < 1e-12 * max(1, abs(om))
        assert abs(mu - (k * k - 1 - 0.64 / k ** 2)) < 1e-12 * max(1, abs(mu))


def test_collisions_json(capsys):
    code, out, _ = run(["collisions", "--sigma", "-1", "--pairs", "2:1"], capsys)
    [c] = json.loads(out)["results"]["collisions"]
    assert code == 0 and abs(c["ell"] - 2.0) < 1e-12 and c["eigen_gap"] <= 1e-8


def test_wave_json(capsys):
    code, out, _ = run(["wave", "--a", "0.1"], capsys)
    res = json.loads(out)["results"]
    assert code == 0 and res["cos_amps"][1] == 0.1 and res["residual"] <= 1e-12


def test_csv_not_available_for_json_commands(capsys):
    code, _, _ = run(["wave", "--format", "csv"], capsys)
    assert code == 2


def test_nonfinite_becomes_null():
    assert json.loads(cli.render_json({"x": float("inf"), "z": 1 + 2j})) == \
        {"x": None, "z": [1.0, 2.0]}


def test_verify_quick_reports_every_check(capsys):
    code, out, err = run(["verify", "--quick"], capsys)
    lines = [ln for ln in err.splitlines() if ln.startswith("[")]
    assert len(lines) == 11
    checks = json.loads(out)["results"]["checks"]
    assert code == (0 if all(c["passed"] for c in checks) else 1)
