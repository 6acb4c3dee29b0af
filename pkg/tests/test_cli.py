import csv
import json

import numpy as np
import pytest

import airyphase.engine
from airyphase import cli
from airyphase.config import ConfigError, load_config, parse_config
from airyphase.validate import vacuum_cubic_closed_form


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


def write_scene(tmp_path, data, name="scene.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


# -- configuration ----------------------------------------------------------------------


def test_defaults_and_resolution():
    cfg = parse_config({"gate": {"preset": "fig1-qbc"}})
    res = cfg.resolved()
    assert res["gate"] == {"gamma": [0.0, 0.0, 2.0, 0.2], "mode": 0, "repetitions": 1, "preset": None}
    assert parse_config(res).resolved() == res


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="state.colour"):
        parse_config({"state": {"colour": "red"}})
    with pytest.raises(ConfigError, match="grid.n_q"):
        parse_config({"grid": {"n_q": 1}})


def test_physical_revalidation():
    with pytest.raises(ConfigError):
        parse_config({"gate": {"gamma": [0, 0, 1, 0], "mode": 1}})
    with pytest.raises(ConfigError):
        parse_config({"state": {"ops": [{"op": "squeeze", "mode": 3, "r": 2.0}]}})
    with pytest.raises(ConfigError):
        parse_config({"gate": {"preset": "nope"}})
    with pytest.raises(ConfigError):
        parse_config({"gate": {"preset": "tdw", "gamma": [0, 0, 1, 0]}})


def test_state_composition():
    cfg = parse_config({
        "conventions": {"hbar": 2.0},
        "state": {"base": "thermal", "n_bar": 1.0, "ops": [
            {"op": "squeeze", "r": 2.0},
            {"op": "displace", "q": 1.0, "p": -1.0},
        ]},
    })
    st = cfg.build_state()
    assert st.hbar == 2.0
    np.testing.assert_allclose(st.mean, [1.0, -1.0])
    np.testing.assert_allclose(np.diag(st.cov), [3.0 * 4, 3.0 / 4])
    two = parse_config({"state": {"base": "tmss", "r": 1.5, "ops": [{"op": "beamsplitter", "theta": 0.3}]}})
    assert two.build_state().n_modes == 2


def test_yaml_loading(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text("gate:\n  preset: tdw\ngrid:\n  n_q: 5\n  n_p: 7\n")
    cfg = parse_config(load_config(path))
    assert cfg.grid.n_p == 7 and cfg.build_gate().gamma == (15.0, -7.0, 0.0, 0.2)
    bad = tmp_path / "bad.yaml"
    bad.write_text("gate: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(bad)


# -- commands ------------------------------------------------------------------------------


def test_wigner_fig1_cubic(tmp_path):
    out = tmp_path / "w.csv"
    assert cli.main(["wigner", "--preset", "fig1-cubic", "--out", str(out)]) == 0
    header, data = read_csv(out)
    assert header == ["q", "p", "w", "sign", "ln_mag"]
    assert data.shape == (101 * 101, 5)
    assert data[:, 2].min() < 0
    # row-major: q varies slowest
    assert np.all(data[:101, 0] == -5.0) and data[1, 1] > data[0, 1]
    assert (tmp_path / "w.csv.scene.json").exists()


def test_wigner_accumulation_matches_tripled_coefficients(tmp_path):
    a = write_scene(tmp_path, {"gate": {"preset": "fig1-qbc", "repetitions": 3}, "grid": {"n_q": 21, "n_p": 21}}, "a.json")
    b = write_scene(tmp_path, {"gate": {"gamma": [0, 0, 6.0, 0.6]}, "grid": {"n_q": 21, "n_p": 21}}, "b.json")
    assert cli.main(["wigner", "--config", a, "--out", str(tmp_path / "a.csv")]) == 0
    assert cli.main(["wigner", "--config", b, "--out", str(tmp_path / "b.csv")]) == 0
    _, da = read_csv(tmp_path / "a.csv")
    _, db = read_csv(tmp_path / "b.csv")
    # 3 * 0.2 and 0.6 differ in the last bit, so only agreement to rounding is expected
    np.testing.assert_allclose(da[:, 2], db[:, 2], rtol=1e-12, atol=1e-12 * np.abs(db[:, 2]).max())


def test_wigner_unbounded_regime(tmp_path):
    scene = write_scene(tmp_path, {"gate": {"gamma": [0, 0, 2.0, -0.2]}, "grid": {"n_q": 31, "n_p": 31}})
    out = tmp_path / "u.csv"
    assert cli.main(["wigner", "--config", scene, "--out", str(out)]) == 0
    _, data = read_csv(out)
    assert np.all(np.isfinite(data[:, 2])) and data[:, 2].min() < 0


def test_round_trip_byte_identical(tmp_path):
    scene = write_scene(tmp_path, {"gate": {"preset": "fig1-qbc"}, "state": {"base": "thermal", "n_bar": 0.5},
                                   "grid": {"n_q": 17, "n_p": 23}})
    first = tmp_path / "first.csv"
    assert cli.main(["wigner", "--config", scene, "--out", str(first), "--threads", "3"]) == 0
    sidecar = str(first) + ".scene.json"
    second = tmp_path / "second.csv"
    assert cli.main(["wigner", "--config", sidecar, "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    js1, js2 = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["cut", "--config", scene, "--format", "json", "--out", str(js1)]) == 0
    embedded = json.loads(js1.read_text())["config"]
    resolved = write_scene(tmp_path, embedded, "resolved.json")
    assert cli.main(["cut", "--config", resolved, "--format", "json", "--out", str(js2)]) == 0
    assert js1.read_bytes() == js2.read_bytes()


def test_json_grid(tmp_path):
    out = tmp_path / "g.json"
    assert cli.main(["wigner", "--preset", "fig1-cubic", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["gate"]["gamma"] == [0.0, 0.0, 2.0, 0.0]
    assert len(doc["grid"]["values"]) == 101 * 101


def test_cut_matches_closed_form(tmp_path, capsys):
    assert cli.main(["cut", "--preset", "fig1-cubic"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    np.testing.assert_allclose(data[:, 2], vacuum_cubic_closed_form(2.0, 0.0, data[:, 1]), rtol=1e-10)


def test_negativity_report(tmp_path):
    scene = write_scene(tmp_path, {"gate": {"preset": "fig1-cubic"}, "state": {"base": "thermal", "n_bar": 1.0}})
    out = tmp_path / "n.json"
    assert cli.main(["negativity", "--config", scene, "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["min_value"] < 0 and doc["negative_volume"] > 0
    assert doc["config"]["state"]["n_bar"] == 1.0


def test_squeezing_ordering(tmp_path):
    ratios = {}
    for preset in ("fig1-cubic", "tdw"):
        out = tmp_path / f"{preset}.json"
        assert cli.main(["squeezing", "--preset", preset, "--format", "json", "--out", str(out)]) == 0
        ratios[preset] = json.loads(out.read_text())["ratio"]
    assert ratios["fig1-cubic"] < ratios["tdw"]


def test_momentum_command(tmp_path):
    out = tmp_path / "m.csv"
    assert cli.main(["momentum", "--preset", "fig2-cubic-k1", "--out", str(out)]) == 0
    header, data = read_csv(out)
    assert header == ["p", "density"] and np.all(data[:, 1] >= 0)
    assert cli.main(["momentum", "--preset", "fig1-qbc"]) == 2


def test_config_error_exit_code(tmp_path, capsys):
    scene = write_scene(tmp_path, {"grid": {"n_q": 1}})
    assert cli.main(["wigner", "--config", scene]) == 2
    assert "grid.n_q" in capsys.readouterr().err
    assert cli.main(["wigner", "--config", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["wigner", "--threads", "0"]) == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["wigner", "--format", "xml"])
    assert info.value.code == 2


def test_numerical_error_exit_code(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise airyphase.errors.UnboundedSupportError("extent cap reached")

    monkeypatch.setattr(cli.analysis, "negativity", boom)
    assert cli.main(["negativity", "--preset", "fig1-cubic"]) == 3


def test_csv_is_fixed_format():
    assert cli.fmt(0.1) == "1.0000000000000001e-01"
    assert cli.fmt(-np.inf) == "-inf"
    assert cli.fmt(1e-320) == "9.9998886718268301e-321"


def test_validate_passes_on_clean_build(tmp_path):
    scene = write_scene(tmp_path, {"validate": {"grid_n": 5}})
    out = tmp_path / "v.json"
    assert cli.main(["validate", "--config", scene, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] and len(doc["cases"]) == 22
    small = [c for c in doc["cases"] if c["name"].startswith("cubic(0.05)")]
    assert small and small[0]["passed"]


def test_validate_negative_control(tmp_path, monkeypatch, capsys):
    # corrupt the Gaussian scale k of the closed form by one percent
    good = airyphase.engine._gaussian_scale
    monkeypatch.setattr(airyphase.engine, "_gaussian_scale", lambda var: 1.01 * good(var))
    scene = write_scene(tmp_path, {"validate": {"grid_n": 3}})
    assert cli.main(["validate", "--config", scene]) == 1
    err = capsys.readouterr().err
    assert "FAIL" in err and "worst:" in err


def test_bench(tmp_path, capsys):
    scene = write_scene(tmp_path, {"bench": {"n": 11, "repeats": 2}})
    out = tmp_path / "b.json"
    assert cli.main(["bench", "--config", scene, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    for r in doc["results"]:
        assert r["max_deviation"] <= 1e-6
        assert r["failed_points"] == []
        assert r["max_imag_residual"] <= 1e-8
    assert "speedup" in capsys.readouterr().out
