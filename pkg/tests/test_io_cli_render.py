import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from stitlab.cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main
from stitlab.geometry import ConvexPolytope, Q
from stitlab.io import (
    ConfigError,
    load_config,
    parse_config,
    read_events,
    read_tessellation,
    tessellation_from_dict,
    tessellation_to_dict,
    write_events,
    write_tessellation,
)
from stitlab.measure import IsotropicMeasure, LebesguePoints, axis_measure
from stitlab.render import render_svg
from stitlab.stit import replay, run, sample_final

HALF = Q("1/2")
W = ConvexPolytope.box(-HALF, -HALF, HALF, HALF)
SVG = "{http://www.w3.org/2000/svg}"


def test_tessellation_round_trip(tmp_path):
    for m, t in ((axis_measure(), 4.0), (IsotropicMeasure(1.0), 3.0)):
        T = sample_final(W, m, t, 1)
        path = tmp_path / "t.json"
        write_tessellation(path, T, {"seed": 1})
        back, meta = read_tessellation(path)
        assert back == T and meta == {"seed": 1}


def test_interval_round_trip():
    I = ConvexPolytope.interval(-HALF, HALF)
    T = sample_final(I, LebesguePoints(), 5.0, 2)
    assert tessellation_from_dict(tessellation_to_dict(T)) == T


def test_corrupted_key_is_rejected():
    d = tessellation_to_dict(sample_final(W, axis_measure(), 3.0, 3))
    d["cells"][0]["key"] = "2|0,0;1,0;0,1"
    with pytest.raises(ConfigError, match=r"cells\[0\]\.key"):
        tessellation_from_dict(d)


def test_event_log_round_trip(tmp_path):
    r = run(W, IsotropicMeasure(1.0), 3.0, 4)
    path = tmp_path / "e.ndjson"
    write_events(path, r.events)
    events = read_events(path)
    assert tuple(events) == r.events
    assert replay(W, events) == r.final


def test_config_defaults_and_errors(tmp_path):
    cfg = parse_config({})
    assert cfg.window == W and cfg.a == 2 and cfg.certify
    assert parse_config({"dimension": 1}).measure == LebesguePoints()
    for doc, field in [({"a": "1"}, "a"), ({"seed": -1}, "seed"), ({"time": "x"}, "time"),
                       ({"bogus": 1}, "bogus"), ({"window": {"vertices": [[0, 0], [1, 0], [0, 1]]}}, "window.vertices"),
                       ({"measure": {"kind": "discrete", "directions": [[1, 0]], "weights": [1]}}, "measure"),
                       ({"certify": 1}, "certify"), ({"steps": True}, "steps")]:
        with pytest.raises(ConfigError) as exc:
            parse_config(doc)
        assert str(exc.value).startswith(field + ":"), (doc, str(exc.value))
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(bad)


def test_config_env_and_hash(tmp_path, monkeypatch):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"seed": 5, "a": "3"}))
    monkeypatch.setenv("STITLAB_CONFIG", str(path))
    cfg = load_config(None, {"seed": 6})
    assert cfg.seed == 6 and cfg.a == 3
    assert cfg.hash == load_config(None, {"seed": 6}).hash != load_config(None).hash


def test_cli_simulate_and_render(tmp_path, capsys):
    out, ev, svg = tmp_path / "t.json", tmp_path / "e.ndjson", tmp_path / "t.svg"
    assert main(["simulate", "--seed", "3", "--time", "3", "--out", str(out), "--events", str(ev)]) == EXIT_OK
    T, meta = read_tessellation(out)
    assert meta["seed"] == 3 and meta["events"] == len(read_events(ev)) == len(T) - 1
    assert main(["simulate", "--seed", "3", "--time", "3", "--out", str(tmp_path / "u.json")]) == EXIT_OK
    assert (tmp_path / "u.json").read_bytes() == out.read_bytes()
    assert main(["render", str(out), "--out", str(svg), "--labels"]) == EXIT_OK
    root = ET.fromstring(svg.read_bytes())
    cells = [p for p in root.iter(SVG + "polygon") if p.get("class") == "cell"]
    assert len(cells) == len(T)


def test_cli_chain_and_cftp(tmp_path):
    chain = tmp_path / "z.json"
    assert main(["chain", "--seed", "1", "--steps", "2", "--out", str(chain)]) == EXIT_OK
    doc = json.loads(chain.read_text())
    assert [s["index"] for s in doc["states"]] == [0, 1, 2] and len(doc["provenance"]) == 3
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"window": {"vertices": [["-1/10", "-1/10"], ["1/10", "-1/10"],
                                                        ["1/10", "1/10"], ["-1/10", "1/10"]]}}))
    out, rep = tmp_path / "s.json", tmp_path / "r.json"
    assert main(["cftp", "--config", str(cfg), "--seed", "2", "--horizon", "1", "--out", str(out),
                 "--report", str(rep)]) == EXIT_OK
    report = json.loads(rep.read_text())
    assert report["terminated"] and report["certified"] and report["certified_range"] == 40
    assert main(["cftp", "--seed", "2", "--no-certify", "--max-depth", "1", "--out", str(out),
                 "--report", str(rep)]) == EXIT_RUNTIME
    assert json.loads(rep.read_text())["terminated"] is False


def test_cli_errors(tmp_path, capsys):
    assert main(["simulate", "--seed", "1", "--time", "1e7", "--budget", "10", "--out", str(tmp_path / "x")]) == EXIT_RUNTIME
    assert main(["chain", "-a", "1", "--out", str(tmp_path / "x")]) == EXIT_USAGE
    assert "a: must be strictly greater than 1" in capsys.readouterr().err
    assert main(["verify", "--suite", "nope", "--out", str(tmp_path / "r.json")]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2


def test_cli_verify(tmp_path):
    out, txt = tmp_path / "r.json", tmp_path / "r.txt"
    code = main(["verify", "--suite", "homogeneity,poisson1d", "--scale", "smoke", "--out", str(out), "--text", str(txt)])
    doc = json.loads(out.read_text())
    assert code == (EXIT_OK if doc["passed"] else EXIT_CHECK_FAILED)
    assert [s["suite"] for s in doc["suites"]] == ["homogeneity", "poisson1d"]
    assert "suite homogeneity" in txt.read_text()


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "stitlab.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "stitlab" in res.stdout


def test_svg_is_deterministic_and_valid():
    T = sample_final(W, IsotropicMeasure(1.0), 4.0, np.random.default_rng(5))
    a, b = render_svg(T), render_svg(T)
    assert a == b
    root = ET.fromstring(a.encode())
    assert root.tag == SVG + "svg"
    assert sum(p.get("class") == "cell" for p in root.iter(SVG + "polygon")) == len(T)
    assert render_svg(T, labels=True) != a


def test_svg_strip_for_intervals():
    I = ConvexPolytope.interval(-HALF, HALF)
    T = sample_final(I, LebesguePoints(), 4.0, 6)
    root = ET.fromstring(render_svg(T).encode())
    ticks = [e for e in root.iter(SVG + "line") if e.get("class") == "tick"]
    assert len(ticks) == len(T) + 1
