import json
from pathlib import Path

from sketchbind.cli import main, run_headless
from sketchbind.scene_io import load_scene

SMALL = ["--width", "320", "--height", "240", "--duration", "2", "--fps", "10"]


def gen(tmp_path, kind, name="scene", extra=()):
    out = tmp_path / name
    code = main(["gen", "--kind", kind, "--out", str(out)] + SMALL + list(extra))
    assert code == 0
    return out


def read_tree(root):
    out = {}
    for path in sorted(Path(root).rglob("*")):
        if path.is_file():
            out[str(path.relative_to(root))] = path.read_bytes()
    return out


def test_gen_writes_valid_scene_and_truth(tmp_path):
    out = gen(tmp_path, "pendulum")
    rec = load_scene(out)
    assert len(rec) == 20
    truth = (out / "truth.csv").read_text().splitlines()
    assert truth[0] == "t,angle,bob_x,bob_y"
    assert len(truth) == 21
    assert (out / "script.json").exists()


def test_gen_rejects_bad_params(tmp_path, capsys):
    code = main(["gen", "--kind", "pendulum", "--out", str(tmp_path / "x"),
                 "--fps", "0"])
    assert code == 2
    assert "fps" in capsys.readouterr().err


def test_gen_all_kinds(tmp_path):
    for kind in ("pendulum", "projectile", "cycloid", "slider", "rotating-point"):
        out = gen(tmp_path, kind, name=kind)
        load_scene(out)  # must be a valid container


def test_run_empty_script(tmp_path, capsys):
    scene = gen(tmp_path, "pendulum")
    script = tmp_path / "empty.json"
    script.write_text("[]")
    export = tmp_path / "export"
    code = main(["run", "--scene", str(scene), "--script", str(script),
                 "--export", str(export)])
    assert code == 0
    assert (export / "variables.csv").read_text() == "t\n"
    assert (export / "events.jsonl").exists()


def test_run_unknown_variable_faults(tmp_path, capsys):
    scene = gen(tmp_path, "pendulum")
    script = tmp_path / "bad.json"
    script.write_text(json.dumps({"commands": [
        {"type": "hello", "protocolVersion": 1},
        {"type": "mode", "mode": "graph"},
        {"type": "placeGraph", "rect": [0, 0, 0.5, 0.3]},
        {"type": "labelEdit", "target": "graph-1:y", "text": "ghost"},
    ]}))
    code = main(["run", "--scene", str(scene), "--script", str(script),
                 "--export", str(tmp_path / "export")])
    assert code == 1
    assert "UnknownIdentifier" in capsys.readouterr().err


def test_run_pendulum_script_exports_variables(tmp_path):
    scene = gen(tmp_path, "pendulum")
    export = tmp_path / "export"
    code = main(["run", "--scene", str(scene), "--script", str(scene / "script.json"),
                 "--export", str(export)])
    assert code == 0
    rows = (export / "variables.csv").read_text().splitlines()
    assert rows[0] == "t,angle"
    assert len(rows) == 21  # header + one row per frame
    plot = (export / "plots" / "graph-1.csv").read_text().splitlines()
    assert plot[0] == "t,angle"
    assert len(plot) == 21
    strobes = list((export / "strobes").glob("*.csv"))
    assert strobes


def test_replay_determinism_bytes(tmp_path):
    scene = gen(tmp_path, "pendulum")
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_headless(scene, scene / "script.json", a) == 0
    assert run_headless(scene, scene / "script.json", b) == 0
    ta, tb = read_tree(a), read_tree(b)
    assert ta.keys() == tb.keys()
    for key in ta:
        assert ta[key] == tb[key], key


def test_script_with_scrub_replays(tmp_path):
    scene = gen(tmp_path, "pendulum")
    base = json.loads((scene / "script.json").read_text())["commands"]
    script = tmp_path / "scrub.json"
    script.write_text(json.dumps({"commands": base + [
        {"type": "scrub", "t": 0.5, "atFrame": 15},
    ]}))
    export = tmp_path / "export"
    code = main(["run", "--scene", str(scene), "--script", str(script),
                 "--export", str(export)])
    assert code == 0
    events = [json.loads(line)
              for line in (export / "events.jsonl").read_text().splitlines()]
    fulls = [e for e in events if e.get("full")]
    assert fulls and fulls[0]["frame"] == 5  # 0.5 s at 10 fps


def test_out_of_order_script_rejected(tmp_path, capsys):
    scene = gen(tmp_path, "pendulum")
    script = tmp_path / "bad.json"
    script.write_text(json.dumps([
        {"type": "hello", "protocolVersion": 1, "atFrame": 3},
        {"type": "mode", "mode": "sketch", "atFrame": 1},
    ]))
    code = main(["run", "--scene", str(scene), "--script", str(script),
                 "--export", str(tmp_path / "export")])
    assert code == 2
