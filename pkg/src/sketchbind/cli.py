"""Headless entry points: scene generation, scripted replay, and serving.

    sketchbind gen   --kind pendulum --out scene_dir [params]
    sketchbind run   --scene scene_dir --script script.json --export out_dir
    sketchbind serve --scene scene_dir --listen 127.0.0.1:8765

``run`` replays a command script tick by tick and writes
``variables.csv``, ``plots/*.csv``, ``strobes/*.csv`` and
``events.jsonl`` into the export directory; identical inputs produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import BadCommandError, SketchbindError
from .protocol import (
    FaultEvent,
    Scrub,
    Session,
    command_from_dict,
    event_to_json,
)
from .scene_io import export_csv, load_scene, write_csv
from .scenes import GENERATORS, generate_scene
from .viz import DEFAULT_STROBE_SPACING_M


def load_script(path) -> list:
    data = json.loads(Path(path).read_text())
    raw = data.get("commands") if isinstance(data, dict) else data
    if not isinstance(raw, list):
        raise BadCommandError("script must be a list of commands (or {'commands': [...]})")
    commands = [command_from_dict(d) for d in raw]
    for prev, cur in zip(commands, commands[1:]):
        if cur.at_frame < prev.at_frame:
            raise BadCommandError("script commands must be ordered by atFrame")
    return commands


def run_headless(scene_path, script_path, export_dir,
                 strobe_spacing: float = DEFAULT_STROBE_SPACING_M) -> int:
    """Replay a script against a recorded scene and export the results."""
    scene = load_scene(scene_path)
    commands = load_script(script_path)
    session = Session(scene, strobe_spacing=strobe_spacing)
    events = []
    cursor = 0
    qi = 0
    total = len(scene)
    while cursor < total:
        while qi < len(commands) and commands[qi].at_frame <= cursor:
            cmd = commands[qi]
            qi += 1
            produced = session.handle_command(cmd)
            events.extend(produced)
            if isinstance(cmd, Scrub) and not any(
                    isinstance(e, FaultEvent) for e in produced):
                cursor = session.cursor  # timeline jumped; resume from there
        if cursor >= total:
            break
        events.append(session.tick(cursor))
        cursor += 1
    while qi < len(commands):
        events.extend(session.handle_command(commands[qi]))
        qi += 1

    export_session(session, events, export_dir, strobe_spacing)

    faults = [e for e in events if isinstance(e, FaultEvent)]
    for fault in faults:
        print(f"fault: {fault.code}: {fault.message}", file=sys.stderr)
    engine_faults = session.engine._current_faults()
    for key, code in sorted(engine_faults.items()):
        print(f"binding fault at end of run: {key}: {code}", file=sys.stderr)
    return 1 if faults else 0


def export_session(session: Session, events, export_dir, strobe_spacing):
    export_dir = Path(export_dir)
    export_dir.mkdir(parents=True, exist_ok=True)
    engine = session.engine
    export_csv(engine.log, export_dir / "variables.csv")
    for graph_id, graph in engine.graphs.items():
        x_label = "t" if graph.x_axis is None else graph.x_axis
        buffers = [graph.buffers.get(name, []) for name in graph.y_series]
        length = max((len(b) for b in buffers), default=0)
        rows = []
        for i in range(length):
            x = next((b[i][0] for b in buffers if i < len(b)), None)
            rows.append([x] + [b[i][1] if i < len(b) else None for b in buffers])
        write_csv(export_dir / "plots" / f"{graph_id}.csv",
                  [x_label] + list(graph.y_series), rows)
    for entity_id, strobe in engine.strobes(strobe_spacing).items():
        write_csv(export_dir / "strobes" / f"{entity_id}.csv", ["x", "y", "z"],
                  [[m.x, m.y, m.z] for m in strobe.markers])
    with (export_dir / "events.jsonl").open("w") as fh:
        for event in events:
            fh.write(event_to_json(event) + "\n")


def _add_gen_args(sub):
    gen = sub.add_parser("gen", help="generate a synthetic scene with ground truth")
    gen.add_argument("--kind", required=True, choices=sorted(GENERATORS))
    gen.add_argument("--out", required=True, help="scene directory to create")
    gen.add_argument("--fps", type=float)
    gen.add_argument("--duration", type=float, help="seconds")
    gen.add_argument("--width", type=int)
    gen.add_argument("--height", type=int)
    gen.add_argument("--theta0-deg", dest="theta0_deg", type=float,
                     help="pendulum start angle")
    gen.add_argument("--period", type=float, help="pendulum/rotation period, seconds")
    gen.add_argument("--arm", type=float, help="pendulum arm length, meters")
    gen.add_argument("--radius", type=float, help="circle radius, meters")
    gen.add_argument("--speed", type=float, help="cycloid roll rate, rad/s")
    gen.add_argument("--g", type=float, help="projectile gravity, m/s^2")
    gen.add_argument("--vx", type=float)
    gen.add_argument("--vy", type=float)
    return gen


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sketchbind",
        description="responsive sketching over recorded scenes, headless")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replay a command script against a scene")
    run.add_argument("--scene", required=True)
    run.add_argument("--script", required=True)
    run.add_argument("--export", required=True)
    run.add_argument("--strobe-spacing", type=float, default=DEFAULT_STROBE_SPACING_M,
                     help="minimum marker spacing for strobe exports, meters")

    _add_gen_args(sub)

    serve = sub.add_parser("serve", help="serve the session protocol over a websocket")
    serve.add_argument("--scene", required=True)
    serve.add_argument("--listen", default="127.0.0.1:8765", help="host:port")
    serve.add_argument("--http", default=None,
                       help="optionally also serve the scene dir over http at host:port")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return run_headless(args.scene, args.script, args.export,
                                strobe_spacing=args.strobe_spacing)
        if args.command == "gen":
            params = {k: v for k, v in vars(args).items()
                      if k not in ("command", "kind", "out") and v is not None}
            out = generate_scene(args.kind, args.out, **params)
            print(f"scene written to {out}")
            return 0
        if args.command == "serve":
            from .server import serve_forever
            serve_forever(args.scene, args.listen, http_listen=args.http)
            return 0
    except SketchbindError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
