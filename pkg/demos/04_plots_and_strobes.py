"""Plots and stroboscopic motion traces.

Record a rolling wheel's rim point, then sweep the strobe spacing: zero
spacing keeps every recorded sample; wider spacing thins the trace while
keeping consecutive markers at least that far apart.
"""

import tempfile
from pathlib import Path

from sketchbind.cli import load_script
from sketchbind.protocol import Session
from sketchbind.scene_io import load_scene
from sketchbind.scenes import generate_cycloid
from sketchbind.viz import strobe_markers

workdir = Path(tempfile.mkdtemp(prefix="sketchbind-demo-"))
scene_dir = workdir / "cycloid"
generate_cycloid(scene_dir, duration=6.0, width=320, height=240)

scene = load_scene(scene_dir)
session = Session(scene)
commands = load_script(scene_dir / "script.json")
qi = 0
for i in range(len(scene)):
    while qi < len(commands) and commands[qi].at_frame <= i:
        session.handle_command(commands[qi])
        qi += 1
    session.tick(i)

recording = session.engine.recordings["entity-1"]
print(f"recorded {len(recording.samples)} rim positions "
      f"over {scene.duration:.1f} s")

for spacing in (0.0, 0.01, 0.03, 0.1):
    markers = strobe_markers(recording, spacing).markers
    print(f"spacing {spacing * 100:4.0f} cm -> {len(markers):4d} markers")

# a crude terminal rendering of the cycloid trace at 3 cm spacing
markers = strobe_markers(recording, 0.03).markers
cols = 64
xs = [m.x for m in markers]
ys = [m.y for m in markers]
x0, x1 = min(xs), max(xs)
rows = 10
grid = [[" "] * cols for _ in range(rows)]
for m in markers:
    c = int((m.x - x0) / (x1 - x0 + 1e-9) * (cols - 1))
    r = rows - 1 - int(m.y / (max(ys) + 1e-9) * (rows - 1))
    grid[r][c] = "o"
print()
for row in grid:
    print("".join(row))
