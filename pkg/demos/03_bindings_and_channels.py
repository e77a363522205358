"""Parameter binding: make static geometry respond to tracked motion.

A token slides along a track. Its distance from an anchor becomes the
variable "dist"; an output channel "token-scale" publishes dist * 10
for any external consumer (an improvised tangible slider), and
"token-on" turns the token into a toggle button via (dist > 0.3).
"""

import tempfile
from pathlib import Path

from sketchbind.cli import load_script
from sketchbind.protocol import Session
from sketchbind.scene_io import load_scene
from sketchbind.scenes import generate_slider

workdir = Path(tempfile.mkdtemp(prefix="sketchbind-demo-"))
scene_dir = workdir / "slider"
generate_slider(scene_dir, duration=4.0, width=320, height=240)

scene = load_scene(scene_dir)
session = Session(scene)
commands = load_script(scene_dir / "script.json")

qi = 0
print(f"{'t':>5}  {'dist':>6}  {'token-scale':>11}  {'token-on':>8}")
for i in range(len(scene)):
    while qi < len(commands) and commands[qi].at_frame <= i:
        session.handle_command(commands[qi])
        qi += 1
    session.tick(i)
    env = session.engine.env()
    if i % 8 == 0:
        print(f"{scene.times[i]:5.2f}  {env['dist']:6.3f}  "
              f"{env['token-scale']:11.3f}  {env['token-on']:8.0f}")

# binding cycles are rejected up front and leave the graph untouched
from sketchbind.engine import ParamRef
from sketchbind.errors import CyclicDependencyError

engine = session.engine
engine.bind_parameter(ParamRef("channel", "a"), "dist + 1")
try:
    engine.bind_parameter(ParamRef("channel", "dist2"), "a + 1")
    engine.bind_parameter(ParamRef("channel", "a"), "dist2 + 1")
except CyclicDependencyError as exc:
    print("\nrejected:", exc)
