"""Track a swinging ball and measure its angle frame by frame.

Generates a small synthetic pendulum scene, selects the ball by tapping
it, sketches a vertical reference line plus a pivot-to-ball line, adds
an angle arc between them, and prints the measured angle against the
analytic ground truth.
"""

import tempfile
from pathlib import Path

from sketchbind.cli import load_script
from sketchbind.protocol import Session
from sketchbind.scene_io import load_scene
from sketchbind.scenes import generate_pendulum

workdir = Path(tempfile.mkdtemp(prefix="sketchbind-demo-"))
scene_dir = workdir / "pendulum"

# 3 seconds at 20 fps keeps the demo quick; the generator also writes
# truth.csv and a ready-made command script.
generate_pendulum(scene_dir, duration=3.0, width=320, height=240)

scene = load_scene(scene_dir)
session = Session(scene)

# replay the generated script: tap the bob, sketch, name the arc "angle"
commands = load_script(scene_dir / "script.json")
qi = 0
print(f"{'t':>6}  {'measured':>9}  {'truth':>7}")
truth = [line.split(",") for line in
         (scene_dir / "truth.csv").read_text().splitlines()[1:]]
for i in range(len(scene)):
    while qi < len(commands) and commands[qi].at_frame <= i:
        session.handle_command(commands[qi])
        qi += 1
    session.tick(i)
    if i % 10 == 0:
        angle = session.engine.env()["angle"]
        print(f"{scene.times[i]:6.2f}  {angle:9.3f}  {float(truth[i][1]):7.3f}")

print(f"\nscene and exports under {workdir}")
