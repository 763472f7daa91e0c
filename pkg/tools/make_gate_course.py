"""Regenerate src/hapticopter/data/gate_course.json.

Six 1.0 x 1.0 m openings in 2.4 m panels around a rectangular circuit,
offset alternately sideways and in height. Run from the repo root:

    python tools/make_gate_course.py
"""
import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from hapticopter.geometry import Aabb, Vec3  # noqa: E402
from hapticopter.world import Scenario, Task, World, make_gate, scenario_to_json  # noqa: E402

ROOM = Aabb(Vec3(-5.0, -5.0, 0.0), Vec3(5.0, 5.0, 4.0))
PANEL_Z = (0.0, 2.4)
THICKNESS = 0.2


def gate(gid, axis, coord, u_center, z_center):
    # openings are 1.0 x 1.0; panels extend 0.5 m beyond the opening sideways
    opening_u = (u_center - 0.5, u_center + 0.5)
    opening_z = (z_center - 0.5, z_center + 0.5)
    panel_u = (u_center - 1.0, u_center + 1.0)
    return make_gate(gid, axis, coord, (panel_u, PANEL_Z), (opening_u, opening_z), THICKNESS)


def main():
    gates = (
        gate(0, 0, -1.5, -3.25, 1.2),  # south leg, shifted toward the wall
        gate(1, 0, 1.5, -3.0, 1.8),    # south leg, raised
        gate(2, 1, 0.0, 2.75, 1.2),    # east leg, shifted
        gate(3, 0, 1.5, 3.0, 1.8),     # north leg, raised
        gate(4, 0, -1.5, 3.25, 1.2),   # north leg, shifted
        gate(5, 1, 0.0, -3.0, 1.8),    # west leg, raised
    )
    scenario = Scenario(
        task=Task.GATE_COURSE,
        world=World(room=ROOM, gates=gates),
        spawn=Vec3(-3.0, -3.25, 1.2),
        gate_order=(0, 1, 2, 3, 4, 5),
        name="gate_course",
    )
    out = pathlib.Path(__file__).resolve().parents[1] / "src" / "hapticopter" / "data" / "gate_course.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(scenario_to_json(scenario), indent=2) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
