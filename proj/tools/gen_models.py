#!/usr/bin/env python3
"""Writes the bundled robot descriptions into data/.

Kinematics come from the manufacturers' published Denavit-Hartenberg
parameters, masses from their published link masses; centres of mass,
inertias and capsules are rough cylinder approximations authored here.

Link i's frame is DH frame i-1 rotated by q_i, so joint i+1's origin is
Tz(d_i) Tx(a_i) Rx(alpha_i) and a capsule running from the frame origin to
(a_i, 0, d_i) follows the physical link.
"""
import json
import math
import pathlib

import numpy as np

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def rot_x(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def quat(R):
    """Rotation matrix -> [w, x, y, z]."""
    w = math.sqrt(max(0.0, 1.0 + R[0, 0] + R[1, 1] + R[2, 2])) / 2.0
    if w > 1e-6:
        x = (R[2, 1] - R[1, 2]) / (4 * w)
        y = (R[0, 2] - R[2, 0]) / (4 * w)
        z = (R[1, 0] - R[0, 1]) / (4 * w)
    else:  # 180 degree rotations about x only occur here
        x, y, z = 1.0, 0.0, 0.0
    n = math.sqrt(w * w + x * x + y * y + z * z)
    return [w / n, x / n, y / n, z / n]


def cylinder_inertia(mass, radius, length, axis):
    """Solid cylinder about its centre, long axis along unit `axis`."""
    axis = np.asarray(axis, float)
    axis = axis / np.linalg.norm(axis)
    i_ax = 0.5 * mass * radius**2
    i_perp = mass * (3 * radius**2 + length**2) / 12.0
    return i_perp * np.eye(3) + (i_ax - i_perp) * np.outer(axis, axis)


def r(v, nd=6):
    return [round(float(x), nd) for x in v]


def build(name, dh, masses, vlims, limits, capsules, com_fraction, radii, sensing, tool_point,
          pads=(), com_offsets=None):
    """dh: list of (d, a, alpha)."""
    joints, links = [], []
    for i, (d, a, alpha) in enumerate(dh):
        if i == 0:
            trans, R = np.zeros(3), np.eye(3)
        else:
            pd, pa, palpha = dh[i - 1]
            trans, R = np.array([pa, 0.0, pd]), rot_x(palpha)
        joints.append({
            "name": f"joint{i + 1}",
            "kind": "revolute",
            "axis": [0.0, 0.0, 1.0],
            "origin": {"translation": r(trans), "rotation": r(quat(R), 12)},
            "position_limits": [-limits[i], limits[i]],
            "velocity_limit": vlims[i],
        })
        end = np.array([a, 0.0, d])
        length = max(np.linalg.norm(end), 0.08)
        com = com_fraction[i] * end
        if com_offsets is not None:
            com = com + np.asarray(com_offsets[i], float)
        axis = end if np.linalg.norm(end) > 1e-9 else np.array([0.0, 0.0, 1.0])
        inertia = cylinder_inertia(masses[i], radii[i], length, axis)
        links.append({
            "name": f"link{i + 1}",
            "mass": masses[i],
            "com": r(com),
            "inertia": [r(row, 9) for row in inertia],
            "collision_geometry": [{"p0": r(p0), "p1": r(p1), "radius": rad} for p0, p1, rad in capsules[i]],
        })
    return {
        "format_version": 1,
        "name": name,
        "sensing_mode": sensing,
        "tool_point": r(tool_point),
        "joints": joints,
        "links": links,
        "pads": list(pads),
    }


def pad(pid, link, capsule, t0, t1, sector=None):
    patch = {"capsule": capsule, "t0": t0, "t1": t1}
    if sector is not None:
        patch["sector"] = [round(sector[0], 12), round(sector[1], 12)]
    return {"id": pid, "link": link, "surface_patch": patch}


def ur10e_like():
    # (d, a, alpha), universal-robots.com DH table for the UR10e.
    dh = [
        (0.1807, 0.0, math.pi / 2),
        (0.0, -0.6127, 0.0),
        (0.0, -0.57155, 0.0),
        (0.17415, 0.0, math.pi / 2),
        (0.11985, 0.0, -math.pi / 2),
        (0.11655, 0.0, 0.0),
    ]
    masses = [7.369, 13.051, 3.989, 2.1, 1.98, 0.615]
    vlims = [2.0944, 2.0944, 3.1416, 3.1416, 3.1416, 3.1416]
    limits = [2 * math.pi] * 6
    shoulder, elbow = 0.176, 0.0  # lateral offsets of the arm tubes
    tool_len = 0.06  # short gripper beyond the flange
    capsules = [
        [((0, 0, 0.0), (0, 0, 0.1807), 0.075)],
        [((0, 0, 0.0), (0, 0, shoulder), 0.075), ((0, 0, shoulder), (-0.6127, 0, shoulder), 0.06)],
        [((0, 0, elbow), (-0.57155, 0, elbow), 0.045)],
        [((0, 0, 0.0), (0, 0, 0.17415), 0.045)],
        [((0, 0, 0.0), (0, 0, 0.11985), 0.045)],
        [((0, 0, 0.0), (0, 0, 0.11655 + tool_len), 0.045)],
    ]
    com_fraction = [0.5, 0.55, 0.5, 0.5, 0.5, 0.5]
    com_offsets = [(0, 0, 0), (0, 0, shoulder), (0, 0, elbow), (0, 0, 0), (0, 0, 0), (0, 0, 0)]
    radii = [0.075, 0.075, 0.06, 0.05, 0.05, 0.045]
    half = (-math.pi, 0.0)
    other = (0.0, math.pi)
    pads = [
        pad(1, 0, 0, 0.0, 1.0),
        pad(2, 1, 0, 0.0, 1.0),
        pad(3, 1, 1, 0.0, 0.5),
        pad(4, 1, 1, 0.5, 1.0),
        pad(5, 2, 0, 0.0, 0.5, half),
        pad(6, 2, 0, 0.0, 0.5, other),
        pad(7, 2, 0, 0.5, 1.0, half),
        pad(8, 2, 0, 0.5, 1.0, other),
        pad(9, 3, 0, 0.0, 1.0),
        pad(10, 4, 0, 0.0, 1.0),
        pad(11, 5, 0, 0.0, 1.0),
    ]
    return build("ur10e_like", dh, masses, vlims, limits, capsules, com_fraction, radii, "skin_pads",
                 (0.0, 0.0, 0.11655 + tool_len), pads, com_offsets)


def iiwa7_like():
    # (d, a, alpha), KUKA LBR iiwa 7 R800 in standard DH form.
    dh = [
        (0.34, 0.0, -math.pi / 2),
        (0.0, 0.0, math.pi / 2),
        (0.40, 0.0, math.pi / 2),
        (0.0, 0.0, -math.pi / 2),
        (0.40, 0.0, -math.pi / 2),
        (0.0, 0.0, math.pi / 2),
        (0.126, 0.0, 0.0),
    ]
    masses = [3.4525, 3.4821, 4.05623, 3.4822, 2.1633, 2.3466, 3.129]
    vlims = [1.71, 1.71, 1.75, 2.27, 2.44, 3.14, 3.14]
    limits = [math.radians(x) for x in (170, 120, 170, 120, 170, 120, 175)]
    # Shoulder and elbow joints carry no DH length; their physical links are
    # the first halves of the following segments, expressed in their own
    # frames (+y there points along the arm at q = 0 for alpha = -pi/2 ... see
    # the frame algebra: link 2 and link 4 frames have the arm along -y / +y).
    capsules = [
        [((0, 0, 0.12), (0, 0, 0.34), 0.07)],
        [((0, 0, 0.0), (0, -0.2, 0.0), 0.07)],
        [((0, 0, 0.2), (0, 0, 0.4), 0.065)],
        [((0, 0, 0.0), (0, 0.2, 0.0), 0.065)],
        [((0, 0, 0.2), (0, 0, 0.4), 0.06)],
        [((0, 0, -0.03), (0, 0, 0.03), 0.06)],
        # gripper on the flange axis plus a side-mounted camera
        [((0, 0, 0.0), (0, 0, 0.126 + 0.06), 0.045), ((-0.046, 0.046, 0.03), (-0.046, 0.046, 0.12), 0.03)],
    ]
    com_fraction = [0.75, 0.0, 0.75, 0.0, 0.75, 0.0, 0.5]
    com_offsets = [(0, 0, 0), (0, -0.1, 0), (0, 0, 0), (0, 0.1, 0), (0, 0, 0), (0, 0, 0), (0, 0, 0)]
    radii = [0.07, 0.07, 0.065, 0.065, 0.06, 0.06, 0.045]
    return build("iiwa7_like", dh, masses, vlims, limits, capsules, com_fraction, radii, "joint_torque",
                 (0.0, 0.0, 0.126 + 0.06), (), com_offsets)


def main():
    DATA.mkdir(exist_ok=True)
    for model in (ur10e_like(), iiwa7_like()):
        path = DATA / f"{model['name']}.json"
        path.write_text(json.dumps(model, indent=2) + "\n")
        print(path)


if __name__ == "__main__":
    main()
