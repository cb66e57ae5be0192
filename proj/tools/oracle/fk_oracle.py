"""Independent numpy model of the finger chain and cable holes.

Writes tests/golden/fk.json and tests/golden/cable.json. Run from the repo root:

    python3 tools/oracle/fk_oracle.py
"""
import json
import math
from pathlib import Path

import numpy as np

# (axis, r, kappa, gamma, surface angle, rom_min, rom_max)
THUMB = {
    "joints": [("x", 3.4, 9.1, 9.5, 22.5, -45.0, 45.0),
               ("y", 4.5, 11.7, 9.5, 50.0, 0.0, 100.0),
               ("y", 3.9, 10.2, 8.2, 50.0, 0.0, 100.0),
               ("y", 3.3, 8.7, 7.5, 50.0, 0.0, 100.0)],
    "links": [16.0, 35.0, 27.5, 27.5],
    "base_last": 2,
    "distal_first": 3,
    "distal": "ip",
}
FINGER = {
    "joints": [("x", 1.9, 9.5, 7.5, 15.0, -30.0, 30.0),
               ("y", 4.9, 12.7, 7.5, 50.0, 0.0, 100.0),
               ("y", 3.3, 8.7, 6.5, 50.0, 0.0, 100.0),
               ("y", 3.1, 8.2, 6.0, 50.0, 0.0, 100.0)],
    "links": [15.5, 42.5, 24.5, 24.5],
    "base_last": 1,
    "distal_first": 2,
    "distal": "distal",
}


def rot(axis, a):
    c, s = math.cos(a), math.sin(a)
    m = np.eye(4)
    if axis == "x":
        m[1:3, 1:3] = [[c, -s], [s, c]]
    else:
        m[0, 0], m[0, 2], m[2, 0], m[2, 2] = c, s, -s, c
    return m


def trans(x, y, z):
    m = np.eye(4)
    m[:3, 3] = [x, y, z]
    return m


def roll(joint, deg):
    axis, r = joint[0], joint[1]
    half = rot(axis, math.radians(deg) / 2)
    return half @ trans(0, 0, 2 * r) @ half


def inset(joint):
    return joint[2] - joint[1] * math.tan(math.radians(joint[4]) / 2)


def offset(model, i):
    j, l = model["joints"], model["links"][i]
    if i == 0:
        return trans(0, 0, l - j[1][1] - j[0][1])
    if i == 3:
        return trans(0, 0, l - j[3][1])
    return trans(inset(j[i + 1]) - inset(j[i]), 0, l - j[i][1] - j[i + 1][1])


def frames(model, q):
    out, cur = [], np.eye(4)
    for i in range(4):
        cur = cur @ roll(model["joints"][i], q[i])
        out.append(cur.copy())
        cur = cur @ offset(model, i)
        out.append(cur.copy())
    return out


def hole(joint, side, lateral, distal):
    """Hole on the end face tangent to the rolling circle at half the ROM limit."""
    axis, r, kappa, gamma, _, lo, hi = joint
    face = math.radians(hi - lo) / 2
    arm = kappa if axis == "y" else gamma
    t = arm - r * math.tan(face / 2)
    if axis == "y":
        closing = side == "flexor"
    else:
        closing = lateral == "ulnar"
    tau = math.radians(hi if closing else lo) / 2
    d = 1.0 if closing else -1.0
    w = r * math.sin(tau) + d * t * math.cos(tau)
    h = r * math.cos(tau) - d * t * math.sin(tau)
    lat = {"radial": gamma / 2, "ulnar": -gamma / 2, "center": 0.0}[lateral]
    if axis == "y":
        p = np.array([w, lat, h])
    else:
        p = np.array([kappa if side == "flexor" else -kappa, -w, h])
    if distal:
        p[2] = -p[2]
    return p


def apply(m, p):
    return (m @ np.append(p, 1.0))[:3]


def tendons(model):
    b, f, n = model["base_last"], model["distal_first"], model["distal"]
    return [("base-flexor-radial", "flexor", "radial", 0, b),
            ("base-flexor-ulnar", "flexor", "ulnar", 0, b),
            ("base-extensor-radial", "extensor", "radial", 0, b),
            ("base-extensor-ulnar", "extensor", "ulnar", 0, b),
            (n + "-flexor", "flexor", "center", f, 3),
            (n + "-extensor", "extensor", "center", f, 3)]


def tendon_length(model, q, tendon):
    _, side, lat, first, last = tendon
    total = 0.0
    for j in range(first, last + 1):
        joint = model["joints"][j]
        a = hole(joint, side, lat, False)
        c = apply(roll(joint, q[j]), hole(joint, side, lat, True))
        total += np.linalg.norm(c - a)
        if j < last:
            entry = hole(joint, side, lat, True)
            exit_ = apply(offset(model, j), hole(model["joints"][j + 1], side, lat, False))
            total += np.linalg.norm(exit_ - entry)
    return total


POSES = [[0, 0, 0, 0], [10, 20, 30, 40], [-15, 100, 0, 55], [25, 0, 100, 100], [-30, 45, 45, 45], [5, 80, 10, 0]]


def clamp_pose(model, q):
    return [min(max(a, j[5]), j[6]) for a, j in zip(q, model["joints"])]


def main():
    root = Path(__file__).resolve().parents[2] / "tests" / "golden"
    root.mkdir(parents=True, exist_ok=True)
    fk, cable = {"cases": []}, {"cases": []}
    for kind, model in (("thumb", THUMB), ("finger", FINGER)):
        for q in POSES:
            q = clamp_pose(model, q)
            fs = frames(model, q)
            fk["cases"].append({
                "kind": kind,
                "angles_deg": q,
                "frames": [{"rotation": f[:3, :3].tolist(), "translation_mm": f[:3, 3].tolist()} for f in fs],
            })
            cable["cases"].append({
                "kind": kind,
                "angles_deg": q,
                "lengths_mm": {t[0]: tendon_length(model, q, t) for t in tendons(model)},
            })
    (root / "fk.json").write_text(json.dumps(fk, indent=1) + "\n")
    (root / "cable.json").write_text(json.dumps(cable, indent=1) + "\n")


if __name__ == "__main__":
    main()
