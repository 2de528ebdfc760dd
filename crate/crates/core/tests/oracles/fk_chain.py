"""Forward kinematics from 4x4 homogeneous link transforms.

Link layout: base rotation about z, shoulder raised by d1 and offset l1
radially, upper arm l2 along the shoulder's z after a y rotation, forearm d4,
spherical wrist z-y-z, tool offset d6 along the approach axis.
"""
import numpy as np

D1, L1, L2, D4, D6 = 170.0, 65.0, 305.0, 222.0, 70.0


def rz(t):
    c, s = np.cos(t), np.sin(t)
    m = np.eye(4)
    m[:2, :2] = [[c, -s], [s, c]]
    return m


def ry(t):
    c, s = np.cos(t), np.sin(t)
    m = np.eye(4)
    m[0, 0], m[0, 2], m[2, 0], m[2, 2] = c, s, -s, c
    return m


def tr(x, y, z):
    m = np.eye(4)
    m[:3, 3] = [x, y, z]
    return m


def fk(q):
    q = np.radians(q)
    t = rz(q[0]) @ tr(L1, 0, D1) @ ry(q[1]) @ tr(0, 0, L2) @ ry(q[2]) @ tr(0, 0, D4)
    t = t @ rz(q[3]) @ ry(q[4]) @ rz(q[5]) @ tr(0, 0, D6)
    return t


CASES = [
    [0, 0, 0, 0, 0, 0],
    [30, 45, 60, 10, 20, 30],
    [-120, 100, 150, -170, -140, 175],
    [90, 10, 90, 0, 90, 0],
    [15.5, 62.25, 133.75, -45, 30, -90],
]

if __name__ == "__main__":
    for q in CASES:
        t = fk(q)
        vals = ", ".join(f"{v:.12f}" for v in t[:3, :].flatten())
        print(f"({q}, [{vals}]),")
