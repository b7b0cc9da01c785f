#!/usr/bin/env python3
"""Regenerates the frozen oracle fixtures in this directory.

Everything here is computed without the C++ library: forward kinematics by
chaining 10^4 straight micro-links per continuum segment, closest points by
dense sampling, Jacobians by central differences of an independent
closed-form chain.
"""
import json
import pathlib

import numpy as np

HERE = pathlib.Path(__file__).resolve().parent
RNG = np.random.default_rng(20261016)

L_S = 24.0
L_G = (28.55879, 39.12135)
BODY = 5.0


def rz(a):
    c, s = np.cos(a), np.sin(a)
    t = np.eye(4)
    t[:2, :2] = [[c, -s], [s, c]]
    return t


def ry(a):
    c, s = np.cos(a), np.sin(a)
    t = np.eye(4)
    t[0, 0], t[0, 2], t[2, 0], t[2, 2] = c, s, -s, c
    return t


def tz(d):
    t = np.eye(4)
    t[2, 3] = d
    return t


def microlink_chain(q, n=10_000):
    """Joint points P_r0, P_s1, P_r1, P_s2, P_r2 and the segment midpoints."""
    t = np.eye(4)
    points, mids = [t[:3, 3].copy()], []
    for seg in range(2):
        theta, delta = q[2 * seg], q[2 * seg + 1]
        h = L_S / n
        half = rz(delta) @ ry(theta / (2 * n)) @ rz(-delta)
        # Each micro-link: half bend, straight chord, half bend.
        link = half @ tz(h * np.sinc(theta / (2 * n * np.pi))) @ half
        for k in range(n):
            t = t @ link
            if k == n // 2 - 1:
                mids.append(t[:3, 3].copy())
        points.append(t[:3, 3].copy())
        t = t @ tz(L_G[seg])
        points.append(t[:3, 3].copy())
    return points, mids


def closed_form_ee(q):
    t = np.eye(4)
    for seg in range(2):
        theta, delta = q[2 * seg], q[2 * seg + 1]
        if abs(theta) < 1e-12:
            local = np.array([0.0, 0.0, L_S])
        else:
            local = L_S / theta * np.array([1 - np.cos(theta), 0.0, np.sin(theta)])
        w = rz(delta)
        t_tip = np.eye(4)
        t_tip[:3, 3] = (w[:3, :3] @ local)
        t = t @ t_tip @ w @ ry(theta) @ rz(-delta) @ tz(L_G[seg])
    return t[:3, 3]


def fd_jacobian(q, step=1e-5):
    j = np.zeros((3, 4))
    for i in range(4):
        e = np.zeros(4)
        e[i] = step
        j[:, i] = (closed_form_ee(q + e) - closed_form_ee(q - e)) / (2 * step)
    return j


def random_config():
    return np.array([RNG.uniform(0.05, np.pi - 0.05), RNG.uniform(0, 2 * np.pi),
                     RNG.uniform(0.05, np.pi - 0.05), RNG.uniform(0, 2 * np.pi)])


def unit(v):
    return v / np.linalg.norm(v)


def random_arc():
    center = RNG.uniform(-50, 50, 3)
    normal = unit(RNG.normal(size=3))
    u = unit(np.cross(normal, RNG.normal(size=3)))
    radius = RNG.uniform(5, 60)
    bend = RNG.uniform(0.05, np.pi)
    return center, normal, u, radius, bend


def arc_samples(center, normal, u, radius, bend, n=100_000):
    v = np.cross(normal, u)
    t = np.linspace(0.0, bend, n)
    return center + radius * (np.outer(np.cos(t), u) + np.outer(np.sin(t), v))


def chain_samples(q, per_link=100_000):
    pts = []
    t = np.eye(4)
    beta = np.linspace(0.0, 1.0, per_link)
    for seg in range(2):
        theta, delta = q[2 * seg], q[2 * seg + 1]
        x = beta * theta
        local = L_S * np.stack([np.where(x > 0, (1 - np.cos(x)) / np.maximum(theta, 1e-300), 0.0),
                                np.zeros_like(x),
                                np.where(x > 0, np.sin(x) / np.maximum(theta, 1e-300), beta)], 1)
        rot = t[:3, :3] @ rz(delta)[:3, :3]
        pts.append(t[:3, 3] + local @ rot.T)
        tip = np.eye(4)
        tip[:3, 3] = rz(delta)[:3, :3] @ local[-1]
        t = t @ tip @ rz(delta) @ ry(theta) @ rz(-delta)
        axis = t[:3, 2]
        pts.append(t[:3, 3] + np.outer(beta * L_G[seg], axis))
        t = t @ tz(L_G[seg])
    return np.concatenate(pts)


def main():
    fk = []
    for q in [np.array([0.0, 0.0, 0.0, 0.0]), np.array([np.pi / 9, 0, np.pi / 9, 0]),
              np.array([np.pi / 3, np.pi, 2 * np.pi / 5, np.pi / 3])] + \
             [random_config() for _ in range(12)]:
        points, mids = microlink_chain(q)
        fk.append({"q": q.tolist(), "joint_points": [p.tolist() for p in points],
                   "continuum_midpoints": [m.tolist() for m in mids]})

    jac = [{"q": q.tolist(), "jacobian": fd_jacobian(q).tolist()}
           for q in [random_config() for _ in range(20)]]

    arcs = []
    while len(arcs) < 200:
        center, normal, u, radius, bend = random_arc()
        p = center + RNG.uniform(-2, 2) * radius * unit(RNG.normal(size=3))
        samples = arc_samples(center, normal, u, radius, bend)
        d = np.linalg.norm(samples - p, axis=1)
        # Keep the point at least 1 mm off the full circle so the sampled
        # minimum is resolved well below 1e-6 mm.
        v = np.cross(normal, u)
        off = p - center
        planar = off - normal.dot(off) * normal
        if np.linalg.norm(planar) < 1e-3:
            continue
        circle_pt = center + radius * unit(planar)
        if np.linalg.norm(p - circle_pt) < 1.0:
            continue
        arcs.append({"center": center.tolist(), "normal": normal.tolist(),
                     "start": (center + radius * u).tolist(),
                     "end": (center + radius * (np.cos(bend) * u + np.sin(bend) * v)).tolist(),
                     "radius": radius, "bend_angle": bend, "p": p.tolist(),
                     "min_distance": float(d.min())})

    segments = []
    while len(segments) < 200:
        a, b = RNG.uniform(-60, 60, 3), RNG.uniform(-60, 60, 3)
        p = RNG.uniform(-80, 80, 3)
        t = np.linspace(0.0, 1.0, 100_000)
        d = np.linalg.norm(a + np.outer(t, b - a) - p, axis=1)
        if d.min() < 1.0:
            continue
        segments.append({"a": a.tolist(), "b": b.tolist(), "p": p.tolist(),
                         "min_distance": float(d.min())})

    chains = []
    cases = [(np.array([np.pi / 9, 0, np.pi / 9, 0]), np.array([-40.0, 0, 60]), 10.0),
             (np.array([np.pi / 3, np.pi, 2 * np.pi / 5, np.pi / 3]), np.array([0.0, -40, 50]), 20.0)]
    for _ in range(6):
        cases.append((random_config(), RNG.uniform(-60, 60, 3) + [0, 0, 40], RNG.uniform(5, 30)))
    for q, center, radius in cases:
        pts = chain_samples(q)
        d = np.linalg.norm(pts - center, axis=1).min()
        chains.append({"q": q.tolist(), "center": center.tolist(), "radius": radius,
                       "clearance": float(d - radius - BODY)})

    out = {"params": {"spring_length": L_S, "rigid_length1": L_G[0], "rigid_length2": L_G[1],
                      "body_radius": BODY},
           "fk_microlink": fk, "ee_jacobian_fd": jac, "arc_dense": arcs,
           "segment_dense": segments, "chain_dense": chains}
    (HERE / "oracles.json").write_text(json.dumps(out, indent=1) + "\n")


if __name__ == "__main__":
    main()
