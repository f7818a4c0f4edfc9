#!/usr/bin/env python3
# Copyright 2026 The Raceline Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the synthetic track fixtures under data/tracks."""

import pathlib

import numpy as np
from scipy.interpolate import CubicSpline

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "tracks"

# Hand-placed control points of a twisty 1:43-scale layout, about 4.4 m x 3.1 m.
ETHZ1_LIKE = [
    (0, 0), (1.2, 0), (2.4, 0), (3.3, 0.1), (3.85, 0.6), (3.85, 1.25), (3.4, 1.65),
    (2.8, 1.6), (2.3, 1.35), (1.8, 1.45), (1.55, 1.95), (1.6, 2.6), (1.2, 3.05),
    (0.5, 3.05), (-0.1, 2.6), (-0.35, 1.9), (-0.5, 1.2), (-0.55, 0.55), (-0.35, 0.1),
]


def closed_spline_samples(ctrl, spacing):
    p = np.array(list(ctrl) + [ctrl[0]], float)
    t = np.r_[0, np.cumsum(np.linalg.norm(np.diff(p, axis=0), axis=1))]
    cs = CubicSpline(t, p, bc_type="periodic")
    dense = cs(np.linspace(0, t[-1], 20000, endpoint=False))
    seg = np.linalg.norm(np.diff(np.vstack([dense, dense[:1]]), axis=0), axis=1)
    s = np.r_[0, np.cumsum(seg)][:-1]
    length = seg.sum()
    n = int(round(length / spacing))
    su = np.linspace(0, length, n, endpoint=False)
    return np.c_[np.interp(su, s, dense[:, 0]), np.interp(su, s, dense[:, 1])]


def write(name, pts, width, comment):
    with open(OUT / name, "w") as f:
        f.write(f"# {comment}\n")
        f.write("x_m,y_m,width_m\n")
        for x, y in pts:
            f.write(f"{x:.6f},{y:.6f},{width:.4f}\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write("ethz1_like.csv", closed_spline_samples(ETHZ1_LIKE, 0.03), 0.37,
          "ETHZ1-like synthetic layout for 1:43 cars; closed, driven counter-clockwise")

    # Stadium oval for 1:10 cars: 3 m straights, 1.2 m radius turns.
    straight, radius, spacing = 3.0, 1.2, 0.05
    pts = []
    ns = int(round(straight / spacing))
    na = int(round(np.pi * radius / spacing))
    pts += [(-straight / 2 + straight * i / ns, -radius) for i in range(ns)]
    pts += [(straight / 2 + radius * np.cos(a), radius * np.sin(a))
            for a in -np.pi / 2 + np.pi * np.arange(na) / na]
    pts += [(straight / 2 - straight * i / ns, radius) for i in range(ns)]
    pts += [(-straight / 2 + radius * np.cos(a), radius * np.sin(a))
            for a in np.pi / 2 + np.pi * np.arange(na) / na]
    write("oval.csv", pts, 0.8, "Oval for 1:10 cars; closed, counter-clockwise")

    # Open S-curve segment: one full sine period.
    xs = np.linspace(0.0, 8.0, 161)
    write("s_curve.csv", np.c_[xs, 1.0 * np.sin(2 * np.pi * xs / 8.0)], 0.8,
          "S-curve open segment for 1:10 cars")


if __name__ == "__main__":
    main()
