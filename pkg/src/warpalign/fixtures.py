"""Deterministic synthetic test curves.

Small stand-ins for the kinds of data the aligners target: two-bump
functions with a phase shift, an ECG-like five-wave complex, 3-d spirals
differing by reparameterization and rotation, and planar closed blobs.
"""

from __future__ import annotations

import numpy as np

from .landmarks import LandmarkSet
from .srvf import Curve
from .warpmap import uniform_grid

__all__ = [
    "two_bump_pair",
    "pqrst_pair",
    "pqrst_landmarks",
    "spiral_pair",
    "closed_shape_pair",
    "bean_curve",
]


def _bump(t, mu, sigma):
    return np.exp(-0.5 * ((t - mu) / sigma) ** 2)


def two_bump_pair(m: int = 100) -> tuple[Curve, Curve]:
    t = uniform_grid(m)
    f1 = 0.9 * _bump(t, 0.32, 0.07) + 1.1 * _bump(t, 0.68, 0.07)
    f2 = 0.9 * _bump(t, 0.42, 0.07) + 1.1 * _bump(t, 0.76, 0.07)
    return Curve(t, f1), Curve(t, f2)


_PQRST_1 = ((0.16, 0.025, 0.25), (0.30, 0.012, -0.35), (0.38, 0.016, 1.5),
            (0.46, 0.012, -0.45), (0.68, 0.04, 0.4))
_PQRST_2 = ((0.20, 0.025, 0.29), (0.34, 0.012, -0.31), (0.44, 0.016, 1.38),
            (0.52, 0.012, -0.50), (0.75, 0.04, 0.45))


def pqrst_pair(m: int = 200) -> tuple[Curve, Curve]:
    """Five-wave complexes (P, Q, R, S, T) with shifted wave timings."""
    t = uniform_grid(m)
    f1 = sum(a * _bump(t, mu, s) for mu, s, a in _PQRST_1)
    f2 = sum(a * _bump(t, mu, s) for mu, s, a in _PQRST_2)
    return Curve(t, f1), Curve(t, f2)


def pqrst_landmarks() -> LandmarkSet:
    """R- and T-wave peak positions of the bundled complexes."""
    return LandmarkSet([(0.38, 0.44), (0.68, 0.75)])


def _spiral_points(tt: np.ndarray) -> np.ndarray:
    radius = 0.35 + 0.55 * tt
    angle = 4.0 * np.pi * tt
    return np.column_stack((radius * np.cos(angle),
                            radius * np.sin(angle),
                            1.1 * tt))


def spiral_pair(m: int = 100) -> tuple[Curve, Curve]:
    """Two copies of a 3-d spiral, one reparameterized and rotated."""
    t = uniform_grid(m)
    first = Curve(t, _spiral_points(t))
    cz, sz = np.cos(0.7), np.sin(0.7)
    cx, sx = np.cos(0.4), np.sin(0.4)
    rot_z = np.array([[cz, -sz, 0.0], [sz, cz, 0.0], [0.0, 0.0, 1.0]])
    rot_x = np.array([[1.0, 0.0, 0.0], [0.0, cx, -sx], [0.0, sx, cx]])
    pts = _spiral_points(t ** 1.7) @ (rot_x @ rot_z).T
    return first, Curve(t, pts)


def _radial_curve(m: int, harmonics) -> Curve:
    t = uniform_grid(m)
    phi = 2.0 * np.pi * t
    r = 1.0 + sum(a * np.cos(k * phi + p) for k, a, p in harmonics)
    pts = np.column_stack((r * np.cos(phi), r * np.sin(phi)))
    pts[-1] = pts[0]
    return Curve(t, pts, "closed")


def closed_shape_pair(m: int = 101) -> tuple[Curve, Curve]:
    """Two planar closed blobs with different harmonic outlines."""
    first = _radial_curve(m, ((1, 0.15, 0.4), (2, 0.22, 0.0), (3, 0.08, 1.2)))
    second = _radial_curve(m, ((1, 0.25, 2.2), (2, 0.10, 0.6), (4, 0.12, 0.0)))
    return first, second


def bean_curve(m: int = 101) -> Curve:
    """A single asymmetric closed blob, handy for seed-shift tests."""
    return _radial_curve(m, ((1, 0.30, 0.0), (2, 0.15, 0.9)))
