"""Deterministic 3-D geometry for the single-bounce tracer.

Conventions used throughout the package:

* Points are length-3 numpy arrays of floats (meters).
* Buildings are axis-aligned boxes standing on the ground plane
  (z from 0 to ``height``), so every reflecting wall is a vertical
  rectangle on a plane ``x = const`` or ``y = const``.
* A direction is described by an elevation ``phi`` in [-pi/2, pi/2]
  and an azimuth ``theta`` in (-pi, pi] measured from the +y axis
  toward +x, so the unit vector is
  ``(cos(phi) sin(theta), cos(phi) cos(theta), sin(phi))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Segment endpoints are trimmed by this parameter amount before the
# blockage test so a path may start or end on a wall it interacts with.
_ENDPOINT_TRIM = 1e-9
# An intersection interval shorter than this is a tangential graze and
# does not count as blockage.
_MIN_OVERLAP = 1e-12


def unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / n


def direction_angles(d: np.ndarray) -> tuple[float, float]:
    """Elevation/azimuth pair of a unit direction vector."""
    z = min(1.0, max(-1.0, float(d[2])))
    phi = math.asin(z)
    theta = math.atan2(float(d[0]), float(d[1]))
    if theta <= -math.pi:
        theta = math.pi
    return phi, theta


def angles_direction(phi: float, theta: float) -> np.ndarray:
    """Unit direction vector for an elevation/azimuth pair."""
    cp = math.cos(phi)
    return np.array([cp * math.sin(theta), cp * math.cos(theta), math.sin(phi)])


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned building footprint extruded from the ground."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    height: float

    def contains_xy(self, x: float, y: float) -> bool:
        """Open-interior footprint test (boundary contact is outside)."""
        return self.x_min < x < self.x_max and self.y_min < y < self.y_max


@dataclass(frozen=True, eq=False)
class Wall:
    """One vertical face of a box.

    ``axis`` is 0 for a plane x = coord, 1 for y = coord.  ``lo``/``hi``
    bound the in-plane horizontal extent along the other axis.
    ``outward`` is the sign of the outward normal along ``axis``.
    """

    axis: int
    coord: float
    lo: float
    hi: float
    height: float
    outward: float


def box_walls(box: Box) -> list[Wall]:
    return [
        Wall(0, box.x_min, box.y_min, box.y_max, box.height, -1.0),
        Wall(0, box.x_max, box.y_min, box.y_max, box.height, +1.0),
        Wall(1, box.y_min, box.x_min, box.x_max, box.height, -1.0),
        Wall(1, box.y_max, box.x_min, box.x_max, box.height, +1.0),
    ]


def mirror_point(p: np.ndarray, wall: Wall) -> np.ndarray:
    q = p.copy()
    q[wall.axis] = 2.0 * wall.coord - p[wall.axis]
    return q


def _interval(p: np.ndarray, d: np.ndarray, lo: float, hi: float,
              axis: int, t0: float, t1: float) -> tuple[float, float] | None:
    """Clip parameter interval [t0, t1] to the slab lo <= p+t*d <= hi."""
    o, v = float(p[axis]), float(d[axis])
    if v == 0.0:
        if o < lo or o > hi:
            return None
        return t0, t1
    a = (lo - o) / v
    b = (hi - o) / v
    if a > b:
        a, b = b, a
    t0 = max(t0, a)
    t1 = min(t1, b)
    if t0 > t1:
        return None
    return t0, t1


def segment_blocked(p: np.ndarray, q: np.ndarray, boxes) -> bool:
    """True if the open segment p->q passes through any box interior.

    Endpoints are trimmed slightly so a segment may legitimately start
    or end on a box surface (a reflection point); tangential grazes do
    not block.
    """
    d = q - p
    for box in boxes:
        span = _interval(p, d, box.x_min, box.x_max, 0,
                         _ENDPOINT_TRIM, 1.0 - _ENDPOINT_TRIM)
        if span is None:
            continue
        span = _interval(p, d, box.y_min, box.y_max, 1, *span)
        if span is None:
            continue
        span = _interval(p, d, 0.0, box.height, 2, *span)
        if span is None:
            continue
        if span[1] - span[0] > _MIN_OVERLAP:
            return True
    return False


def reflection_point(tx: np.ndarray, rx: np.ndarray, wall: Wall) -> np.ndarray | None:
    """Specular bounce point of tx->wall->rx, or None if invalid.

    Both endpoints must lie strictly on the outward side of the wall
    plane and the mirrored segment must cross the wall rectangle.
    """
    side_tx = (float(tx[wall.axis]) - wall.coord) * wall.outward
    side_rx = (float(rx[wall.axis]) - wall.coord) * wall.outward
    if side_tx <= 0.0 or side_rx <= 0.0:
        return None
    image = mirror_point(tx, wall)
    d = rx - image
    v = float(d[wall.axis])
    if v == 0.0:
        return None
    s = (wall.coord - float(image[wall.axis])) / v
    if s <= 0.0 or s >= 1.0:
        return None
    hit = image + s * d
    other = 1 - wall.axis
    if not (wall.lo <= float(hit[other]) <= wall.hi):
        return None
    if not (0.0 <= float(hit[2]) <= wall.height):
        return None
    return hit


def rotate_z(v: np.ndarray, angle: float) -> np.ndarray:
    """Rotate a vector about the z axis (counter-clockwise)."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]])
