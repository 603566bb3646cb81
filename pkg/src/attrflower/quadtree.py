"""Quadtree summarization of 2-D point sets for Barnes-Hut repulsion.

Cells store their point count and center of mass. A traversal for a query
point accumulates the Student-t repulsion numerator and the normalization
mass, approximating whole cells whose angular size (side / distance) falls
below the accuracy parameter theta.
"""

from __future__ import annotations

import numpy as np

# Subdivision stops once points are provably coincident; the depth cap only
# guards against pathological near-coincidence at denormal separations.
_MAX_DEPTH = 128


class _Node:
    __slots__ = ("count", "com", "size", "children", "coincident")

    def __init__(self, points: np.ndarray, cx: float, cy: float,
                 half: float, depth: int) -> None:
        self.count = points.shape[0]
        self.com = points.mean(axis=0)
        self.size = 2.0 * half
        self.children: list["_Node"] = []
        self.coincident = False
        if self.count <= 1:
            return
        if depth >= _MAX_DEPTH or bool((points == points[0]).all()):
            self.coincident = True
            return
        east = points[:, 0] > cx
        north = points[:, 1] > cy
        shift = half / 2.0
        for ex, ny in ((True, True), (True, False), (False, True), (False, False)):
            mask = (east == ex) & (north == ny)
            if mask.any():
                self.children.append(_Node(
                    points[mask],
                    cx + (shift if ex else -shift),
                    cy + (shift if ny else -shift),
                    shift, depth + 1))


class QuadTree:
    """Quadtree over an (n, 2) coordinate array."""

    def __init__(self, points: np.ndarray) -> None:
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 2:
            raise ValueError(f"expected (n, 2) points, got {points.shape}")
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        center = (lo + hi) / 2.0
        half = float(max(hi[0] - lo[0], hi[1] - lo[1]) / 2.0) + 1e-12
        self._root = _Node(points, float(center[0]), float(center[1]),
                           half, 0)

    def repulsion(self, point: np.ndarray, theta: float) -> tuple[float, float, float]:
        """(force_x, force_y, mass) of the Student-t repulsion sums.

        force accumulates sum over cells of N * q^2 * (p - com) and mass
        accumulates sum of N * q, with q = 1 / (1 + ||p - com||^2). The
        query point's own self-term contributes exactly 1 to mass and 0 to
        force; callers subtract it.
        """
        px, py = float(point[0]), float(point[1])
        fx = fy = mass = 0.0
        stack = [self._root]
        theta2 = theta * theta
        while stack:
            node = stack.pop()
            dx = px - node.com[0]
            dy = py - node.com[1]
            d2 = dx * dx + dy * dy
            if node.count == 1 or node.coincident:
                q = 1.0 / (1.0 + d2)
                mass += node.count * q
                w = node.count * q * q
                fx += w * dx
                fy += w * dy
            elif node.size * node.size < theta2 * d2:
                q = 1.0 / (1.0 + d2)
                mass += node.count * q
                w = node.count * q * q
                fx += w * dx
                fy += w * dy
            else:
                stack.extend(node.children)
        return fx, fy, mass
