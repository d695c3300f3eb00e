"""Seeded low-discrepancy point sets in 4-D balls and on 3-spheres."""
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, qmc

_EDGE = 1e-12


@dataclass(frozen=True)
class SampleConfig:
    count: int = 100_000
    seed: int = 42
    min_separation: float = 1e-4

    def __post_init__(self):
        if self.count < 2:
            raise ValueError(f"count must be >= 2, got {self.count}")
        if self.min_separation <= 0:
            raise ValueError("min_separation must be positive")


def _halton(dim, count, seed):
    u = qmc.Halton(d=dim, scramble=True, seed=seed).random(count)
    return np.clip(u, _EDGE, 1.0 - _EDGE)


def _directions(u):
    g = norm.ppf(u)
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sphere_points(count, radius=1.0, seed=0, center=None):
    """``count`` points on the sphere ``|q - center| = radius``."""
    pts = radius * _directions(_halton(4, count, seed))
    if center is not None:
        pts = pts + np.asarray(center, dtype=float)
    return pts


def ball_points(count, radius=1.0, seed=0, center=None):
    """``count`` points filling the solid ball uniformly in volume.

    One Halton coordinate drives the radius through the inverse CDF
    ``r = R u^(1/4)``; the other four give a Gaussian direction.
    """
    u = _halton(5, count, seed)
    rad = radius * u[:, 0] ** 0.25
    pts = rad[:, None] * _directions(u[:, 1:])
    if center is not None:
        pts = pts + np.asarray(center, dtype=float)
    return pts


def axis_points(radius=1.0, center=None):
    """The eight points ``center ± radius e_k``."""
    pts = np.vstack([np.eye(4), -np.eye(4)]) * radius
    if center is not None:
        pts = pts + np.asarray(center, dtype=float)
    return pts


def unit_imaginary_points(count):
    """Fibonacci lattice on the sphere of unit imaginary quaternions."""
    k = np.arange(count) + 0.5
    z = 1.0 - 2.0 * k / count
    phi = np.pi * (1.0 + 5 ** 0.5) * k
    s = np.sqrt(1.0 - z * z)
    out = np.zeros((count, 4))
    out[:, 1] = s * np.cos(phi)
    out[:, 2] = s * np.sin(phi)
    out[:, 3] = z
    return out
