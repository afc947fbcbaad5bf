"""Outer function of a strictly positive circle density.

    t_out(z) = exp( 1/2 * int (zeta + z)/(zeta - z) ln t(zeta) dm(zeta) ),  |z| < 1,

computed with the trapezoidal rule on the circle. The Herglotz kernel peaks
like ``2 / (1 - |z|)``, so the node count grows inversely with the distance
to the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measure import Measure, TrigDensity

__all__ = ["OuterFunction", "outer_eval", "boundary_modulus_check", "nodes_for", "MIN_DISTANCE"]

MIN_DISTANCE = 1e-6
_CHUNK = 1 << 22  # kernel entries per block


def _density(t) -> TrigDensity:
    if isinstance(t, Measure):
        if not t.on_circle:
            raise ValueError("outer functions need a circle density")
        if t.atoms:
            raise ValueError("outer functions need an absolutely continuous measure")
        return t.density
    if not isinstance(t, TrigDensity):
        raise TypeError(f"expected TrigDensity or circle Measure, got {type(t).__name__}")
    return t


def nodes_for(t: TrigDensity, distance: float) -> int:
    """Trapezoidal node count ``>= 64 (K + 1) / distance``, rounded up to a power of two."""
    q = int(math.ceil(64 * (t.degree + 1) / max(distance, MIN_DISTANCE)))
    return 1 << max(6, (q - 1).bit_length())


def _log_density(t: TrigDensity, q: int) -> np.ndarray:
    theta = 2 * np.pi * np.arange(q) / q
    vals = t(theta)
    if vals.min() <= 0:
        raise ValueError(f"density must be strictly positive (grid minimum {vals.min():.3g})")
    return np.log(vals)


def outer_eval(t, z, nodes: int | None = None):
    """``t_out(z)`` for ``|z| <= 1 - 1e-6``; scalar or array ``z``."""
    t = _density(t)
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = np.atleast_1d(z).ravel()
    dist = 1.0 - float(np.max(np.abs(z))) if z.size else 1.0
    if dist < MIN_DISTANCE * (1 - 1e-12):
        raise ValueError(f"|z| too close to the unit circle (distance {dist:.3g} < {MIN_DISTANCE})")
    q = nodes or nodes_for(t, dist)
    # the density must be positive; check on a grid at least as fine as validation
    _log_density(t, max(8 * t.degree + 1, 1024))
    zeta = np.exp(2j * np.pi * np.arange(q) / q)
    logt = _log_density(t, q)
    acc = np.zeros(z.size, dtype=complex)
    step = max(1, _CHUNK // max(z.size, 1))
    for start in range(0, q, step):
        zc = zeta[start : start + step]
        kern = (zc[None, :] + z[:, None]) / (zc[None, :] - z[:, None])
        acc += kern @ logt[start : start + step]
    out = np.exp(0.5 * acc / q)
    return complex(out[0]) if not shape else out.reshape(shape)


@dataclass(frozen=True)
class OuterFunction:
    """Callable wrapper around :func:`outer_eval` for a fixed density."""

    density: TrigDensity
    nodes: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "density", _density(self.density))

    def __call__(self, z):
        return outer_eval(self.density, z, self.nodes)

    def geometric_mean(self) -> float:
        """``exp(int ln t dm)``, which equals ``|t_out(0)|**2``."""
        q = nodes_for(self.density, 1.0)
        return float(np.exp(np.mean(_log_density(self.density, q))))


def boundary_modulus_check(t, theta_grid, r: float) -> float:
    """``max | |t_out(r e^{i theta})|**2 - t(e^{i theta}) |`` over the grid."""
    t = _density(t)
    if not 0.9 <= r < 1:
        raise ValueError("r must lie in [0.9, 1)")
    theta = np.asarray(theta_grid, dtype=float)
    vals = outer_eval(t, r * np.exp(1j * theta))
    return float(np.max(np.abs(np.abs(vals) ** 2 - t(theta))))
