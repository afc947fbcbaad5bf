"""Laguerre functions and the bridge between power series and Laplace transforms.

With ``U f = sum f_n L_n(t) e^{-t/2}`` and
``(V u)(lam) = u((2 lam - 1)/(2 lam + 1)) / (lam + 1/2)``, the power-series map
``(B f)(x) = sum f_n x^n`` and the Laplace transform ``G`` satisfy
``V B f = G U f``. Termwise this is

    int_0^inf L_n(t) e^{-(1/2 + lam) t} dt = (lam + 1/2)^{-1} ((2 lam - 1)/(2 lam + 1))^n.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_laguerre

__all__ = [
    "MAX_DEGREE",
    "MAX_ARGUMENT",
    "laguerre_eval",
    "laguerre_functions",
    "laplace_of_laguerre",
    "u_map",
    "v_map",
    "power_series",
    "g_transform",
    "gauss_laguerre",
    "laguerre_gram",
    "default_lambda_grid",
    "substitution",
    "BridgeRow",
    "bridge_table",
    "bridge_residual",
    "pullback_atoms",
]

MAX_DEGREE = 512
MAX_ARGUMENT = 700.0
_RESCALE = 1e150
_LOG_RESCALE = np.log(_RESCALE)


def _check_range(n: int, x: np.ndarray, guard: bool) -> None:
    if n < 0:
        raise ValueError("degree must be non-negative")
    if np.any(x < 0) or np.any(~np.isfinite(x)):
        raise ValueError("Laguerre arguments must be finite and >= 0")
    if guard and n > MAX_DEGREE:
        raise ValueError(f"degree {n} exceeds {MAX_DEGREE}")
    if guard and x.size and x.max() > MAX_ARGUMENT:
        raise ValueError(f"argument {x.max():g} exceeds {MAX_ARGUMENT}")


def _recurrence(n_max: int, x: np.ndarray, log_weight: np.ndarray) -> np.ndarray:
    """Rows ``exp(log_weight) * L_k(x)`` for ``k = 0..n_max``.

    The three-term recurrence runs on rescaled values with a per-point log
    scale, so neither ``L_k`` (which grows like ``x^k``) nor the weight
    overflow or underflow before they are combined.
    """
    out = np.empty((n_max + 1, x.size))
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    logscale = np.zeros_like(x)
    out[0] = np.exp(log_weight)
    for k in range(n_max):
        nxt = ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            prev[big] /= _RESCALE
            logscale[big] += _LOG_RESCALE
        out[k + 1] = _combine(cur, logscale + log_weight)
    return out


def _combine(value: np.ndarray, log_factor: np.ndarray) -> np.ndarray:
    """``value * exp(log_factor)`` without the factor underflowing on its own."""
    direct = np.abs(log_factor) < 700
    out = np.empty_like(value)
    out[direct] = value[direct] * np.exp(log_factor[direct])
    rest = ~direct
    if rest.any():
        v = value[rest]
        with np.errstate(divide="ignore"):
            out[rest] = np.sign(v) * np.exp(np.log(np.abs(v)) + log_factor[rest])
    return out


def laguerre_eval(n: int, x):
    """``L_n(x)`` via ``(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}``.

    Restricted to ``n <= 512`` and ``0 <= x <= 700``.
    """
    arr = np.asarray(x, dtype=float)
    flat = np.atleast_1d(arr).ravel()
    _check_range(int(n), flat, guard=True)
    vals = _recurrence(int(n), flat, np.zeros_like(flat))[int(n)]
    return float(vals[0]) if arr.ndim == 0 else vals.reshape(arr.shape)


def laguerre_functions(n_max: int, t) -> np.ndarray:
    """Matrix of ``L_k(t) e^{-t/2}``, shape ``(n_max + 1, len(t))``.

    No upper bound on ``t``: the exponential is folded into the recurrence.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    _check_range(int(n_max), t, guard=False)
    return _recurrence(int(n_max), t, -0.5 * t)


def laplace_of_laguerre(n: int, lam) -> np.ndarray | float:
    """Closed form of ``int_0^inf L_n(t) e^{-(1/2 + lam) t} dt``."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr <= -0.5):
        raise ValueError("lambda must exceed -1/2")
    if n < 0:
        raise ValueError("degree must be non-negative")
    val = ((2 * lam_arr - 1) / (2 * lam_arr + 1)) ** n / (lam_arr + 0.5)
    return float(val) if lam_arr.ndim == 0 else val


def u_map(f, t) -> np.ndarray:
    """``(U f)(t) = sum f_n L_n(t) e^{-t/2}`` at the given points."""
    f = np.asarray(f)
    t_arr = np.asarray(t, dtype=float)
    if f.size == 0:
        return np.zeros(t_arr.shape)
    vals = f @ laguerre_functions(f.size - 1, t_arr)
    return vals.reshape(t_arr.shape)


def substitution(lam):
    """``x = (2 lam - 1)/(2 lam + 1)``, mapping ``(0, inf)`` onto ``(-1, 1)``."""
    lam = np.asarray(lam, dtype=float)
    return (2 * lam - 1) / (2 * lam + 1)


def v_map(u, lam):
    """``(V u)(lam) = u(x(lam)) / (lam + 1/2)``."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr <= 0):
        raise ValueError("lambda must be positive")
    return u(substitution(lam_arr)) / (lam_arr + 0.5)


def power_series(f):
    """``x -> sum f_n x^n`` (Horner)."""
    f = np.asarray(f)

    def series(x):
        x = np.asarray(x)
        acc = np.zeros(x.shape, dtype=np.result_type(f, x, float))
        for coef in f[::-1]:
            acc = acc * x + coef
        return acc

    return series


@lru_cache(maxsize=16)
def gauss_laguerre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Laguerre nodes and weights for ``int_0^inf e^{-s} g(s) ds``."""
    nodes, weights = roots_laguerre(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def g_transform(g, lam, order: int = 128, decay: float = 0.0):
    """Laplace transform ``int_0^inf e^{-t lam} g(t) dt`` for ``lam > 0``.

    Parameters
    ----------
    g : array_like or callable
        An array is read as Laguerre-function coefficients (``g = U c``) and
        summed in closed form. A callable is integrated by Gauss-Laguerre
        quadrature.
    order : int
        Quadrature order for callables.
    decay : float
        Known exponential decay rate of a callable ``g``. The quadrature uses
        ``t = s / (lam + decay)`` and integrates ``e^{decay t} g(t)``, which is
        a polynomial when ``g`` is a finite Laguerre-function combination and
        ``decay = 1/2``.
    """
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr <= 0):
        raise ValueError("lambda must be positive")
    if not callable(g):
        coeffs = np.asarray(g)
        out = sum(coeffs[n] * laplace_of_laguerre(n, lam_arr) for n in range(coeffs.size))
        return out if coeffs.size else np.zeros(lam_arr.shape)
    if not 0 <= decay:
        raise ValueError("decay must be non-negative")
    nodes, weights = gauss_laguerre(int(order))
    flat = np.atleast_1d(lam_arr).ravel()
    out = []
    for lam_k in flat:
        mu = lam_k + decay
        t = nodes / mu
        out.append(np.sum(weights * np.exp(decay * t) * np.asarray(g(t))) / mu)
    out = np.array(out)
    return out[0] if lam_arr.ndim == 0 else out.reshape(lam_arr.shape)


def laguerre_gram(n_max: int, order: int = 64) -> np.ndarray:
    """Gram matrix of ``{U e_n}_{n <= n_max}`` under Gauss-Laguerre quadrature."""
    nodes, weights = gauss_laguerre(int(order))
    # L_n L_m e^{-t} is the Gauss-Laguerre integrand, so use plain polynomials
    P = _recurrence(int(n_max), np.asarray(nodes), np.zeros(len(nodes)))
    return (P * weights) @ P.T


def default_lambda_grid() -> np.ndarray:
    """24 log-spaced points in ``[0.1, 50]``."""
    return np.geomspace(0.1, 50.0, 24)


@dataclass(frozen=True)
class BridgeRow:
    lam: float
    lhs: complex
    rhs: complex

    @property
    def deviation(self) -> float:
        return float(abs(self.lhs - self.rhs))


def _check_bridge_inputs(f, grid) -> tuple[np.ndarray, np.ndarray]:
    f = np.asarray(f)
    grid = default_lambda_grid() if grid is None else np.asarray(grid, dtype=float).ravel()
    if f.ndim != 1 or f.size == 0:
        raise ValueError("f must be a non-empty vector")
    if f.size > 64:
        raise ValueError("bridge check supports len(f) <= 64")
    if grid.size == 0 or np.any(grid <= 0) or np.any(grid > 50):
        raise ValueError("lambda grid must lie in (0, 50]")
    return f, grid


def bridge_table(f, grid=None, order: int = 128) -> list[BridgeRow]:
    """Both sides of ``V B f = G U f`` on a lambda grid.

    The left side is the closed-form power series. The right side is the
    quadrature Laplace transform of ``U f`` sampled pointwise, so the two are
    computed independently.
    """
    f, grid = _check_bridge_inputs(f, grid)
    lhs = v_map(power_series(f), grid)
    rhs = g_transform(lambda t: u_map(f, t), grid, order=order, decay=0.5)
    return [BridgeRow(float(l), complex(a), complex(b)) for l, a, b in zip(grid, lhs, rhs)]


def bridge_residual(f, grid=None, order: int = 128) -> float:
    """``max |V B f - G U f|`` over the grid."""
    return max(row.deviation for row in bridge_table(f, grid, order))


def pullback_atoms(lams, masses) -> tuple[np.ndarray, np.ndarray]:
    """Move atoms of ``dSigma(lam)`` on ``(0, inf)`` to ``dM(x) = (lam + 1/2)^{-2} dSigma``."""
    lams = np.asarray(lams, dtype=float)
    masses = np.asarray(masses, dtype=float)
    if lams.shape != masses.shape:
        raise ValueError("locations and masses must have the same shape")
    if np.any(lams <= 0):
        raise ValueError("lambda locations must be positive")
    if np.any(masses < 0):
        raise ValueError("masses must be non-negative")
    return substitution(lams), masses / (lams + 0.5) ** 2
