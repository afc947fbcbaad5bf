"""Nonnegative measures on the unit circle or a real interval.

A measure is an absolutely continuous part with a structured density plus a
finite list of point masses. Densities are restricted to families with exact
Gaussian quadrature rules:

* on the circle, a real trigonometric polynomial
  ``t(theta) = sum_{|k|<=K} c_k exp(i k theta)`` with ``c_{-k} = conj(c_k)``
  taken with respect to the normalized arc length ``dtheta / (2 pi)``;
* on ``[a, b]``, a polynomial times a Jacobi weight,
  ``p(x) (b - x)**alpha (x - a)**beta``.

Circle atoms are located by their angle in radians.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from scipy.special import betaln, roots_jacobi

__all__ = [
    "Circle",
    "Interval",
    "CIRCLE",
    "TrigDensity",
    "JacobiDensity",
    "Atom",
    "Measure",
    "MeasureSpecError",
    "moment_circle",
    "moment_line",
    "circle_moments",
    "line_moments",
    "total_mass",
    "mass_near_endpoint",
    "interval_mass",
    "semibounded_gap",
    "gauss_jacobi",
    "measure_from_json",
    "measure_to_json",
    "load_measure",
]

SCHEMA_VERSION = 1

# densities are validated on a grid; values above -NONNEG_SLACK * scale pass
NONNEG_SLACK = 1e-12


class MeasureSpecError(ValueError):
    """Invalid measure description. ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class Circle:
    def __str__(self):
        return "circle"


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or self.a >= self.b:
            raise MeasureSpecError("support", f"invalid interval [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, x: float) -> bool:
        return self.a <= x <= self.b

    def __str__(self):
        return f"[{self.a}, {self.b}]"


CIRCLE = Circle()
Support = Union[Circle, Interval]


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TrigDensity:
    """Real trigonometric polynomial given by ``coeffs = (c_0, ..., c_K)``.

    Negative-index coefficients are implied by Hermitian symmetry.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(np.atleast_1d(self.coeffs), dtype=complex)
        if c.ndim != 1:
            raise MeasureSpecError("density.trig_coeffs", "must be one-dimensional")
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        if not np.all(np.isfinite(c)):
            raise MeasureSpecError("density.trig_coeffs", "non-finite coefficient")
        if abs(c[0].imag) > 1e-14 * max(1.0, abs(c[0])):
            raise MeasureSpecError("density.trig_coeffs", "c_0 must be real")
        c[0] = c[0].real
        # trailing zeros carry no information and would inflate quadrature orders
        nz = np.flatnonzero(c)
        c = c[: (nz[-1] + 1 if nz.size else 1)]
        object.__setattr__(self, "coeffs", _readonly(c))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def coefficient(self, n: int) -> complex:
        k = abs(n)
        if k > self.degree:
            return 0j
        c = self.coeffs[k]
        return complex(c) if n >= 0 else complex(np.conj(c))

    def __call__(self, theta, derivative: int = 0):
        theta = np.asarray(theta, dtype=float)
        k = np.arange(1, self.degree + 1)
        # derivative of exp(i k theta) brings down (i k)**derivative
        ck = self.coeffs[1:] * (1j * k) ** derivative
        e = np.exp(1j * np.multiply.outer(theta, k))
        val = 2.0 * np.real(e @ ck)
        if derivative == 0:
            val = val + self.coeffs[0].real
        return val

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)


@dataclass(frozen=True)
class JacobiDensity:
    """``p(x) (b - x)**alpha (x - a)**beta`` with ``p`` in ascending monomial form."""

    poly: np.ndarray
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.poly, dtype=float))
        if p.ndim != 1:
            raise MeasureSpecError("density.poly_coeffs", "must be one-dimensional")
        if p.size == 0:
            p = np.zeros(1)
        if not np.all(np.isfinite(p)):
            raise MeasureSpecError("density.poly_coeffs", "non-finite coefficient")
        nz = np.flatnonzero(p)
        p = p[: (nz[-1] + 1 if nz.size else 1)]
        if not (self.alpha > -1 and self.beta > -1):
            raise MeasureSpecError("density", "Jacobi exponents must exceed -1")
        object.__setattr__(self, "poly", _readonly(p))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def degree(self) -> int:
        return self.poly.size - 1

    def p(self, x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), self.poly)

    def __call__(self, x, support: Interval):
        x = np.asarray(x, dtype=float)
        inside = (x >= support.a) & (x <= support.b)
        xc = np.clip(x, support.a, support.b)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = (support.b - xc) ** self.alpha * (xc - support.a) ** self.beta
        return np.where(inside, self.p(xc) * w, 0.0)

    def is_zero(self) -> bool:
        return not np.any(self.poly)


Density = Union[TrigDensity, JacobiDensity]


@dataclass(frozen=True)
class Atom:
    location: float
    mass: float


@dataclass(frozen=True)
class Measure:
    """Nonnegative measure: density part plus atoms, on the circle or an interval.

    Validation happens at construction; instances are immutable.
    """

    support: Support
    density: Density
    atoms: tuple = field(default=())

    def __post_init__(self):
        atoms = tuple(a if isinstance(a, Atom) else Atom(*a) for a in self.atoms)
        atoms = tuple(Atom(float(a.location), float(a.mass)) for a in atoms)
        object.__setattr__(self, "atoms", atoms)
        if isinstance(self.support, Circle):
            if not isinstance(self.density, TrigDensity):
                raise MeasureSpecError("density", "circle measures need trig_coeffs")
        elif isinstance(self.support, Interval):
            if not isinstance(self.density, JacobiDensity):
                raise MeasureSpecError("density", "interval measures need poly_coeffs")
        else:
            raise MeasureSpecError("support", f"unknown support {self.support!r}")
        for i, atom in enumerate(atoms):
            if not math.isfinite(atom.location):
                raise MeasureSpecError(f"atoms[{i}].location", "must be finite")
            if not (math.isfinite(atom.mass) and atom.mass >= 0):
                raise MeasureSpecError(f"atoms[{i}].mass", "must be finite and >= 0")
            if isinstance(self.support, Interval) and not self.support.contains(atom.location):
                raise MeasureSpecError(
                    f"atoms[{i}].location", f"{atom.location} outside support {self.support}"
                )
        keys = [self._location_key(a.location) for a in atoms]
        if len(set(keys)) != len(keys):
            raise MeasureSpecError("atoms", "atom locations must be pairwise distinct")
        self._check_density_nonnegative()

    def _location_key(self, loc: float) -> float:
        if isinstance(self.support, Circle):
            r = round(loc % (2 * math.pi), 12)
            return 0.0 if r == round(2 * math.pi, 12) else r
        return loc

    def _check_density_nonnegative(self):
        d = self.density
        if isinstance(d, TrigDensity):
            m = max(4 * d.degree + 1, 65)
            vals = d(2 * np.pi * np.arange(m) / m)
            scale = np.sum(np.abs(d.coeffs)) * 2
        else:
            m = max(4 * d.degree + 1, 65)
            vals = d.p(np.linspace(self.support.a, self.support.b, m))
            scale = np.max(np.abs(vals)) if vals.size else 0.0
        if np.min(vals) < -NONNEG_SLACK * max(scale, 1.0):
            raise MeasureSpecError("density", f"negative on validation grid (min {np.min(vals):.3g})")

    # convenience constructors

    @classmethod
    def circle(cls, coeffs=(1.0,), atoms=()) -> "Measure":
        return cls(CIRCLE, TrigDensity(coeffs), tuple(atoms))

    @classmethod
    def interval(cls, a=-1.0, b=1.0, poly=(1.0,), alpha=0.0, beta=0.0, atoms=()) -> "Measure":
        return cls(Interval(float(a), float(b)), JacobiDensity(poly, alpha, beta), tuple(atoms))

    @property
    def on_circle(self) -> bool:
        return isinstance(self.support, Circle)

    @property
    def atom_mass(self) -> float:
        return float(sum(a.mass for a in self.atoms if a.mass > 0))

    def atoms_at(self, location: float) -> float:
        key = self._location_key(location)
        return float(sum(a.mass for a in self.atoms if self._location_key(a.location) == key))


# ----------------------------------------------------------------------------
# quadrature


@lru_cache(maxsize=256)
def _jacobi_rule(q: int, alpha: float, beta: float):
    x, w = roots_jacobi(q, alpha, beta)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_jacobi(q: int, c: float, d: float, alpha: float = 0.0, beta: float = 0.0):
    """Nodes and weights for ``int_c^d g(x) (d - x)**alpha (x - c)**beta dx``."""
    t, w = _jacobi_rule(int(q), float(alpha), float(beta))
    half = 0.5 * (d - c)
    return c + half * (t + 1.0), w * half ** (1.0 + alpha + beta)


def _jacobi_power_moments(a: float, b: float, alpha: float, beta: float, n_max: int) -> np.ndarray:
    """``m_n = int_a^b x**n (b - x)**alpha (x - a)**beta dx`` for ``n = 0..n_max``.

    Integrating ``d/dx[x**n (b-x)**(alpha+1) (x-a)**(beta+1)]`` over ``[a, b]``
    gives the exact recurrence

        (n + alpha + beta + 2) m_{n+1}
            = (n (a + b) + (alpha + 1) a + (beta + 1) b) m_n - n a b m_{n-1}.

    Forward evaluation is stable: the moments follow the dominant endpoint.
    """
    m = np.empty(n_max + 1)
    length = b - a
    m[0] = math.exp((alpha + beta + 1) * math.log(length) + betaln(alpha + 1, beta + 1))
    if n_max == 0:
        return m
    with np.errstate(over="ignore", invalid="ignore"):
        m[1] = m[0] * ((alpha + 1) * a + (beta + 1) * b) / (alpha + beta + 2)
        ab = a * b
        for n in range(1, n_max):
            m[n + 1] = ((n * (a + b) + (alpha + 1) * a + (beta + 1) * b) * m[n] - n * ab * m[n - 1]) / (
                n + alpha + beta + 2
            )
    return m


# ----------------------------------------------------------------------------
# moments


def moment_circle(M: Measure, n: int) -> complex:
    """``t_n = int z**(-n) dM(z)``: density coefficient read-off plus atom sum."""
    if not M.on_circle:
        raise ValueError("moment_circle needs a circle measure")
    n = int(n)
    val = M.density.coefficient(n)
    for atom in M.atoms:
        val += atom.mass * complex(np.exp(-1j * n * atom.location))
    return val


def circle_moments(M: Measure, n_max: int) -> np.ndarray:
    """Array ``(t_0, ..., t_{n_max})``; ``t_{-n}`` is the conjugate of ``t_n``."""
    if not M.on_circle:
        raise ValueError("circle_moments needs a circle measure")
    n = np.arange(n_max + 1)
    t = np.zeros(n_max + 1, dtype=complex)
    k = min(M.density.degree, n_max)
    t[: k + 1] = M.density.coeffs[: k + 1]
    for atom in M.atoms:
        t += atom.mass * np.exp(-1j * n * atom.location)
    return t


def line_moments(M: Measure, n_max: int) -> np.ndarray:
    """Array ``(h_0, ..., h_{n_max})`` of power moments of an interval measure."""
    if M.on_circle:
        raise ValueError("line_moments needs an interval measure")
    d, s = M.density, M.support
    h = np.zeros(n_max + 1)
    if not d.is_zero():
        base = _jacobi_power_moments(s.a, s.b, d.alpha, d.beta, n_max + d.degree)
        for k, pk in enumerate(d.poly):
            if pk != 0.0:
                h += pk * base[k : k + n_max + 1]
    n = np.arange(n_max + 1)
    with np.errstate(over="ignore"):
        for atom in M.atoms:
            if atom.location == 0.0:
                h[0] += atom.mass
            else:
                h += atom.mass * np.power(atom.location, n)
    return h


def moment_line(M: Measure, n: int) -> float:
    """``h_n = int x**n dM(x)``."""
    if n < 0:
        raise ValueError("power moments need n >= 0")
    return float(line_moments(M, int(n))[-1])


def total_mass(M: Measure) -> float:
    if M.on_circle:
        return float(moment_circle(M, 0).real)
    return float(line_moments(M, 0)[0])


# ----------------------------------------------------------------------------
# masses of subintervals


def _density_integral(M: Measure, c: float, d: float, func: Callable | None = None,
                      rtol: float = 1e-15, q_max: int = 1024) -> float:
    """Integral of ``func * density`` over ``[c, d]`` inside the support.

    The Jacobi factor of an endpoint shared with ``[c, d]`` goes into the
    quadrature weight; the other factor is smooth on ``[c, d]`` and handled by
    doubling the rule until it settles.
    """
    s, dens = M.support, M.density
    c, d = max(c, s.a), min(d, s.b)
    if d <= c or dens.is_zero():
        return 0.0
    alpha = dens.alpha if d == s.b else 0.0
    beta = dens.beta if c == s.a else 0.0

    def integrand(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            v = dens.p(x)
            if d != s.b:
                v = v * (s.b - x) ** dens.alpha
            if c != s.a:
                v = v * (x - s.a) ** dens.beta
        return v if func is None else v * func(x)

    exact = func is None and alpha == dens.alpha and beta == dens.beta
    q = max(dens.degree // 2 + 2, 16)
    x, w = gauss_jacobi(q, c, d, alpha, beta)
    prev = float(np.real(w @ integrand(x)))
    if exact:
        return prev
    q = max(q, 32)
    while True:
        q *= 2
        x, w = gauss_jacobi(q, c, d, alpha, beta)
        cur = float(np.real(w @ integrand(x)))
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300) or q >= q_max:
            return cur
        prev = cur


def interval_mass(M: Measure, c: float, d: float, include_c: bool = True, include_d: bool = True) -> float:
    """``M`` of the interval between ``c`` and ``d``, endpoint inclusion per flags."""
    if M.on_circle:
        raise ValueError("interval_mass needs an interval measure")
    s = M.support
    lo, hi = max(c, s.a), min(d, s.b)
    dens = 0.0
    if hi > lo:
        full = float(line_moments(M, 0)[0]) - sum(a.mass for a in M.atoms)
        # integrate over whichever piece keeps the far Jacobi factor smooth
        if lo == s.a and hi == s.b:
            dens = full
        elif lo == s.a:
            dens = _density_integral(M, lo, hi) if hi - s.a <= 0.5 * s.length else full - _density_integral(M, hi, s.b)
        elif hi == s.b:
            dens = _density_integral(M, lo, hi) if s.b - lo <= 0.5 * s.length else full - _density_integral(M, s.a, lo)
        else:
            dens = _density_integral(M, lo, hi)
        dens = max(dens, 0.0)
    atoms = 0.0
    for atom in M.atoms:
        x = atom.location
        left = x > c or (include_c and x == c)
        right = x < d or (include_d and x == d)
        if left and right:
            atoms += atom.mass
    return dens + atoms


def mass_near_endpoint(M: Measure, which: int, eps: float) -> float:
    """``M((1 - eps, 1])`` for ``which=+1`` or ``M([-1, -1 + eps))`` for ``which=-1``."""
    if M.on_circle:
        raise ValueError("mass_near_endpoint needs an interval measure")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if which not in (1, -1):
        raise ValueError("which must be +1 or -1")
    s = M.support
    if s.a < -1 or s.b > 1:
        raise ValueError(f"support {s} is not inside [-1, 1]")
    if which == 1:
        return interval_mass(M, 1.0 - eps, 1.0, include_c=False, include_d=True)
    return interval_mass(M, -1.0, -1.0 + eps, include_c=True, include_d=False)


# ----------------------------------------------------------------------------
# semiboundedness


def semibounded_gap(M: Measure) -> float:
    """Essential infimum of the circle density (atoms only add mass).

    Grid search on ``max(8K + 1, 1024)`` angles, then Newton polishing of every
    grid-local minimum.
    """
    if not M.on_circle:
        raise ValueError("semibounded_gap needs a circle measure")
    t = M.density
    if t.degree == 0:
        return float(t.coeffs[0].real)
    m = max(8 * t.degree + 1, 1024)
    theta = 2 * np.pi * np.arange(m) / m
    vals = t(theta)
    best = float(vals.min())
    local = np.flatnonzero((vals <= np.roll(vals, 1)) & (vals <= np.roll(vals, -1)))
    for th in theta[local]:
        for _ in range(20):
            d2 = float(t(th, 2))
            if d2 <= 0:
                break
            step = float(t(th, 1)) / d2
            th -= step
            if abs(step) < 1e-15:
                break
        best = min(best, float(t(th)))
    return best


# ----------------------------------------------------------------------------
# JSON


def _num(obj, path: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise MeasureSpecError(path, f"expected a number, got {obj!r}")
    return float(obj)


def measure_from_json(spec) -> Measure:
    """Build a measure from the JSON schema (a parsed dict or a JSON string)."""
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise MeasureSpecError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    if not isinstance(spec, dict):
        raise MeasureSpecError("", "top level must be an object")
    unknown = set(spec) - {"support", "density", "atoms", "schema_version"}
    if unknown:
        raise MeasureSpecError(sorted(unknown)[0], "unknown field")
    if "support" not in spec:
        raise MeasureSpecError("support", "missing")
    sup = spec["support"]
    if sup == "circle":
        support: Support = CIRCLE
    elif isinstance(sup, dict) and set(sup) == {"interval"}:
        iv = sup["interval"]
        if not (isinstance(iv, list) and len(iv) == 2):
            raise MeasureSpecError("support.interval", "expected [a, b]")
        support = Interval(_num(iv[0], "support.interval[0]"), _num(iv[1], "support.interval[1]"))
    else:
        raise MeasureSpecError("support", "expected \"circle\" or {\"interval\": [a, b]}")

    dspec = spec.get("density", {})
    if not isinstance(dspec, dict):
        raise MeasureSpecError("density", "expected an object")
    if isinstance(support, Circle):
        extra = set(dspec) - {"trig_coeffs"}
        if extra:
            raise MeasureSpecError(f"density.{sorted(extra)[0]}", "not allowed for circle support")
        items = dspec.get("trig_coeffs", [])
        if not isinstance(items, list):
            raise MeasureSpecError("density.trig_coeffs", "expected a list")
        coeffs: dict[int, complex] = {}
        for i, item in enumerate(items):
            p = f"density.trig_coeffs[{i}]"
            if not isinstance(item, dict) or "k" not in item:
                raise MeasureSpecError(p, "expected {k, re, im}")
            k = item["k"]
            if isinstance(k, bool) or not isinstance(k, int):
                raise MeasureSpecError(p + ".k", "expected an integer")
            val = complex(_num(item.get("re", 0.0), p + ".re"), _num(item.get("im", 0.0), p + ".im"))
            if k in coeffs:
                raise MeasureSpecError(p + ".k", f"duplicate index {k}")
            coeffs[k] = val
        for k, v in coeffs.items():
            if k < 0 and -k in coeffs and abs(coeffs[-k] - np.conj(v)) > 1e-14 * max(1.0, abs(v)):
                raise MeasureSpecError("density.trig_coeffs", f"c_{k} is not conj(c_{-k})")
        kmax = max((abs(k) for k in coeffs), default=0)
        c = np.zeros(kmax + 1, dtype=complex)
        for k, v in coeffs.items():
            c[abs(k)] = v if k >= 0 else np.conj(v)
        density: Density = TrigDensity(c)
    else:
        extra = set(dspec) - {"poly_coeffs", "alpha", "beta"}
        if extra:
            raise MeasureSpecError(f"density.{sorted(extra)[0]}", "not allowed for interval support")
        poly = dspec.get("poly_coeffs", [0.0] if "density" not in spec else [1.0])
        if not isinstance(poly, list):
            raise MeasureSpecError("density.poly_coeffs", "expected a list")
        poly = [_num(v, f"density.poly_coeffs[{i}]") for i, v in enumerate(poly)]
        alpha = _num(dspec.get("alpha", 0.0), "density.alpha")
        beta = _num(dspec.get("beta", 0.0), "density.beta")
        for name, v in (("alpha", alpha), ("beta", beta)):
            if v <= -1:
                raise MeasureSpecError(f"density.{name}", "must exceed -1")
        density = JacobiDensity(poly, alpha, beta)

    raw_atoms = spec.get("atoms", [])
    if not isinstance(raw_atoms, list):
        raise MeasureSpecError("atoms", "expected a list")
    atoms = []
    for i, item in enumerate(raw_atoms):
        if not isinstance(item, dict) or set(item) != {"location", "mass"}:
            raise MeasureSpecError(f"atoms[{i}]", "expected {location, mass}")
        atoms.append(Atom(_num(item["location"], f"atoms[{i}].location"), _num(item["mass"], f"atoms[{i}].mass")))
    return Measure(support, density, tuple(atoms))


def measure_to_json(M: Measure) -> dict:
    if M.on_circle:
        support = "circle"
        density = {
            "trig_coeffs": [
                {"k": k, "re": float(c.real), "im": float(c.imag)} for k, c in enumerate(M.density.coeffs)
            ]
        }
    else:
        support = {"interval": [M.support.a, M.support.b]}
        density = {
            "poly_coeffs": [float(v) for v in M.density.poly],
            "alpha": M.density.alpha,
            "beta": M.density.beta,
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "support": support,
        "density": density,
        "atoms": [{"location": a.location, "mass": a.mass} for a in M.atoms],
    }


def load_measure(path) -> Measure:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return measure_from_json(text)
