"""Closability and boundedness verdicts.

Verdicts that decide something are structural: they read the measure, since
no finite stretch of coefficients determines a limit. Coefficient statistics
are attached as evidence and marked advisory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .forms import CoefficientSequence, Kind, form_via_measure, from_measure
from .measure import Measure, _density_integral, interval_mass, line_moments, mass_near_endpoint
from .spectra import norm_growth

__all__ = [
    "Verdict",
    "DiagnosticReport",
    "DecayStats",
    "Geometric",
    "decay_stats",
    "toeplitz_closable",
    "hankel_closable",
    "widom_boundedness",
    "closure_domain_value",
    "dyadic_grid",
    "STABILITY_RATIO",
    "DECAY_RATIO",
]

SCHEMA_VERSION = 1

# "O(eps)" / "O(1/n)" read off the last two dyadic levels: the scaled quantity
# may not grow by more than this factor per halving
STABILITY_RATIO = 1.05
# advisory tail decay: sup-tail must shrink by this factor over the last level
DECAY_RATIO = 0.9


@dataclass
class Verdict:
    holds: bool
    evidence: dict
    required: bool = True

    def to_json(self) -> dict:
        return {"holds": self.holds, "required": self.required, "evidence": _jsonable(self.evidence)}


@dataclass
class DiagnosticReport:
    subject: str
    verdicts: dict = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return all(v.holds for v in self.verdicts.values() if v.required)

    def __getitem__(self, name) -> Verdict:
        return self.verdicts[name]

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "subject": self.subject,
            "overall": self.overall,
            "verdicts": {k: v.to_json() for k, v in self.verdicts.items()},
        }

    def table(self) -> str:
        rows = [(name, "yes" if v.holds else "no", "required" if v.required else "advisory",
                 _summary(v.evidence)) for name, v in self.verdicts.items()]
        w0 = max(len("criterion"), *(len(r[0]) for r in rows))
        lines = [f"{self.subject}: overall {'PASS' if self.overall else 'FAIL'}",
                 f"{'criterion':<{w0}}  holds  kind      evidence"]
        lines += [f"{r[0]:<{w0}}  {r[1]:<5}  {r[2]:<8}  {r[3]}" for r in rows]
        return "\n".join(lines)


def _summary(ev: dict) -> str:
    parts = []
    for k, v in ev.items():
        if isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool):
            parts.append(f"{k}={float(v):.6g}")
        elif isinstance(v, (str, bool)):
            parts.append(f"{k}={v}")
    return ", ".join(parts)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def dyadic_grid(n_top: int, start: int = 1) -> list:
    out, n = [], start
    while n <= n_top:
        out.append(n)
        n *= 2
    return out


# ----------------------------------------------------------------------------
# coefficient statistics


@dataclass
class DecayStats:
    grid: list
    sup_tail: list
    l2_tail: list
    exponent: float
    fit_range: tuple

    @property
    def decaying(self) -> bool:
        """Advisory: did the sup-tail shrink over the last dyadic level?"""
        if len(self.sup_tail) < 2:
            return False
        last, prev = self.sup_tail[-1], self.sup_tail[-2]
        if last == 0.0:
            return True
        return last <= DECAY_RATIO * prev

    def to_json(self) -> dict:
        return {
            "grid": self.grid,
            "sup_tail": self.sup_tail,
            "l2_tail": self.l2_tail,
            "exponent": self.exponent,
            "fit_range": list(self.fit_range),
        }


def decay_stats(c: CoefficientSequence, fit_range=(64, 4096)) -> DecayStats:
    """Tail sup, tail energy and fitted power law of ``|c_n|``.

    For Toeplitz sequences the tails run over ``|n| >= N`` (both signs).
    """
    a = np.abs(np.asarray(c.values))
    n_top = a.size - 1
    with np.errstate(invalid="ignore"):
        sup_from = np.maximum.accumulate(a[::-1])[::-1]
        sq = a.astype(float) ** 2
        energy_from = np.cumsum(sq[::-1])[::-1]
    if c.kind is Kind.TOEPLITZ:
        energy_from = 2.0 * energy_from
    # stop at n_top / 2 so every tail sup runs over at least half its window
    grid = dyadic_grid(max(n_top // 2, 1))
    lo, hi = fit_range
    hi = min(hi, n_top)
    n = np.arange(max(lo, 1), hi + 1)
    y = a[n] if n.size else n
    ok = np.isfinite(y) & (y > 0) if n.size else n
    exponent = math.nan
    if n.size and np.count_nonzero(ok) >= 2:
        exponent = float(np.polyfit(np.log(n[ok]), np.log(y[ok]), 1)[0])
    return DecayStats(grid, [float(sup_from[g]) for g in grid], [float(energy_from[g]) for g in grid],
                      exponent, (int(max(lo, 1)), int(hi)))


# ----------------------------------------------------------------------------
# closability


def toeplitz_closable(M: Measure, n_max: int = 1024) -> DiagnosticReport:
    """Closable iff the measure has no atoms (absolute continuity in this class)."""
    if not M.on_circle:
        raise ValueError("toeplitz_closable needs a circle measure")
    atoms = [a for a in M.atoms if a.mass > 0]
    report = DiagnosticReport("toeplitz_closability")
    report.verdicts["absolutely_continuous"] = Verdict(
        not atoms, {"atom_mass": M.atom_mass, "n_atoms": len(atoms)}
    )
    stats = decay_stats(from_measure(M, n_max))
    report.verdicts["coefficient_decay"] = Verdict(
        stats.decaying,
        {"last_sup_tail": stats.sup_tail[-1], "exponent": stats.exponent, **stats.to_json()},
        required=False,
    )
    return report


def _endpoint_atom_mass(M: Measure) -> float:
    return float(sum(a.mass for a in M.atoms if abs(a.location) == 1.0))


def _mass_outside(M: Measure) -> float:
    """Mass on ``R \\ [-1, 1]`` (density plus atoms)."""
    s = M.support
    out = 0.0
    if s.b > 1:
        out += interval_mass(M, 1.0, s.b, include_c=False)
    if s.a < -1:
        out += interval_mass(M, s.a, -1.0, include_d=False)
    return out


def hankel_closable(M: Measure, n_max: int = 512) -> DiagnosticReport:
    """Support condition: no mass outside the open interval ``(-1, 1)``.

    The verdict reads the measure; the moment tail statistics ride along as
    advisory evidence.
    """
    if M.on_circle:
        raise ValueError("hankel_closable needs an interval measure")
    endpoint = _endpoint_atom_mass(M)
    outside = _mass_outside(M)
    s = M.support
    report = DiagnosticReport("hankel_closability")
    report.verdicts["support_condition"] = Verdict(
        endpoint == 0.0 and outside == 0.0,
        {"endpoint_atom_mass": endpoint, "mass_outside": outside,
         "support_a": s.a, "support_b": s.b},
    )
    stats = decay_stats(CoefficientSequence.hankel(line_moments(M, 2 * n_max)))
    report.verdicts["moment_decay"] = Verdict(
        stats.decaying,
        {"last_sup_tail": stats.sup_tail[-1], "exponent": stats.exponent, **stats.to_json()},
        required=False,
    )
    return report


# ----------------------------------------------------------------------------
# boundedness


def _growth_ok(values) -> bool:
    last, prev = values[-1], values[-2]
    if not (math.isfinite(last) and math.isfinite(prev)):
        return False
    if prev == 0.0:
        return last == 0.0
    return last / prev <= STABILITY_RATIO


def widom_boundedness(source, n_max: int = 2048, sections=None, tol: float = 1e-10,
                      seed: int = 42) -> DiagnosticReport:
    """Boundedness of a Hankel operator from its measure or its coefficients.

    ``endpoint_mass``: ``M((1-eps, 1]) / eps`` and ``M([-1, -1+eps)) / eps`` on
    ``eps = 2**-1 .. 2**-20``; holds when the ratio stops growing at the last
    level (factor at most ``STABILITY_RATIO``). Measure input only.

    ``coefficient_decay``: ``sup (n+1) |h_n|`` over ``n <= 2 n_max``; holds when
    the sup over the last dyadic block exceeds the previous block's by at most
    ``STABILITY_RATIO``.

    ``sections`` (e.g. ``(256, 2048)``) adds an advisory norm-growth record.
    """
    report = DiagnosticReport("widom_boundedness")
    if isinstance(source, Measure):
        M = source
        if M.on_circle:
            raise ValueError("widom_boundedness needs an interval measure")
        if M.support.a < -1 or M.support.b > 1:
            raise ValueError(f"support {M.support} is not inside [-1, 1]")
        eps = [2.0 ** -k for k in range(1, 21)]
        ratios = {}
        for which, name in ((1, "plus"), (-1, "minus")):
            ratios[name] = [mass_near_endpoint(M, which, e) / e for e in eps]
        sup_ratio = max(max(r) for r in ratios.values())
        ok = all(_growth_ok(r) for r in ratios.values())
        report.verdicts["endpoint_mass"] = Verdict(
            ok and math.isfinite(sup_ratio),
            {"sup_ratio": sup_ratio,
             "last_ratio_plus": ratios["plus"][-1], "last_ratio_minus": ratios["minus"][-1],
             "eps": eps, "ratio_plus": ratios["plus"], "ratio_minus": ratios["minus"]},
        )
        c = from_measure(M, n_max)
    else:
        c = source
        if c.kind is not Kind.HANKEL:
            raise ValueError("widom_boundedness needs Hankel coefficients")
    h = np.asarray(c.values)
    n = np.arange(h.size)
    scaled = (n + 1) * np.abs(h)
    # complete blocks [g, 2g) only; a ragged tail block would hide growth
    blocks = [(g, 2 * g) for g in dyadic_grid(h.size // 2)]
    block_sup = [float(scaled[lo:hi].max()) for lo, hi in blocks]
    report.verdicts["coefficient_decay"] = Verdict(
        len(block_sup) >= 2 and _growth_ok(block_sup),
        {"sup_scaled": float(scaled.max()), "n_range": int(h.size - 1),
         "block_starts": [b[0] for b in blocks], "block_sup": block_sup},
    )
    if sections:
        sections = sorted(int(s) for s in sections)
        growth = norm_growth(c, sections, tol=tol, seed=seed)
        lam = [g[1] for g in growth]
        ratio = lam[-1] / lam[0] if lam[0] > 0 else math.inf
        report.verdicts["norm_growth"] = Verdict(
            ratio < 1.5,
            {"ratio": ratio, "sections": sections, "lambda_max": lam},
            required=False,
        )
    return report


# ----------------------------------------------------------------------------
# closed forms on geometric vectors


@dataclass(frozen=True)
class Geometric:
    """The infinite vector ``f_n = rho**n``."""

    rho: complex

    def __post_init__(self):
        if not abs(self.rho) < 1:
            raise ValueError("geometric vectors need |rho| < 1")

    def norm2(self) -> float:
        return 1.0 / (1.0 - abs(self.rho) ** 2)

    def __call__(self, z):
        return 1.0 / (1.0 - self.rho * np.asarray(z))


def _circle_geometric(M: Measure, rho: complex) -> float:
    r = abs(rho)
    K = M.density.degree
    val = 0.0
    if not M.density.is_zero():
        # Fourier coefficients of 1/|1 - rho z|^2 decay like r^|k|; make the
        # trapezoidal aliasing error negligible
        if r == 0:
            q = 2 * K + 2
        else:
            q = K + 2 + int(math.ceil((40.0 + math.log(1.0 / (1.0 - r * r))) / -math.log(r)))
        q = max(q, 64)
        total = 0.0
        chunk = 1 << 20
        for start in range(0, q, chunk):
            theta = 2 * np.pi * np.arange(start, min(q, start + chunk)) / q
            total += float(np.sum(M.density(theta) / np.abs(1.0 - rho * np.exp(1j * theta)) ** 2))
        val = total / q
    for atom in M.atoms:
        val += atom.mass / abs(1.0 - rho * complex(np.exp(1j * atom.location))) ** 2
    return val


def _interval_geometric(M: Measure, rho: complex) -> float:
    s, d = M.support, M.density
    r = abs(rho)
    reach = max(abs(s.a), abs(s.b))
    # sum rho^n x^n only converges for |rho x| < 1
    if r > 0 and any(a.mass > 0 and abs(a.location) * r >= 1 for a in M.atoms):
        return math.inf
    if r > 0 and not d.is_zero() and reach * r >= 1:
        return math.inf
    val = 0.0
    if not d.is_zero():
        val = _density_integral(M, s.a, s.b, func=lambda x: np.abs(1.0 / (1.0 - rho * x)) ** 2,
                                rtol=1e-14, q_max=2048)
    for atom in M.atoms:
        val += atom.mass / abs(1.0 - rho * atom.location) ** 2
    return val


def closure_domain_value(M: Measure, f) -> float:
    """Value of the closed form ``int |sum f_n z^n|^2 dM`` (``inf`` outside its domain).

    ``f`` is a finite vector or a :class:`Geometric`.
    """
    if not isinstance(f, Geometric):
        return form_via_measure(M, f)
    rho = complex(f.rho)
    if M.on_circle:
        return _circle_geometric(M, rho)
    return _interval_geometric(M, rho)
