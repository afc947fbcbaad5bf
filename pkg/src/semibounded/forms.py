"""Toeplitz and Hankel coefficient sequences, finite sections and quadratic forms.

Finite vectors are plain 1-D numpy arrays ``f = (f_0, ..., f_{L-1})``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from .measure import Measure, circle_moments, gauss_jacobi, line_moments

__all__ = [
    "Kind",
    "CoefficientSequence",
    "CoefficientRangeError",
    "CoefficientFileError",
    "from_measure",
    "form_direct",
    "analytic_eval",
    "form_via_measure",
    "finite_section",
    "SectionOperator",
    "fast_matvec",
    "write_coefficients_csv",
    "read_coefficients_csv",
]

SCHEMA_VERSION = 1


class Kind(str, Enum):
    TOEPLITZ = "toeplitz"
    HANKEL = "hankel"


class CoefficientRangeError(IndexError):
    """A section or vector needs coefficients beyond the stored range."""


class CoefficientFileError(ValueError):
    """Malformed coefficient CSV. ``line`` is 1-based, 0 if not line-specific."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class CoefficientSequence:
    """Matrix elements of a Toeplitz or Hankel operator.

    Toeplitz: ``values[n] = t_n`` for ``0 <= n <= n_max``; ``t_{-n} = conj(t_n)``.
    Hankel: ``values[n] = h_n`` for ``0 <= n <= 2 n_max`` (real).
    Either way sections up to ``n_max + 1`` rows are available.
    """

    kind: Kind
    values: np.ndarray

    def __post_init__(self):
        kind = Kind(self.kind)
        v = np.atleast_1d(np.asarray(self.values))
        if v.ndim != 1 or v.size == 0:
            raise ValueError("coefficients must be a non-empty 1-D array")
        if kind is Kind.TOEPLITZ:
            v = v.astype(complex)
            if abs(v[0].imag) > 1e-14 * max(1.0, abs(v[0])):
                raise ValueError("t_0 must be real for a Hermitian sequence")
            v[0] = v[0].real
            if not np.any(v.imag):
                v = v.real.copy()
        else:
            if np.iscomplexobj(v):
                if np.any(v.imag):
                    raise ValueError("Hankel coefficients must be real")
                v = v.real
            v = v.astype(float)
            if v.size % 2 == 0:
                raise ValueError("Hankel sequences store h_0..h_{2 n_max} (odd length)")
        v.setflags(write=False)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "values", v)

    @classmethod
    def toeplitz(cls, values) -> "CoefficientSequence":
        return cls(Kind.TOEPLITZ, values)

    @classmethod
    def hankel(cls, values) -> "CoefficientSequence":
        values = np.asarray(values, dtype=float)
        if values.size % 2 == 0:
            values = values[:-1]
        return cls(Kind.HANKEL, values)

    @property
    def n_max(self) -> int:
        return self.values.size - 1 if self.kind is Kind.TOEPLITZ else (self.values.size - 1) // 2

    @property
    def max_section(self) -> int:
        return self.n_max + 1

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def __getitem__(self, n):
        """Coefficient by (possibly negative, for Toeplitz) index; arrays allowed."""
        n = np.asarray(n)
        if self.kind is Kind.HANKEL:
            if np.any(n < 0) or np.any(n >= self.values.size):
                raise CoefficientRangeError(f"Hankel index out of range 0..{self.values.size - 1}")
            return self.values[n]
        if np.any(np.abs(n) > self.n_max):
            raise CoefficientRangeError(f"Toeplitz index out of range |n| <= {self.n_max}")
        v = self.values[np.abs(n)]
        return np.where(n >= 0, v, np.conj(v)) if self.is_complex else v

    def indices(self) -> np.ndarray:
        if self.kind is Kind.TOEPLITZ:
            return np.arange(-self.n_max, self.n_max + 1)
        return np.arange(self.values.size)

    def check_section(self, N: int):
        if N < 1:
            raise ValueError("section size must be positive")
        if N > self.max_section:
            raise CoefficientRangeError(
                f"section of size {N} needs n_max >= {N - 1}, have {self.n_max}"
            )


def from_measure(M: Measure, n_max: int) -> CoefficientSequence:
    """Moments of ``M``: Toeplitz elements on the circle, Hankel elements on an interval."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if M.on_circle:
        return CoefficientSequence.toeplitz(circle_moments(M, n_max))
    return CoefficientSequence.hankel(line_moments(M, 2 * n_max))


def _as_vector(f) -> np.ndarray:
    f = np.atleast_1d(np.asarray(f))
    if f.ndim != 1:
        raise ValueError("finite vectors are one-dimensional")
    return f


def form_direct(c: CoefficientSequence, f) -> float:
    """``sum_{n,m} c_{n-m} f_m conj(f_n)`` (Toeplitz) or ``c_{n+m}`` (Hankel).

    Summed by diagonals: the inner sums over fixed ``n - m`` (resp. ``n + m``)
    are correlations of ``f`` with itself.
    """
    f = _as_vector(f)
    L = f.size
    c.check_section(L)
    if c.kind is Kind.TOEPLITZ:
        # r[k + L - 1] = sum_m f_m conj(f_{m+k}), k = n - m
        r = np.convolve(f, np.conj(f)[::-1])[::-1]
        t = c[np.arange(-(L - 1), L)]
        val = np.sum(t * r)
    else:
        # conv[s] = sum_{n+m=s} f_m conj(f_n)
        conv = np.convolve(f, np.conj(f))
        val = np.sum(c.values[: 2 * L - 1] * conv)
    return float(np.real(val))


def analytic_eval(f, points):
    """Horner evaluation of ``sum_n f_n z**n`` at each point."""
    f = _as_vector(f)
    z = np.asarray(points)
    acc = np.zeros(z.shape, dtype=np.result_type(f, z, float))
    for coef in f[::-1]:
        acc = acc * z + coef
    return acc


def form_via_measure(M: Measure, f) -> float:
    """``int |sum_n f_n z**n|**2 dM(z)`` by exact quadrature plus atom sum.

    Circle: trapezoidal rule on ``K + 2L + 2`` equispaced angles, exact for the
    trigonometric-polynomial integrand. Interval: Gauss-Jacobi with
    ``deg p + 2L + 2`` nodes.
    """
    f = _as_vector(f)
    L = f.size
    d = M.density
    if M.on_circle:
        q = d.degree + 2 * L + 2
        theta = 2 * np.pi * np.arange(q) / q
        val = 0.0
        if not d.is_zero():
            val = float(np.mean(np.abs(analytic_eval(f, np.exp(1j * theta))) ** 2 * d(theta)))
        for atom in M.atoms:
            val += atom.mass * abs(complex(analytic_eval(f, np.exp(1j * atom.location)))) ** 2
        return val
    s = M.support
    val = 0.0
    if not d.is_zero():
        x, w = gauss_jacobi(d.degree + 2 * L + 2, s.a, s.b, d.alpha, d.beta)
        val = float(w @ (np.abs(analytic_eval(f, x)) ** 2 * d.p(x)))
    for atom in M.atoms:
        val += atom.mass * abs(complex(analytic_eval(f, atom.location))) ** 2
    return val


def finite_section(c: CoefficientSequence, N: int) -> np.ndarray:
    """Dense ``N x N`` leading block: ``t_{n-m}`` or ``h_{n+m}``."""
    c.check_section(N)
    if c.kind is Kind.TOEPLITZ:
        col = c.values[:N]
        return scipy.linalg.toeplitz(col, np.conj(col))
    return scipy.linalg.hankel(c.values[:N], c.values[N - 1 : 2 * N - 1])


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


class SectionOperator:
    """Matrix-free ``N x N`` section with an ``O(N log N)`` product.

    The Toeplitz matrix is embedded in a circulant of size the next power of
    two ``>= 2N - 1``; a Hankel section is a Toeplitz one applied to the
    reversed vector.
    """

    def __init__(self, c: CoefficientSequence, N: int):
        c.check_section(N)
        self.coefficients = c
        self.N = N
        self.size = _next_pow2(2 * N - 1)
        self.dtype = np.complex128 if c.is_complex else np.float64
        P = self.size
        col = np.zeros(P, dtype=self.dtype)
        if c.kind is Kind.TOEPLITZ:
            t = c.values[:N]
            col[:N] = t
            col[P - N + 1 :] = np.conj(t[1:][::-1])
        else:
            h = c.values[: 2 * N - 1]
            # generator u_j = h_{j + N - 1}, j = -(N-1)..(N-1)
            col[:N] = h[N - 1 :]
            col[P - N + 1 :] = h[: N - 1]
        self._real = not c.is_complex
        self._symbol = np.fft.rfft(col.real) if self._real else np.fft.fft(col)

    @property
    def shape(self):
        return (self.N, self.N)

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != (self.N,):
            raise ValueError(f"expected a vector of length {self.N}")
        if self.coefficients.kind is Kind.HANKEL:
            x = x[::-1]
        P = self.size
        if self._real and not np.iscomplexobj(x):
            return np.fft.irfft(self._symbol * np.fft.rfft(x, P), P)[: self.N]
        if self._real:
            re = np.fft.irfft(self._symbol * np.fft.rfft(x.real, P), P)[: self.N]
            im = np.fft.irfft(self._symbol * np.fft.rfft(x.imag, P), P)[: self.N]
            return re + 1j * im
        return np.fft.ifft(self._symbol * np.fft.fft(x, P))[: self.N]

    __call__ = matvec

    def todense(self) -> np.ndarray:
        return finite_section(self.coefficients, self.N)


def fast_matvec(c: CoefficientSequence, x) -> np.ndarray:
    """``finite_section(c, len(x)) @ x`` through the circulant embedding."""
    x = _as_vector(x)
    return SectionOperator(c, x.size).matvec(x)


# ----------------------------------------------------------------------------
# CSV


def write_coefficients_csv(c: CoefficientSequence, fh=None) -> str:
    """Write ``n,re,im`` (Toeplitz, ``-n_max..n_max``) or ``n,value`` (Hankel) rows.

    Floats use ``repr`` so a read-back is bit-exact. Returns the text when
    ``fh`` is None.
    """
    out = io.StringIO() if fh is None else fh
    out.write(f"# schema_version: {SCHEMA_VERSION}, kind: {c.kind.value}\n")
    w = csv.writer(out, lineterminator="\n")
    if c.kind is Kind.TOEPLITZ:
        w.writerow(["n", "re", "im"])
        for n in c.indices():
            v = complex(c[n])
            w.writerow([int(n), repr(v.real), repr(v.imag)])
    else:
        w.writerow(["n", "value"])
        for n, v in enumerate(c.values):
            w.writerow([n, repr(float(v))])
    if fh is None:
        return out.getvalue()
    return ""


def read_coefficients_csv(fh) -> CoefficientSequence:
    """Parse the CSV written by :func:`write_coefficients_csv`."""
    rows = []
    header = None
    for lineno, line in enumerate(fh, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        fields = next(csv.reader([s]))
        if header is None:
            header = [x.strip() for x in fields]
            if header not in (["n", "re", "im"], ["n", "value"]):
                raise CoefficientFileError(lineno, f"unexpected header {','.join(header)}")
            continue
        if len(fields) != len(header):
            raise CoefficientFileError(lineno, f"expected {len(header)} fields, got {len(fields)}")
        try:
            n = int(fields[0])
            vals = [float(x) for x in fields[1:]]
        except ValueError as exc:
            raise CoefficientFileError(lineno, str(exc)) from None
        rows.append((lineno, n, vals))
    if header is None:
        raise CoefficientFileError(0, "empty coefficient file")
    if not rows:
        raise CoefficientFileError(0, "no coefficient rows")
    table = {}
    for lineno, n, vals in rows:
        if n in table:
            raise CoefficientFileError(lineno, f"duplicate index {n}")
        table[n] = (lineno, vals)
    if header == ["n", "value"]:
        n_top = max(table)
        if sorted(table) != list(range(n_top + 1)):
            raise CoefficientFileError(0, "Hankel rows must cover n = 0..2 n_max without gaps")
        if n_top % 2:
            raise CoefficientFileError(table[n_top][0], "Hankel rows must end at an even index 2 n_max")
        return CoefficientSequence.hankel([table[n][1][0] for n in range(n_top + 1)])
    n_max = max(table)
    if sorted(table) != list(range(-n_max, n_max + 1)):
        raise CoefficientFileError(0, "Toeplitz rows must cover n = -n_max..n_max without gaps")
    vals = {n: complex(*v) for n, (_, v) in table.items()}
    for n in range(1, n_max + 1):
        if abs(vals[-n] - np.conj(vals[n])) > 1e-12 * max(1.0, abs(vals[n])):
            raise CoefficientFileError(table[-n][0], f"t_{-n} is not conj(t_{n})")
    if abs(vals[0].imag) > 1e-12 * max(1.0, abs(vals[0])):
        raise CoefficientFileError(table[0][0], "t_0 must be real")
    return CoefficientSequence.toeplitz([vals[n] for n in range(n_max + 1)])
