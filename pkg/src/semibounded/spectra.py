"""Extreme eigenvalues of finite sections.

Lanczos with full reorthogonalization on the FFT matrix-vector product.
The smallest eigenvalue comes from a second run on ``s I - A`` where ``s`` is
a Gershgorin bound on ``||A||``, so no factorization is ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .forms import CoefficientSequence, Kind, SectionOperator

__all__ = [
    "SpectralReport",
    "LanczosNotConverged",
    "PSDResult",
    "gershgorin_bound",
    "lanczos_largest",
    "extreme_eigs",
    "psd_check",
    "norm_growth",
]


@dataclass
class SpectralReport:
    N: int
    lambda_min: float
    lambda_max: float
    residual_norm: float
    iterations: int
    v_min: np.ndarray | None = field(default=None, repr=False)
    v_max: np.ndarray | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "residual": self.residual_norm,
            "iterations": self.iterations,
        }


class LanczosNotConverged(RuntimeError):
    """Raised when the iteration budget runs out; ``report`` holds the best estimate."""

    def __init__(self, message: str, report: SpectralReport):
        super().__init__(message)
        self.report = report


def gershgorin_bound(c: CoefficientSequence, N: int) -> float:
    """Largest absolute row sum of the ``N x N`` section."""
    c.check_section(N)
    if c.kind is Kind.TOEPLITZ:
        # row n holds t_{n-m}, m = 0..N-1: a window of |t_j| for j = n-N+1..n
        a = np.abs(c[np.arange(-(N - 1), N)])
    else:
        a = np.abs(c.values[: 2 * N - 1])
    s = np.concatenate(([0.0], np.cumsum(a)))
    rows = s[N:] - s[: a.size - N + 1]
    return float(rows.max())


@dataclass
class _Ritz:
    value: float
    vector: np.ndarray
    residual: float
    iterations: int
    converged: bool


def lanczos_largest(apply, n: int, dtype, *, tol: float, scale: float, rng: np.random.Generator,
                    max_iter: int | None = None, shift: float = 0.0) -> _Ritz:
    """Largest eigenpair of a Hermitian operator given by ``apply``.

    Stops once the Ritz residual ``beta_k |s_k|`` is below
    ``tol * (|shift - theta| + scale)``, i.e. relative to the eigenvalue of the
    unshifted matrix when ``apply`` is ``shift I - A``.
    """
    if max_iter is None:
        max_iter = 4 * n
    complex_ = np.issubdtype(dtype, np.complexfloating)
    q = rng.standard_normal(n)
    if complex_:
        q = q + 1j * rng.standard_normal(n)
    q = q / np.linalg.norm(q)
    kmax = min(n, max_iter)
    Q = np.zeros((kmax, n), dtype=dtype)
    alphas, betas = [], []
    beta = 0.0
    q_prev = np.zeros(n, dtype=dtype)
    theta, s = 0.0, np.ones(1)
    k = 0
    for k in range(1, kmax + 1):
        Q[k - 1] = q
        w = apply(q)
        alpha = float(np.real(np.vdot(q, w)))
        w = w - alpha * q - beta * q_prev
        # two passes of classical Gram-Schmidt against the whole basis
        for _ in range(2):
            w = w - Q[:k].T @ (Q[:k].conj() @ w)
        alphas.append(alpha)
        beta_next = float(np.linalg.norm(w))
        if k == 1:
            theta, s = alpha, np.ones(1)
        else:
            vals, vecs = eigh_tridiagonal(np.array(alphas), np.array(betas), select="i",
                                          select_range=(k - 1, k - 1))
            theta, s = float(vals[0]), vecs[:, 0]
        resid = beta_next * abs(s[-1])
        target = tol * (abs(shift - theta) + scale)
        exhausted = k == n or beta_next <= 1e-14 * max(scale, 1e-300)
        if resid <= target or exhausted:
            break
        betas.append(beta_next)
        q_prev, q = q, w / beta_next
        beta = beta_next
    vec = Q[:k].T @ s
    vec = vec / np.linalg.norm(vec)
    true_resid = float(np.linalg.norm(apply(vec) - theta * vec))
    converged = true_resid <= max(tol * (abs(shift - theta) + scale), 1e-13 * scale)
    return _Ritz(theta, vec, true_resid, k, converged)


def extreme_eigs(c: CoefficientSequence, N: int, tol: float = 1e-10, seed: int = 42,
                 max_iter: int | None = None) -> SpectralReport:
    """Smallest and largest eigenvalue of the ``N x N`` section.

    Raises :class:`LanczosNotConverged` (carrying the best estimates) when either
    run exhausts ``max_iter`` (default ``4N``) without meeting
    ``||A v - lambda v|| <= tol (|lambda| + ||A||_est)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    op = SectionOperator(c, N)
    norm_est = gershgorin_bound(c, N)
    rng = np.random.default_rng(seed)
    scale = max(norm_est, np.finfo(float).tiny)
    top = lanczos_largest(op.matvec, N, op.dtype, tol=tol, scale=scale, rng=rng, max_iter=max_iter)
    s = norm_est
    low = lanczos_largest(lambda x: s * x - op.matvec(x), N, op.dtype, tol=tol, scale=scale,
                          rng=rng, max_iter=max_iter, shift=s)
    lam_min = s - low.value
    lam_max = top.value
    # the two runs are independent; enforce the ordering a single spectrum has
    lam_min = min(lam_min, lam_max)
    report = SpectralReport(N, lam_min, lam_max, max(top.residual, low.residual),
                            top.iterations + low.iterations, v_min=low.vector, v_max=top.vector)
    if not (top.converged and low.converged):
        raise LanczosNotConverged(
            f"Lanczos did not reach tol={tol:g} for N={N} (residual {report.residual_norm:.3g})", report
        )
    return report


@dataclass
class PSDResult:
    positive: bool
    lambda_min: float
    witness: np.ndarray | None

    def __bool__(self):
        return self.positive


def psd_check(c: CoefficientSequence, N: int, tol: float = 1e-10, seed: int = 42) -> PSDResult:
    """Is the section positive semidefinite up to ``-tol``?

    On failure the eigenvector of the smallest eigenvalue is returned as a
    vector with a negative form value.
    """
    report = extreme_eigs(c, N, tol=tol, seed=seed)
    if report.lambda_min >= -tol:
        return PSDResult(True, report.lambda_min, None)
    return PSDResult(False, report.lambda_min, report.v_min)


def norm_growth(c: CoefficientSequence, N_list, tol: float = 1e-10, seed: int = 42) -> list:
    """``[(N, lambda_max(N)), ...]`` for ascending section sizes."""
    N_list = [int(N) for N in N_list]
    if N_list != sorted(N_list):
        raise ValueError("N_list must be ascending")
    out = []
    for N in N_list:
        op = SectionOperator(c, N)
        scale = max(gershgorin_bound(c, N), np.finfo(float).tiny)
        top = lanczos_largest(op.matvec, N, op.dtype, tol=tol, scale=scale,
                              rng=np.random.default_rng(seed))
        if not top.converged:
            report = SpectralReport(N, float("nan"), top.value, top.residual, top.iterations)
            raise LanczosNotConverged(f"Lanczos did not converge for N={N}", report)
        out.append((N, top.value))
    return out
