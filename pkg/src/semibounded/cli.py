"""Command-line front end.

Exit codes: 0 success, 2 invalid input (message names the field or line),
3 numerical non-convergence (a partial report is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import diagnostics, forms, laguerre, outer, spectra
from .forms import CoefficientFileError, CoefficientSequence
from .measure import Measure, MeasureSpecError, load_measure

__all__ = ["RunConfig", "InputError", "parse_f_spec", "parse_grid", "run", "main", "build_parser"]

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INVALID, EXIT_NOT_CONVERGED = 0, 2, 3
COMMANDS = ("moments", "form-eval", "section-spectrum", "diagnose", "outer", "bridge-check")


class InputError(ValueError):
    """Bad command-line value; reported with exit code 2."""


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    output: str | None = None
    n_max: int = 64
    section_size: list[int] = field(default_factory=list)
    tol: float = 1e-10
    seed: int = 42
    grid: str | None = None
    f: list[str] = field(default_factory=list)
    radius: float = 0.99
    points: int = 64
    table: bool = False

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise InputError(f"--command: unknown command {self.command!r}")
        if not 1 <= self.n_max <= 1 << 16:
            raise InputError("--n-max: must lie in [1, 65536]")
        if any(not 1 <= n <= 1 << 16 for n in self.section_size):
            raise InputError("--section-size: sizes must lie in [1, 65536]")
        if not 0 < self.tol < 1:
            raise InputError("--tol: must lie in (0, 1)")
        if self.seed < 0:
            raise InputError("--seed: must be non-negative")
        if not 0.9 <= self.radius < 1:
            raise InputError("--radius: must lie in [0.9, 1)")
        if not 1 <= self.points <= 1 << 16:
            raise InputError("--points: must lie in [1, 65536]")
        needs_input = self.command != "bridge-check"
        if needs_input and not self.input:
            raise InputError("--input: required for " + self.command)
        if self.command in ("form-eval", "bridge-check") and not self.f:
            raise InputError("--f: required for " + self.command)
        if self.command == "section-spectrum" and not self.section_size:
            raise InputError("--section-size: required for section-spectrum")


# ----------------------------------------------------------------------------
# argument mini-languages


def parse_f_spec(spec: str, seed: int = 42) -> np.ndarray:
    """Finite vectors from short specs.

    ``e3`` unit vector (length 4), ``ones:8``, ``geom:0.5:16`` (``rho**n``),
    ``random:16`` (seeded standard normal) or a comma list ``1,0,-2``.
    """
    s = spec.strip()
    try:
        if s.startswith("e") and s[1:].isdigit():
            f = np.zeros(int(s[1:]) + 1)
            f[-1] = 1.0
            return f
        head, _, rest = s.partition(":")
        if head == "ones":
            return np.ones(_length(rest))
        if head == "geom":
            rho, n = rest.split(":")
            return float(rho) ** np.arange(_length(n))
        if head == "random":
            return np.random.default_rng(seed).standard_normal(_length(rest))
        values = [float(v) for v in s.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"--f {spec!r}: {exc}") from None
    if not values:
        raise InputError(f"--f {spec!r}: empty vector")
    return np.array(values)


def _length(text: str) -> int:
    n = int(text)
    if n < 1:
        raise ValueError("length must be positive")
    return n


def parse_grid(spec: str | None) -> np.ndarray:
    """``log:a:b:n``, ``lin:a:b:n`` or a comma list; None gives the default lambda grid."""
    if spec is None:
        return laguerre.default_lambda_grid()
    try:
        head, _, rest = spec.partition(":")
        if head in ("log", "lin"):
            a, b, n = rest.split(":")
            a, b, n = float(a), float(b), _length(n)
            if head == "log":
                if a <= 0 or b <= 0:
                    raise ValueError("log grid endpoints must be positive")
                return np.geomspace(a, b, n)
            return np.linspace(a, b, n)
        grid = np.array([float(v) for v in spec.split(",") if v.strip()])
    except ValueError as exc:
        raise InputError(f"--grid {spec!r}: {exc}") from None
    if grid.size == 0:
        raise InputError(f"--grid {spec!r}: empty grid")
    return grid


# ----------------------------------------------------------------------------
# input/output


def _load_input(path: str) -> Measure | CoefficientSequence:
    p = Path(path)
    try:
        if p.suffix.lower() == ".csv":
            with open(p, encoding="utf-8") as fh:
                return forms.read_coefficients_csv(fh)
        return load_measure(p)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except (MeasureSpecError, CoefficientFileError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _require_measure(obj, command: str) -> Measure:
    if not isinstance(obj, Measure):
        raise InputError(f"--input: {command} needs a measure JSON file")
    return obj


def _coefficients(obj, n_max: int) -> CoefficientSequence:
    return obj if isinstance(obj, CoefficientSequence) else forms.from_measure(obj, n_max)


def _dump_json(payload: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **payload}, indent=2) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


# ----------------------------------------------------------------------------
# commands; each returns (artifact text, exit code)


def _cmd_moments(cfg: RunConfig) -> tuple[str, int]:
    M = _require_measure(_load_input(cfg.input), "moments")
    return forms.write_coefficients_csv(forms.from_measure(M, cfg.n_max)), EXIT_OK


def _cmd_form_eval(cfg: RunConfig) -> tuple[str, int]:
    source = _load_input(cfg.input)
    rows = []
    for spec in cfg.f:
        f = parse_f_spec(spec, cfg.seed)
        row = {"f_spec": spec, "length": int(f.size)}
        if isinstance(source, Measure):
            row["form_via_measure"] = forms.form_via_measure(source, f)
            row["form_direct"] = forms.form_direct(forms.from_measure(source, f.size), f)
        else:
            try:
                row["form_direct"] = forms.form_direct(source, f)
            except forms.CoefficientRangeError as exc:
                raise InputError(f"--f {spec!r}: {exc}") from None
        rows.append(row)
    return _dump_json({"command": "form-eval", "evaluations": rows}), EXIT_OK


def _cmd_section_spectrum(cfg: RunConfig) -> tuple[str, int]:
    source = _load_input(cfg.input)
    sizes = sorted(cfg.section_size)
    c = _coefficients(source, max(sizes))
    reports, status = [], EXIT_OK
    for N in sizes:
        try:
            c.check_section(N)
        except forms.CoefficientRangeError as exc:
            raise InputError(f"--section-size {N}: {exc}") from None
        try:
            rep = spectra.extreme_eigs(c, N, tol=cfg.tol, seed=cfg.seed)
            reports.append({**rep.to_json(), "converged": True})
        except spectra.LanczosNotConverged as exc:
            reports.append({**exc.report.to_json(), "converged": False})
            status = EXIT_NOT_CONVERGED
            break
    payload = {"command": "section-spectrum", "tol": cfg.tol, "seed": cfg.seed, "reports": reports}
    return _dump_json(payload), status


def _cmd_diagnose(cfg: RunConfig) -> tuple[str, int]:
    M = _require_measure(_load_input(cfg.input), "diagnose")
    if M.on_circle:
        closable = diagnostics.toeplitz_closable(M)
        reports = {"toeplitz_closable": closable}
    else:
        closable = diagnostics.hankel_closable(M)
        reports = {"hankel_closable": closable}
        if M.support.a >= -1 and M.support.b <= 1:
            try:
                reports["widom_boundedness"] = diagnostics.widom_boundedness(
                    M, sections=cfg.section_size or None, tol=cfg.tol, seed=cfg.seed
                )
            except spectra.LanczosNotConverged as exc:
                payload = {"command": "diagnose", "overall": closable.overall,
                           "reports": {k: r.to_json() for k, r in reports.items()},
                           "partial": exc.report.to_json()}
                return _dump_json(payload), EXIT_NOT_CONVERGED
    if cfg.table:
        for rep in reports.values():
            sys.stderr.write(rep.table() + "\n")
    payload = {"command": "diagnose", "overall": closable.overall,
               "reports": {k: r.to_json() for k, r in reports.items()}}
    return _dump_json(payload), EXIT_OK


def _cmd_outer(cfg: RunConfig) -> tuple[str, int]:
    M = _require_measure(_load_input(cfg.input), "outer")
    theta = 2 * np.pi * np.arange(cfg.points) / cfg.points
    try:
        vals = outer.outer_eval(M, cfg.radius * np.exp(1j * theta))
    except ValueError as exc:
        raise InputError(f"{cfg.input}: {exc}") from None
    dens = M.density(theta)
    buf = io.StringIO()
    buf.write(f"# schema_version: {SCHEMA_VERSION}, radius: {cfg.radius!r}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta", "outer_modulus_sq", "density"])
    for th, v, d in zip(theta, vals, dens):
        w.writerow([repr(float(th)), repr(float(abs(v) ** 2)), repr(float(d))])
    return buf.getvalue(), EXIT_OK


def _cmd_bridge_check(cfg: RunConfig) -> tuple[str, int]:
    grid = parse_grid(cfg.grid)
    if np.any(grid <= 0) or np.any(grid > 50):
        raise InputError(f"--grid {cfg.grid!r}: lambda values must lie in (0, 50]")
    results = []
    for spec in cfg.f:
        f = parse_f_spec(spec, cfg.seed)
        try:
            rows = laguerre.bridge_table(f, grid)
        except ValueError as exc:
            raise InputError(f"--f {spec!r}: {exc}") from None
        results.append({
            "f_spec": spec,
            "lambda_grid": [float(x) for x in grid],
            "max_residual": max(r.deviation for r in rows),
            "per_lambda": [{"lambda": r.lam, "lhs": r.lhs.real, "rhs": r.rhs.real,
                            "deviation": r.deviation} for r in rows],
        })
    payload = results[0] if len(results) == 1 else {"checks": results}
    return _dump_json({"command": "bridge-check", **payload}), EXIT_OK


_DISPATCH = {
    "moments": _cmd_moments,
    "form-eval": _cmd_form_eval,
    "section-spectrum": _cmd_section_spectrum,
    "diagnose": _cmd_diagnose,
    "outer": _cmd_outer,
    "bridge-check": _cmd_bridge_check,
}


def run(config: RunConfig) -> int:
    """Execute one command, write its artifact, return the exit code."""
    try:
        config.validate()
        text, status = _DISPATCH[config.command](config)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    try:
        _emit(text, config.output)
    except OSError as exc:
        sys.stderr.write(f"error: --output {config.output}: {exc.strerror}\n")
        return EXIT_INVALID
    if status == EXIT_NOT_CONVERGED:
        sys.stderr.write("error: Lanczos did not converge; partial report written\n")
    return status


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semibounded", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="measure JSON or coefficient CSV (.csv)")
    common.add_argument("--output", help="artifact path (default: stdout)")
    common.add_argument("--n-max", type=int, default=64, dest="n_max")
    common.add_argument("--section-size", type=_int_list, default=[], dest="section_size",
                        help="comma-separated section sizes")
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--grid", help="log:a:b:n, lin:a:b:n or a comma list")
    common.add_argument("--f", action="append", default=[],
                        help="e3, ones:8, geom:0.5:16, random:16 or 1,0,-2 (repeatable)")
    common.add_argument("--radius", type=float, default=0.99)
    common.add_argument("--points", type=int, default=64)
    common.add_argument("--table", action="store_true", help="print a verdict table to stderr")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(RunConfig(**vars(args)))


if __name__ == "__main__":
    sys.exit(main())
