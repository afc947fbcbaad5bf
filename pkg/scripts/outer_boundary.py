"""Approach of |t_out(r e^{i theta})|^2 to the density as r -> 1.

    python3 scripts/outer_boundary.py --levels 4-12 --points 64
"""

import argparse
from dataclasses import dataclass

import numpy as np

from semibounded.measure import TrigDensity
from semibounded.outer import boundary_modulus_check, outer_eval


@dataclass
class Config:
    first_level: int = 4
    last_level: int = 12
    points: int = 64


DENSITIES = {
    "2 + cos": TrigDensity([2.0, 0.5]),
    "|1 + z/2|^2": TrigDensity([1.25, 0.5]),
    "degree-2 complex": TrigDensity([3.0, 0.5 + 0.7j, -0.3j]),
}


def run(cfg: Config) -> None:
    theta = np.linspace(0, 2 * np.pi, cfg.points, endpoint=False)
    for name, t in DENSITIES.items():
        print(f"{name}: t_out(0) = {complex(outer_eval(t, 0.0)):.12f}")
        for k in range(cfg.first_level, cfg.last_level + 1):
            r = 1 - 2.0**-k
            print(f"  r = 1 - 2^-{k:<3d} max deviation {boundary_modulus_check(t, theta, r):.3e}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--levels", default="4-12")
    parser.add_argument("--points", type=int, default=64)
    args = parser.parse_args()
    first, last = (int(v) for v in args.levels.split("-"))
    run(Config(first, last, args.points))


if __name__ == "__main__":
    main()
