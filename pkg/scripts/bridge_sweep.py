"""Residual of the Laguerre bridge across basis vectors and quadrature orders.

    python3 scripts/bridge_sweep.py --max-degree 63 --orders 32,64,128
"""

import argparse
from dataclasses import dataclass, field

import numpy as np

from semibounded.laguerre import bridge_residual, default_lambda_grid


@dataclass
class Config:
    max_degree: int = 63
    orders: list = field(default_factory=lambda: [32, 64, 128])
    step: int = 8


def run(cfg: Config) -> None:
    grid = default_lambda_grid()
    degrees = list(range(0, cfg.max_degree + 1, cfg.step))
    print(f"{'degree':>8}" + "".join(f"{'order ' + str(q):>14}" for q in cfg.orders))
    for n in degrees:
        e_n = np.eye(n + 1)[n]
        print(f"{n:>8}" + "".join(f"{bridge_residual(e_n, grid, order=q):>14.2e}" for q in cfg.orders))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-degree", type=int, default=63)
    parser.add_argument("--orders", default="32,64,128")
    parser.add_argument("--step", type=int, default=8)
    args = parser.parse_args()
    run(Config(max_degree=min(args.max_degree, 63), orders=[int(q) for q in args.orders.split(",")],
               step=args.step))


if __name__ == "__main__":
    main()
