"""Growth of lambda_max over Hankel sections for bounded and unbounded measures.

Prints one row per measure: the Widom verdicts and lambda_max at each section
size. Bounded cases level off below pi; an endpoint atom grows linearly.

    python3 scripts/widom_sections.py --sizes 64,256,1024,2048
"""

import argparse
from dataclasses import dataclass, field

from semibounded.diagnostics import widom_boundedness
from semibounded.forms import from_measure
from semibounded.measure import Atom, Measure
from semibounded.spectra import norm_growth


@dataclass
class Config:
    sizes: list = field(default_factory=lambda: [64, 256, 1024, 2048])
    seed: int = 42


def measures() -> dict:
    return {
        "hilbert [0,1]": Measure.interval(0.0, 1.0, poly=(1.0,)),
        "(1-x)^(-1/2) on [0,1]": Measure.interval(0.0, 1.0, alpha=-0.5),
        "atom at 1": Measure.interval(-1.0, 1.0, poly=(0.0,), atoms=(Atom(1.0, 1.0),)),
        "lebesgue [-1,1]": Measure.interval(-1.0, 1.0, poly=(1.0,)),
        "chebyshev": Measure.interval(-1.0, 1.0, alpha=-0.5, beta=-0.5),
    }


def run(cfg: Config) -> None:
    header = f"{'measure':<24}{'endpoint':>10}{'decay':>8}" + "".join(f"{'N=' + str(n):>12}" for n in cfg.sizes)
    print(header)
    for name, M in measures().items():
        rep = widom_boundedness(M)
        growth = norm_growth(from_measure(M, max(cfg.sizes)), cfg.sizes, seed=cfg.seed)
        row = f"{name:<24}{str(rep['endpoint_mass'].holds):>10}{str(rep['coefficient_decay'].holds):>8}"
        print(row + "".join(f"{lam:>12.6f}" for _, lam in growth))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="64,256,1024,2048")
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()
    run(Config(sizes=sorted(int(s) for s in args.sizes.split(",")), seed=args.seed))


if __name__ == "__main__":
    main()
