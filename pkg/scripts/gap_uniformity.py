"""Gaps |sigma_{mu,k} - sqrt(lambda_k - mu)| against C_F for several mu.

    python3 scripts/gap_uniformity.py --domain kind=ellipse,a=1.5,b=1 --delta 0.2
"""

import argparse
from dataclasses import dataclass

from steklov.analysis import steklov_gap
from steklov.geometry import make_curve
from steklov.identities import hormander_constant, make_normal_field


@dataclass
class GapConfig:
    domain: str = "kind=ellipse,a=1.5,b=1"
    delta: float = 0.2
    N: int = 512
    k_max: int = 100
    mus: tuple = (0.0, -1.0, -10.0, -100.0, -1e4)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--domain", default=GapConfig.domain)
    ap.add_argument("--delta", type=float, default=GapConfig.delta)
    ap.add_argument("--n", type=int, default=GapConfig.N)
    args = ap.parse_args()
    cfg = GapConfig(args.domain, args.delta, args.n, args.n // 4 if args.n < 400 else GapConfig.k_max)
    curve = make_curve(cfg.domain)
    C = hormander_constant(make_normal_field(curve, cfg.delta)).C
    print(f"{curve.to_spec()}: C_F = {C:.6f} (delta {cfg.delta})")
    for mu in cfg.mus:
        rep = steklov_gap(curve, cfg.N, mu, cfg.k_max, C)
        k = int(rep.gap.argmax()) + 1
        print(f"mu={mu:>9g}  max gap {rep.max_gap:.6f} at k={k}  {'ok' if rep.passed else 'EXCEEDS C_F'}")


if __name__ == "__main__":
    main()
