"""Commutator [Lap_M, D] across resolutions and domains.

Prints the band-projected normalized and raw norms; the raw norm settles while
the normalized value decays with N because both operator norms grow.

    python3 scripts/commutator_scan.py
"""

import argparse
from dataclasses import dataclass, field

from steklov.analysis import commutator_probe


@dataclass
class ScanConfig:
    domains: list = field(default_factory=lambda: [
        "kind=disk,R=1",
        "kind=ellipse,a=1.5,b=1",
        "kind=ellipse,a=1.2,b=1",
        "kind=star,r0=1,eps=0.3,m=5",
    ])
    Ns: list = field(default_factory=lambda: [128, 256, 512])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=None)
    args = ap.parse_args()
    cfg = ScanConfig()
    if args.n:
        cfg.Ns = args.n
    print(f"{'domain':32s} {'N':>5s} {'normalized':>12s} {'raw':>14s} {'|D^2-Lap|':>12s}")
    for dom in cfg.domains:
        for N in cfg.Ns:
            p = commutator_probe(dom, N)
            print(f"{dom:32s} {N:5d} {p.comm_normalized:12.3e} {p.comm_norm:14.10f} {p.d2_normalized:12.3e}")


if __name__ == "__main__":
    main()
