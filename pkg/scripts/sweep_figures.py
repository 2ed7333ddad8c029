"""Eigenvalue curves of the DtN family over mu, written as plot-ready CSV.

Disk curves come from the Bessel oracle over [-20, 30] with poles bracketed;
the ellipse curves use the boundary-integral solver over mu <= 0.

    python3 scripts/sweep_figures.py --out data/
"""

import argparse
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from steklov.analysis import mu_sweep
from steklov.cli import render


@dataclass
class SweepConfig:
    domain: str
    mu_min: float
    mu_max: float
    steps: int
    k_max: int
    N: int = 128
    name: str = "sweep"


CONFIGS = [
    SweepConfig("kind=disk,R=1", -20.0, 30.0, 1001, 9, name="disk_full"),
    SweepConfig("kind=disk,R=1", -20.0, 0.0, 200, 9, name="disk_negative"),
    SweepConfig("kind=ellipse,a=2,b=1", -20.0, 0.0, 200, 9, N=128, name="ellipse_negative"),
]


def write_sweep(cfg, out_dir):
    table = mu_sweep(cfg.domain, np.linspace(cfg.mu_min, cfg.mu_max, cfg.steps), cfg.k_max, N=cfg.N)
    meta = {"domain": table.meta["domain"], "N": table.meta["N"], "mu": f"[{cfg.mu_min},{cfg.mu_max}]",
            "poles": " ".join(f"{p:.12g}" for p in table.poles)}
    path = out_dir / f"{cfg.name}.csv"
    path.write_text(render("sweep-mu", meta, table.rows(), "csv"), encoding="utf-8")
    return path, table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("sweep_data"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for cfg in CONFIGS:
        path, table = write_sweep(cfg, args.out)
        print(f"{path}: {table.mu.size} mu samples x {table.k_max} eigenvalues, poles {table.poles.round(4)}")


if __name__ == "__main__":
    main()
