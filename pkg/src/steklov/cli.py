"""Command-line front end: ``steklov <subcommand> [flags]``.

Tables go to stdout (or ``--output``) as CSV or JSON.  Every CSV starts with a
``#`` metadata line (tool version, domain, N, mu, ...) followed by the column
header; floats are written with 17 significant digits so they read back
bit-for-bit.  Exit status: 0 success, 2 invalid input, 3 numerical failure.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analysis import (
    commutator_probe,
    corner_nonuniformity,
    disk_dirichlet_poles,
    friedlander_and_counting,
    gap_report,
    mu_sweep,
    weyl_deviation_2d,
)
from .bem import steklov_spectrum
from .errors import NumericalError, PoleError
from .geometry import make_curve
from .identities import hormander_constant, make_normal_field, verify_identity
from .oracles import circle_laplace_spectrum, disk_dirichlet_neumann_eigs, disk_dtn_eigs, disk_dtn_n_max
from .spectrum import Spectrum

POLE_TOL = 1e-4

SCHEMAS = {
    "spectrum": ("k", "sigma"),
    "sweep-mu": ("mu", "k", "sigma", "sqrt_lambda_minus_mu"),
    "verify-identity": ("mode", "mu", "N", "n_d", "n_s", "lhs", "rhs", "residual", "relative_residual",
                        "energy", "shell_bound"),
    "gap": ("k", "sigma", "sqrt_shifted_lambda", "gap", "C_F", "pass"),
    "weyl": ("k", "sigma", "weyl_term", "deviation"),
    "commutator": ("N", "comm_norm_normalized", "d2_vs_lap_normalized"),
    "corners": ("gamma", "mu1", "ratio", "gap_bound"),
    "friedlander": ("k", "neumann_k_plus_1", "dirichlet_k", "holds"),
}


def csv_schema(subcommand):
    """Column names of the table written by ``subcommand``."""
    try:
        return SCHEMAS[subcommand]
    except KeyError:
        raise ValueError(f"unknown subcommand {subcommand!r}") from None


@dataclass
class RunConfig:
    command: str
    domain: str = "kind=disk,R=1"
    n: int = 256
    mu: float = 0.0
    mu_min: float = -20.0
    mu_max: float = 0.0
    steps: int = 200
    kmax: int = None
    delta: float = 0.2
    C: float = None
    gammas: list = field(default_factory=lambda: [-10.0, -100.0])
    side: float = 1.0
    n_list: list = field(default_factory=lambda: [256, 512])
    mode: str = "hormander"
    mode_data: str = "fourier:1"
    n_d: int = 64
    n_s: int = None
    method: str = "bem"
    spectrum_csv: str = None
    output: str = "-"
    fmt: str = "csv"


# --- output ------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def _jsonable(v):
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def render(command, meta, rows, fmt):
    columns = csv_schema(command)
    head = {"tool": f"steklov {__version__}", "command": command, **meta}
    if fmt == "json":
        doc = {"meta": {k: _jsonable(v) for k, v in head.items()}, "columns": list(columns),
               "rows": [[_jsonable(x) for x in r] for r in rows]}
        return json.dumps(doc, indent=1) + "\n"
    lines = ["# " + "; ".join(f"{k}={_fmt(v)}" for k, v in head.items()), ",".join(columns)]
    lines += [",".join(_fmt(x) for x in r) for r in rows]
    return "\n".join(lines) + "\n"


def read_table(path):
    """(meta, columns, rows as strings) from a CSV written by this tool."""
    meta = {}
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError(f"{path}: missing metadata header line")
    for item in lines[0][1:].split(";"):
        if "=" in item:
            k, v = item.split("=", 1)
            meta[k.strip()] = v.strip()
    columns = lines[1].split(",")
    rows = [ln.split(",") for ln in lines[2:]]
    return meta, columns, rows


def read_spectrum_csv(path):
    meta, columns, rows = read_table(path)
    if columns[:2] != ["k", "sigma"]:
        raise ValueError(f"{path}: expected columns k,sigma")
    ks = [int(r[0]) for r in rows]
    if ks != list(range(1, len(ks) + 1)):
        raise ValueError(f"{path}: rows must be k = 1, 2, ... in order")
    return Spectrum(np.array([float(r[1]) for r in rows]), "steklov", meta)


# --- subcommands -------------------------------------------------------------------

def _kmax(cfg):
    return cfg.n // 4 if cfg.kmax is None else cfg.kmax


def _spectrum(cfg, curve):
    k_max = _kmax(cfg)
    if cfg.method == "oracle":
        R = curve.p["R"]
        return disk_dtn_eigs(R, cfg.mu, disk_dtn_n_max(k_max, cfg.mu, R)).head(k_max)
    return steklov_spectrum(curve, cfg.n, cfg.mu, k_max)


def _constant(cfg, curve):
    if cfg.C is not None:
        return cfg.C
    return hormander_constant(make_normal_field(curve, cfg.delta)).C


def _boundary_data(text, length):
    kind, _, j = text.partition(":")
    try:
        j = int(j)
    except ValueError:
        raise ValueError(f"mode data {text!r}: expected fourier:<j> or sine:<j>") from None
    if kind == "fourier":
        return lambda s: np.cos(2 * np.pi * j * s / length)
    if kind == "sine":
        return lambda s: np.sin(2 * np.pi * j * s / length)
    raise ValueError(f"mode data {text!r}: expected fourier:<j> or sine:<j>")


def cmd_spectrum(cfg, curve):
    spec = _spectrum(cfg, curve)
    rows = [(k, v) for k, v in enumerate(spec.values, 1)]
    return {"N": cfg.n, "mu": cfg.mu, "method": cfg.method}, rows


def cmd_sweep(cfg, curve):
    grid = np.linspace(cfg.mu_min, cfg.mu_max, cfg.steps)
    table = mu_sweep(curve, grid, _kmax(cfg), N=cfg.n)
    meta = {"N": cfg.n if curve.kind != "disk" else "oracle", "mu_min": cfg.mu_min, "mu_max": cfg.mu_max,
            "poles": " ".join("%.17g" % p for p in table.poles)}
    return meta, table.rows()


def cmd_identity(cfg, curve):
    field_ = make_normal_field(curve, cfg.delta)
    u = _boundary_data(cfg.mode_data, curve.length)
    rep = verify_identity(curve, field_, u, cfg.mu, cfg.mode, cfg.n, cfg.n_d, cfg.n_s)
    row = (rep.mode, rep.mu, rep.N, rep.n_d, rep.n_s, rep.lhs, rep.rhs, rep.residual, rep.relative_residual,
           rep.energy, rep.shell_bound)
    return {"N": cfg.n, "mu": cfg.mu, "delta": cfg.delta, "data": cfg.mode_data}, [row]


def cmd_gap(cfg, curve):
    if cfg.spectrum_csv:
        sigma = read_spectrum_csv(cfg.spectrum_csv)
    else:
        sigma = _spectrum(cfg, curve)
    C = _constant(cfg, curve)
    lam = circle_laplace_spectrum(curve.length, len(sigma))
    rep = gap_report(sigma, lam, cfg.mu, C)
    rows = [(k, s, r, g, C, g <= C) for k, (s, r, g) in
            enumerate(zip(rep.sigma, rep.sqrt_shifted_lambda, rep.gap), 1)]
    return {"N": cfg.n, "mu": cfg.mu, "delta": cfg.delta, "max_gap": rep.max_gap, "pass": rep.passed}, rows


def cmd_weyl(cfg, curve):
    spec = _spectrum(cfg, curve)
    dev = weyl_deviation_2d(spec, curve.length)
    rows = [(k, s, np.pi * k / curve.length, d) for k, s, d in zip(dev.k, spec.values, dev.deviation)]
    return {"N": cfg.n, "mu": cfg.mu, "sup_deviation": dev.sup}, rows


def cmd_commutator(cfg, curve):
    rows = []
    for n in cfg.n_list:
        p = commutator_probe(curve, n)
        rows.append((n, p.comm_normalized, p.d2_normalized))
    return {"mu": 0.0}, rows


def cmd_corners(cfg, curve):
    rep = corner_nonuniformity(cfg.side, cfg.gammas)
    rows = list(zip(rep.gamma, rep.mu1, rep.ratio, rep.gap_bound))
    return {"domain": f"kind=square,a={cfg.side:g}", "side": cfg.side}, rows


def cmd_friedlander(cfg, curve):
    R = curve.p["R"]
    k_max = 50 if cfg.kmax is None else cfg.kmax
    rep = friedlander_and_counting(R, cfg.mu, k_max)
    dv = disk_dirichlet_neumann_eigs(R, k_max, "D").values
    nv = disk_dirichlet_neumann_eigs(R, k_max + 1, "N").values
    rows = [(k, nv[k], dv[k - 1], bool(rep.inequality[k - 1])) for k in range(1, k_max + 1)]
    meta = {"mu": cfg.mu, "count_neumann": rep.n_neumann, "count_dirichlet": rep.n_dirichlet,
            "negative_dtn": rep.n_negative_dtn, "counting_holds": rep.counting_holds}
    return meta, rows


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep-mu": cmd_sweep,
    "verify-identity": cmd_identity,
    "gap": cmd_gap,
    "weyl": cmd_weyl,
    "commutator": cmd_commutator,
    "corners": cmd_corners,
    "friedlander": cmd_friedlander,
}


def _check_pole(curve, mu, tol=POLE_TOL):
    if curve.kind != "disk" or mu <= 0:
        return
    poles = disk_dirichlet_poles(curve.p["R"], mu - 1.0, mu + 1.0)
    close = poles[np.abs(poles - mu) < tol]
    if close.size:
        raise PoleError(f"mu={mu:.12g} lies within {tol:g} of a Dirichlet eigenvalue of the disk",
                        dirichlet_eigenvalue=float(close[0]))


def validate(cfg):
    """Check a configuration before any computation; returns the curve."""
    if cfg.command not in COMMANDS:
        raise ValueError(f"unknown subcommand {cfg.command!r}")
    if cfg.fmt not in ("csv", "json"):
        raise ValueError("format must be csv or json")
    curve = make_curve(cfg.domain)
    for n in [cfg.n] + (list(cfg.n_list) if cfg.command == "commutator" else []):
        if n < 16 or n % 2:
            raise ValueError(f"N={n}: must be even and at least 16")
    if cfg.kmax is not None and cfg.kmax < 1:
        raise ValueError("kmax must be positive")
    if cfg.method not in ("bem", "oracle"):
        raise ValueError("method must be bem or oracle")
    if cfg.method == "oracle" and curve.kind != "disk":
        raise ValueError("the oracle method covers disks only")
    uses_bem = cfg.command in ("spectrum", "gap", "weyl") and cfg.method == "bem" and not cfg.spectrum_csv
    if uses_bem and cfg.kmax is not None and cfg.kmax > cfg.n // 4:
        raise ValueError(f"kmax={cfg.kmax} exceeds N/4={cfg.n // 4}")
    if uses_bem and cfg.mu > 0:
        raise ValueError("the BEM path needs mu <= 0 (use --method oracle on a disk)")
    if cfg.command in ("gap", "verify-identity") and cfg.mu > 0:
        raise ValueError("this command needs mu <= 0")
    if cfg.command == "sweep-mu":
        if cfg.steps < 2 or cfg.mu_min >= cfg.mu_max:
            raise ValueError("sweep needs steps >= 2 and mu-min < mu-max")
        if curve.kind != "disk" and cfg.mu_max > 0:
            raise ValueError("BEM sweeps need mu-max <= 0")
        if curve.kind != "disk" and _kmax(cfg) > cfg.n // 4:
            raise ValueError(f"kmax exceeds N/4={cfg.n // 4}")
    if cfg.command == "verify-identity":
        if cfg.mode not in ("hormander", "pohozhaev"):
            raise ValueError("mode must be hormander or pohozhaev")
        _boundary_data(cfg.mode_data, 1.0)
    if cfg.method == "oracle" or cfg.command in ("friedlander",):
        _check_pole(curve, cfg.mu)
    if cfg.command == "friedlander" and curve.kind != "disk":
        raise ValueError("friedlander needs a disk domain")
    if cfg.command == "corners" and (cfg.side <= 0 or any(g >= 0 for g in cfg.gammas)):
        raise ValueError("corners needs side > 0 and negative gammas")
    if cfg.command == "verify-identity" or (cfg.command == "gap" and cfg.C is None):
        if cfg.delta <= 0 or cfg.delta * curve.max_abs_curvature >= 1:
            raise ValueError(f"delta={cfg.delta} must lie in (0, 1/max|curvature|)")
    return curve


def run(cfg, stdout=None):
    """Execute a configuration; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    try:
        curve = validate(cfg)
        meta, rows = COMMANDS[cfg.command](cfg, curve)
    except PoleError as exc:
        print(f"steklov: pole: {exc} (Dirichlet eigenvalue {exc.dirichlet_eigenvalue})", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"steklov: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"steklov: {exc}", file=sys.stderr)
        return 2
    text = render(cfg.command, {"domain": curve.to_spec(), **meta}, rows, cfg.fmt)
    if cfg.output == "-":
        try:
            stdout.write(text)
            stdout.flush()
        except BrokenPipeError:
            pass
    else:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="steklov", description="Steklov / DtN spectra of planar domains.")
    p.add_argument("--version", action="version", version=f"steklov {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_default=256):
        sp.add_argument("--domain", default="kind=disk,R=1",
                        help="curve spec, e.g. kind=ellipse,a=2,b=1 (default: unit disk)")
        sp.add_argument("--n", type=int, default=n_default, help=f"boundary nodes (default {n_default})")
        sp.add_argument("--output", default="-", help="output file (default stdout)")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("spectrum", help="lowest D_mu eigenvalues")
    common(sp)
    sp.add_argument("--mu", type=float, default=0.0)
    sp.add_argument("--kmax", type=int, default=None, help="eigenvalue count (default N/4)")
    sp.add_argument("--method", choices=("bem", "oracle"), default="bem", help="oracle: disks, any mu")

    sp = sub.add_parser("sweep-mu", help="eigenvalue curves over a mu grid")
    common(sp, 128)
    sp.add_argument("--mu-min", type=float, default=-20.0)
    sp.add_argument("--mu-max", type=float, default=0.0)
    sp.add_argument("--steps", type=int, default=200)
    sp.add_argument("--kmax", type=int, default=9)

    sp = sub.add_parser("verify-identity", help="both sides of the Hormander or Pohozhaev identity")
    common(sp, 512)
    sp.add_argument("--mu", type=float, default=0.0)
    sp.add_argument("--mode", choices=("hormander", "pohozhaev"), default="hormander")
    sp.add_argument("--mode-data", default="fourier:1", help="fourier:<j> (cos) or sine:<j> in 2 pi j s / L")
    sp.add_argument("--delta", type=float, default=0.2, help="tubular field width (default 0.2)")
    sp.add_argument("--nd", dest="n_d", type=int, default=64, help="depth nodes (default 64)")
    sp.add_argument("--ns", dest="n_s", type=int, default=None, help="arclength nodes (default N)")

    sp = sub.add_parser("gap", help="|sigma_k - sqrt(lambda_k - mu)| against C_F")
    common(sp)
    sp.add_argument("--mu", type=float, default=0.0)
    sp.add_argument("--kmax", type=int, default=None)
    sp.add_argument("--method", choices=("bem", "oracle"), default="bem")
    sp.add_argument("--delta", type=float, default=0.2)
    sp.add_argument("--C", type=float, default=None, help="use this constant instead of computing C_F")
    sp.add_argument("--spectrum-csv", default=None, help="read sigma from a spectrum CSV")

    sp = sub.add_parser("weyl", help="deviation sigma_k - pi k / L")
    common(sp)
    sp.add_argument("--mu", type=float, default=0.0)
    sp.add_argument("--kmax", type=int, default=None)
    sp.add_argument("--method", choices=("bem", "oracle"), default="bem")

    sp = sub.add_parser("commutator", help="normalized ||[Lap, D]|| and ||D^2 - Lap||")
    common(sp)
    sp.add_argument("--n-list", type=int, nargs="+", default=[256, 512])

    sp = sub.add_parser("corners", help="Robin asymptotics of the square")
    common(sp)
    sp.add_argument("--side", type=float, default=1.0)
    sp.add_argument("--gammas", type=float, nargs="+", default=[-10.0, -100.0])

    sp = sub.add_parser("friedlander", help="Friedlander inequalities and counting on the disk")
    common(sp)
    sp.add_argument("--mu", type=float, default=10.0)
    sp.add_argument("--kmax", type=int, default=50)
    return p


def config_from_args(ns):
    known = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in known})


def main(argv=None):
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
