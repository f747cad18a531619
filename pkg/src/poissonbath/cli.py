"""Command-line front end: ``poissonbath <subcommand> --config cfg.json [--out dir]``.

Exit codes: 0 success, 2 unreadable config, 3 invalid config, 4 numerical failure.
Errors are written to stderr as one JSON object per line.
"""
import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .composite import CompositeSetup, convergence_study, reduced_trajectory
from .config import EXPERIMENTS, ConfigParseError, ConfigValidationError, parse_config
from .errors import NumericalError, PoissonBathError
from .lindblad import propagate, pure_state, steady_state
from .models import (
    collective_model,
    effective_decay_rate,
    effective_decay_rate_quadrature,
    full_gibbs_populations,
    gaussian_decay_rate,
    gibbs_state,
    sector_gibbs_populations,
)
from .multitime import MultiTimeSpec, multitime_exact, multitime_regression
from .operators import dagger
from .poisson import PoissonMEParams, gaussian_liouvillian, poisson_liouvillian
from .telegraph import (
    BathParams,
    CorrelatorSpec,
    correlationlike_analytic,
    correlationlike_numeric,
    npoint_analytic,
    npoint_numeric,
    two_point_analytic,
)

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3, 4


def fmt(x):
    return format(float(x), ".17g")


# ------------------------------------------------------------------ output

def atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating, int, np.integer)) and not isinstance(v, bool)
                    else v for v in row])
    atomic_write(path, buf.getvalue())


def write_json(path: Path, obj):
    atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


# ----------------------------------------------------------------- helpers

def build_model(cfg):
    m = cfg.model
    return collective_model(m.N, m.omega, m.representation)


def observables(model):
    d = model.dim
    p0 = np.zeros((d, d), dtype=complex)
    p0[0, 0] = 1.0
    L = model.L
    # sum_i sigma_z_i = [L^+, L] for the collective lowering operator
    jz = dagger(L) @ L - L @ dagger(L)
    return {"p_ground": p0, "jx": L + dagger(L), "jy": -1j * (dagger(L) - L), "jz": jz}


def gamma1_plus(cfg):
    p = cfg.poisson
    if p.gamma1_plus is not None:
        return p.gamma1_plus
    if p.beta is not None:
        return p.gamma2_plus * np.exp(-p.beta * cfg.model.omega)
    return 0.0


def poisson_params(cfg, model):
    return PoissonMEParams(model.H_S, model.L, cfg.poisson.mu, gamma1_plus(cfg), cfg.poisson.gamma2_plus)


def initial_state(cfg, model):
    kind = cfg.model.initial
    if kind == "ground":
        return pure_state(model.ground_state())
    if kind == "dicke1":
        return pure_state(model.dicke(1))
    if kind == "excited":
        return pure_state(model.dicke(model.N))
    if kind == "superposition":
        return pure_state(model.ground_state() + model.dicke(1))
    return gibbs_state(model.H_S, cfg.poisson.beta)


def bath_for(cfg):
    """Return a ``gamma_minus -> BathParams`` factory for the configured bath."""
    b = cfg.bath
    if b.mode == "explicit":
        fixed = BathParams(b.omega1, b.omega2, b.gamma1_plus, b.gamma1_minus,
                           b.gamma2_plus, b.gamma2_minus, b.lam, b.beta)
        return lambda _g=None: fixed
    if b.mode == "detailed_balance":
        fixed = BathParams.detailed_balance(b.omega1, b.omega2, b.beta, b.gamma1_plus, b.gamma2_plus, b.lam)
        return lambda _g=None: fixed
    mu, g1p, g2p = cfg.poisson.mu, gamma1_plus(cfg), cfg.poisson.gamma2_plus
    if b.detailed_balance:
        beta = cfg.poisson.beta
        return lambda g: BathParams.white_noise(g, mu, g1p, g2p, beta=beta)
    return lambda g: BathParams.white_noise(g, mu, g1p, g2p, omega1=b.omega1, omega2=b.omega2)


def single_bath(cfg):
    factory = bath_for(cfg)
    if cfg.bath.mode == "white_noise":
        return factory(cfg.bath.ladder()[0])
    return factory()


def derived_summary(cfg, model=None):
    out = {}
    if cfg.poisson is not None:
        out["gamma1_plus"] = gamma1_plus(cfg)
        out["gamma2_plus"] = cfg.poisson.gamma2_plus
        out["mu"] = cfg.poisson.mu
        if model is not None:
            out["mu2N"] = cfg.poisson.mu**2 * model.N
            out["effective_decay_rate"] = effective_decay_rate(model.N, cfg.poisson.mu, cfg.poisson.gamma2_plus)
    if cfg.bath is not None and (cfg.bath.mode != "white_noise" or cfg.poisson is not None):
        factory = bath_for(cfg)
        gms = cfg.bath.ladder() if cfg.bath.mode == "white_noise" else [None]
        baths = []
        for g in gms:
            bp = factory(g)
            row = {"gamma_minus": bp.gamma1_minus, "lambda": bp.lam, "omega1": bp.omega1, "omega2": bp.omega2}
            row.update(bp.derived())
            baths.append(row)
        out["bath"] = baths
    return out


# ------------------------------------------------------------- experiments

def run_simulate(cfg, out: Path):
    model = build_model(cfg)
    rho0 = initial_state(cfg, model)
    times = cfg.times.grid()
    if cfg.engine == "composite":
        setup = CompositeSetup(model.H_S, model.L, single_bath(cfg), rho0)
        traj = reduced_trajectory(setup, times)
    else:
        p = poisson_params(cfg, model)
        gen = poisson_liouvillian(p) if cfg.engine == "poisson" else gaussian_liouvillian(p)
        traj = propagate(gen, rho0, times)
    obs = observables(model)
    cols = ["p_ground", "jx", "jz"]
    vals = [traj.expect(obs[c]).real for c in cols]
    write_csv(out / "trajectory.csv", ["t"] + cols, zip(times, *vals))
    legend = {"t": "time (1/gamma2_plus)", "p_ground": "<0|rho_S|0>",
              "jx": "<sum_i sigma_x_i>", "jz": "<sum_i sigma_z_i>"}
    return ["trajectory.csv"], legend, {}


def run_steady(cfg, out: Path):
    model = build_model(cfg)
    p = poisson_params(cfg, model)
    gen = poisson_liouvillian(p) if cfg.engine != "gaussian" else gaussian_liouvillian(p)
    rho = steady_state(gen)
    beta = cfg.poisson.beta
    N, w = model.N, model.omega
    if model.representation == "symmetric":
        pops = np.real(np.diag(rho))
    else:
        from .models import symmetric_isometry
        iso = symmetric_isometry(N)
        pops = np.real(np.einsum("ik,ij,jk->k", iso.conj(), rho, iso))
    sector = sector_gibbs_populations(N, w, beta) if beta is not None else np.full(N + 1, np.nan)
    full = full_gibbs_populations(N, w, beta) if beta is not None else np.full(N + 1, np.nan)
    k = np.arange(N + 1)
    rows = zip(k, w * (k - N / 2.0), pops, sector, full)
    write_csv(out / "steady.csv", ["k", "energy", "population", "gibbs_sector", "gibbs_full"], rows)
    ratios = [float(pops[i + 1] / pops[i]) for i in range(N) if pops[i] > 0]
    extra = {"ladder_ratios": ratios}
    if beta is not None:
        extra["boltzmann_factor"] = float(np.exp(-beta * w))
    legend = {"k": "excitation number", "population": "steady-state population in the symmetric sector",
              "gibbs_sector": "Boltzmann weights within the symmetric sector",
              "gibbs_full": "full-space Gibbs probability of k excitations"}
    return ["steady.csv"], legend, extra


def _signs(pair):
    return tuple(1 if s == "+" else -1 for s in pair)


def run_corr(cfg, out: Path):
    c = cfg.corr
    bath = single_bath(cfg)
    idx = [_signs(i) for i in c.indices]
    rows = []
    if c.kind == "two_point":
        header = ["t", "re", "im", "analytic_re", "analytic_im", "abs_err"]
        for t in c.t:
            num = npoint_numeric(bath, CorrelatorSpec(idx, (t, 0.0)))
            ana = two_point_analytic(bath, idx[0], idx[1], t)
            rows.append((t, num.real, num.imag, ana.real, ana.imag, abs(num - ana)))
    elif c.kind == "correlationlike":
        header = ["t", "s", "re", "im", "analytic_re", "analytic_im", "abs_err"]
        init = 1 if c.init == "+" else -1
        for t in c.t:
            for s in c.s:
                num = correlationlike_numeric(bath, idx[0], idx[1], init, t, s)
                ana = correlationlike_analytic(bath, idx[0], idx[1], init, t, s)
                rows.append((t, s, num.real, num.imag, ana.real, ana.imag, abs(num - ana)))
    else:
        n = len(idx)
        header = [f"t{i + 1}" for i in range(n)] + ["re", "im", "analytic_re", "analytic_im", "abs_err"]
        for ts in c.times:
            spec = CorrelatorSpec(idx, ts)
            num, ana = npoint_numeric(bath, spec), npoint_analytic(bath, spec)
            rows.append((*ts, num.real, num.imag, ana.real, ana.imag, abs(num - ana)))
    write_csv(out / "corr.csv", header, rows)
    legend = {"re/im": "Liouville-space evaluation with explicit Q projectors",
              "analytic_re/analytic_im": "closed form", "abs_err": "|numeric - analytic|"}
    return ["corr.csv"], legend, {"max_abs_err": max((r[-1] for r in rows), default=0.0)}


def run_decay_rate(cfg, out: Path):
    d = cfg.decay_rate
    g2 = cfg.poisson.gamma2_plus if cfg.poisson is not None else 1.0
    xs = np.logspace(np.log10(d.x_min), np.log10(d.x_max), d.n_points)
    rows = []
    for x in xs:
        mu = np.sqrt(x / d.N)
        rows.append((
            x,
            effective_decay_rate(d.N, mu, g2) / g2,
            gaussian_decay_rate(d.N, mu, g2) / g2,
            effective_decay_rate_quadrature(d.N, mu, g2) / g2,
        ))
    write_csv(out / "decay_rate.csv", ["mu2N", "poisson", "gaussian", "poisson_quadrature"], rows)
    legend = {"mu2N": "mu^2 N", "poisson": "Gamma_eff / gamma2_plus (Poisson noise)",
              "gaussian": "Gaussian-limit rate 2 mu^2 N", "poisson_quadrature": "quadrature twin of 'poisson'"}
    return ["decay_rate.csv"], legend, {}


def run_converge(cfg, out: Path):
    model = build_model(cfg)
    rho0 = initial_state(cfg, model)
    factory = bath_for(cfg)
    ladder = cfg.bath.ladder()
    setup = CompositeSetup(model.H_S, model.L, factory(ladder[0]), rho0)
    obs = observables(model)
    chosen = {k: obs[k] for k in ("p_ground", "jx")}
    rows = convergence_study(setup, factory, ladder, cfg.times.grid(), chosen)
    write_csv(out / "converge.csv",
              ["gamma_minus", "lambda", "observable", "max_dev", "final_dev", "markov_ratio"],
              [tuple(r) for r in rows])
    legend = {"max_dev": "max over the time grid of |composite - Poisson ME|",
              "final_dev": "deviation at the last time point", "markov_ratio": "max(G1+, G2+) / G1-"}
    return ["converge.csv"], legend, {}


def run_multitime(cfg, out: Path):
    model = build_model(cfg)
    rho0 = initial_state(cfg, model)
    A = observables(model)[cfg.multitime.operator]
    setup = CompositeSetup(model.H_S, model.L, single_bath(cfg), rho0)
    p = poisson_params(cfg, model)
    gen = poisson_liouvillian(p)
    n = max(len(ts) for ts in cfg.multitime.times)
    header = [f"t{i + 1}" for i in range(n)] + ["re", "im", "source"]
    rows = []
    for ts in cfg.multitime.times:
        spec = MultiTimeSpec(A, ts)
        pad = list(ts) + [""] * (n - len(ts))
        ex = multitime_exact(setup, spec)
        rg = multitime_regression(p, rho0, spec, gen=gen)
        rows.append((*pad, ex.real, ex.imag, "exact"))
        rows.append((*pad, rg.real, rg.imag, "regression"))
    write_csv(out / "multitime.csv", header, rows)
    legend = {"source": "exact: composite system-bath propagation; regression: Poisson ME"}
    return ["multitime.csv"], legend, {}


def _sweep_job(args):
    sub, out_dir = args
    return run_config(sub, Path(out_dir), raise_errors=False)


def run_sweep(cfg, out: Path, base_dir: Path):
    jobs = []
    for i, entry in enumerate(cfg.sweep.configs):
        if isinstance(entry, str):
            path = Path(entry)
            sub = parse_config(path if path.is_absolute() else base_dir / path)
        else:
            sub = parse_config(entry)
        if sub.experiment == "sweep":
            raise ConfigValidationError("nested sweeps are not supported")
        jobs.append((sub, str(out / f"{i:03d}_{sub.experiment}")))
    if cfg.sweep.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.sweep.workers) as pool:
            codes = list(pool.map(_sweep_job, jobs))
    else:
        codes = [_sweep_job(j) for j in jobs]
    names = [Path(j[1]).name for j in jobs]
    write_csv(out / "sweep.csv", ["index", "directory", "exit_code"],
              [(i, n, c) for i, (n, c) in enumerate(zip(names, codes))])
    return ["sweep.csv"], {"exit_code": "exit code of each sub-run"}, {"exit_codes": codes}


RUNNERS = {
    "simulate": run_simulate,
    "steady": run_steady,
    "corr": run_corr,
    "decay_rate": run_decay_rate,
    "converge": run_converge,
    "multitime": run_multitime,
}


def run_config(cfg, out: Path, base_dir: Path = Path("."), raise_errors=True):
    """Run one validated config, writing outputs and ``summary.json`` under ``out``.

    With ``raise_errors=False`` failures are reported on stderr and turned
    into an exit code instead of propagating.
    """
    try:
        if cfg.experiment == "sweep":
            files, legend, extra = run_sweep(cfg, out, base_dir)
        else:
            files, legend, extra = RUNNERS[cfg.experiment](cfg, out)
        model = build_model(cfg) if cfg.experiment not in ("corr", "decay_rate", "sweep") else None
        summary = {
            "experiment": cfg.experiment,
            "config": cfg.model_dump(mode="json"),
            "derived": derived_summary(cfg, model),
            "outputs": files,
            "columns": legend,
            "results": extra,
            "version": __version__,
        }
        write_json(out / "summary.json", summary)
        return EXIT_OK
    except Exception as exc:
        if raise_errors:
            raise
        return report_error(exc)


def report_error(exc):
    if isinstance(exc, ConfigParseError):
        kind, code = "ConfigParseError", EXIT_PARSE
    elif isinstance(exc, (ConfigValidationError, ValueError)) and not isinstance(exc, NumericalError):
        kind, code = "ValidationError", EXIT_VALIDATION
    elif isinstance(exc, (NumericalError, ArithmeticError, np.linalg.LinAlgError)):
        kind, code = "NumericalError", EXIT_NUMERICAL
    elif isinstance(exc, PoissonBathError):
        kind, code = "ValidationError", EXIT_VALIDATION
    else:
        raise exc
    print(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
    return code


def build_parser():
    parser = argparse.ArgumentParser(
        prog="poissonbath",
        description="Poisson-noise master equation experiments; outputs CSV and JSON data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run a '{name}' experiment")
        sp.add_argument("--config", required=True, help="path to the JSON config")
        sp.add_argument("--out", default=None, help="output directory (overrides config 'output')")
        sp.add_argument("--validate-only", action="store_true", help="parse and validate, then exit")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config, experiment=args.command)
    except (ConfigParseError, ConfigValidationError) as exc:
        return report_error(exc)
    if args.validate_only:
        print(json.dumps({"valid": True, "experiment": cfg.experiment}))
        return EXIT_OK
    out = Path(args.out if args.out is not None else cfg.output)
    return run_config(cfg, out, base_dir=Path(args.config).resolve().parent, raise_errors=False)


if __name__ == "__main__":
    sys.exit(main())
