"""Command-line front end: figure-data emission, sweeps, validation.

Subcommands
-----------
dispersion       both branches, both dispersion models, over a k grid
lightshift-sweep L0 and L1 by both methods versus the threshold frequency
field-map        the two reference intensity lines plus an analysis footer
validate         internal consistency suite, exit 0 iff every check passes

Every CSV starts with a '#' metadata block (tool version, timestamp,
resolved configuration, per-point status) that is sufficient to re-run the
computation; the data body is deterministic for a fixed configuration at
any parallelism degree.

Exit codes: 0 success, 1 validation failure, 2 config error, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import datetime
import math
import os
import sys
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np

from . import __version__
from .config import LAMBDA_P, Config, ConfigError, config_with, load_config
from .errors import InsufficientSignalError, QuadratureError, StarkShiftError
from .field import (
    StationaryField,
    fit_decay_length,
    fringe_visibility,
    intensity_line,
    required_samples,
)
from .lightshift import (
    PoleParams,
    lightshift_analytic,
    lightshift_numeric,
    pole_params,
    threshold_asymptote,
    total_lightshift,
)
from .modesolver import dispersion, enumerate_branches, transverse_profile
from .quadrature import integrate_adaptive

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SWEEPABLE_KEYS = ("omega_th", "kappa", "atom_x")


@dataclass(frozen=True)
class SweepSpec:
    """One swept configuration key over a uniform grid."""

    key: str
    lo: float
    hi: float
    count: int
    jobs: int

    def __post_init__(self):
        if self.key not in SWEEPABLE_KEYS:
            raise ConfigError(f"swept key must be one of {SWEEPABLE_KEYS}, got '{self.key}'")
        if self.count < 2:
            raise ConfigError(f"sweep needs count >= 2, got {self.count}")
        if not self.lo < self.hi:
            raise ConfigError(f"sweep needs min < max, got {self.lo}:{self.hi}")

    def values(self):
        return np.linspace(self.lo, self.hi, self.count)


def _fmt(x):
    return f"{x:.17g}"


def _manifest_lines(command, config, extra=()):
    lines = [
        f"# starkshift {__version__}",
        f"# command: {command}",
        f"# timestamp: {datetime.datetime.now(datetime.timezone.utc).isoformat()}",
    ]
    for key, value in config.raw:
        lines.append(f"# config: {key} = {value}")
    lines.extend(extra)
    return lines


def _write_csv(path, manifest, columns, rows, footer=()):
    out = sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8")
    try:
        for line in manifest:
            print(line, file=out)
        print(f"# columns: {','.join(columns)}", file=out)
        print(",".join(columns), file=out)
        for row in rows:
            print(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row),
                  file=out)
        for line in footer:
            print(line, file=out)
    finally:
        if out is not sys.stdout:
            out.close()


def config_from_header(path):
    """Rebuild the configuration from a CSV's '# config:' header lines."""
    raw = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# config: "):
                key, value = line[len("# config: "):].split("=", 1)
                raw[key.strip()] = value.strip()
            elif not line.startswith("#"):
                break
    if not raw:
        raise ConfigError(f"no '# config:' header in {path}")
    return config_with(raw)


# ---------------------------------------------------------------------------
# lightshift-sweep

def _shift_rows(config, swept_value):
    geometry = config.geometry
    atom = config.atom
    solver = config.solver
    branches = enumerate_branches(geometry)
    pos = atom.position
    dy_rel = geometry.dy / LAMBDA_P

    def pair(method):
        out = []
        for branch in branches[:2]:
            if method == "numeric":
                shift = lightshift_numeric(
                    geometry, branch, pos, atom.g_squared, atom.gamma,
                    omega_c=solver.omega_c, omega_c_list=solver.omega_c_list,
                    quad_tol=solver.quad_tol, kmax_margin=solver.kmax_margin)
            else:
                shift = lightshift_analytic(geometry, branch, pos,
                                            atom.g_squared, atom.gamma)
            out.append(shift.value)
        while len(out) < 2:
            out.append(complex(float("nan"), float("nan")))
        return out

    rows = []
    for method in ("numeric", "analytic"):
        l0, l1 = pair(method)
        rows.append((swept_value, dy_rel, l0.real, l0.imag, l1.real, l1.imag, method))
    return rows


def _sweep_worker(task):
    index, raw_items, key, value = task
    try:
        cfg = config_with(dict(raw_items), **{key: repr(float(value))})
        return index, "ok", _shift_rows(cfg, float(value))
    except StarkShiftError as exc:
        return index, f"error: {exc}", []


def run_sweep(config, spec):
    """Execute the sweep; returns (rows, status-lines), index-ordered."""
    raw_items = tuple(config.raw)
    tasks = [(i, raw_items, spec.key, v) for i, v in enumerate(spec.values())]
    if spec.jobs > 1:
        with Pool(processes=spec.jobs) as pool:
            results = pool.map(_sweep_worker, tasks)
    else:
        results = [_sweep_worker(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    rows, statuses = [], []
    for index, status, point_rows in results:
        statuses.append(f"# point_status: {index} {status}")
        rows.extend(point_rows)
    return rows, statuses


def cmd_lightshift_sweep(args):
    config = load_config(args.config)
    lo, hi = _parse_range(args.range, default=(0.98, 1.02))
    spec = SweepSpec(key=args.sweep_key, lo=lo, hi=hi, count=args.points,
                     jobs=args.jobs)
    rows, statuses = run_sweep(config, spec)
    first_col = ("omega_th_over_omegap" if spec.key == "omega_th" else spec.key)
    columns = (first_col, "Dy_over_lambdap",
               "ReL0_over_Gamma", "ImL0_over_Gamma",
               "ReL1_over_Gamma", "ImL1_over_Gamma", "method")
    manifest = _manifest_lines(
        "lightshift-sweep", config,
        extra=[f"# sweep: key={spec.key} min={_fmt(spec.lo)} max={_fmt(spec.hi)} "
               f"count={spec.count} jobs={spec.jobs}"] + statuses)
    _write_csv(args.out, manifest, columns, rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# dispersion

def cmd_dispersion(args):
    if args.points < 2:
        raise ConfigError(f"k grid needs at least 2 points, got {args.points}")
    config = load_config(args.config)
    geometry = config.geometry
    lo, hi = _parse_range(args.range, default=(0.0, 4.5))
    ks = np.linspace(lo, hi, args.points)
    branches = enumerate_branches(geometry)
    rows = []
    for b_index, branch in enumerate(branches):
        for model in ("constant-q", "exact"):
            omegas = dispersion(branch, ks, model, geometry)
            rows.extend((float(k), float(om), b_index, model)
                        for k, om in zip(ks, np.atleast_1d(omegas)))
    columns = ("k_over_kp", "omega_over_omegap", "branch", "model")
    manifest = _manifest_lines("dispersion", config,
                               extra=[f"# branches: {len(branches)}"])
    _write_csv(args.out, manifest, columns, rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# field-map

def _field_solution(config, method="analytic"):
    geometry, atom, solver = config.geometry, config.atom, config.solver
    branches = enumerate_branches(geometry)
    pos = atom.position
    shifts = []
    for branch in branches:
        if method == "numeric":
            shifts.append(lightshift_numeric(
                geometry, branch, pos, atom.g_squared, atom.gamma,
                omega_c=solver.omega_c, omega_c_list=solver.omega_c_list,
                quad_tol=solver.quad_tol, kmax_margin=solver.kmax_margin))
        else:
            shifts.append(lightshift_analytic(geometry, branch, pos,
                                              atom.g_squared, atom.gamma))
    return StationaryField(geometry, branches, shifts, pos,
                           atom.delta_a, atom.gamma), branches


def cmd_field_map(args):
    config = load_config(args.config)
    geometry = config.geometry
    solution, branches = _field_solution(config, method=args.method)
    lo, hi = _parse_range(args.range, default=(-40.0, 40.0))
    z_lo, z_hi = lo * LAMBDA_P, hi * LAMBDA_P
    n = args.points if args.points is not None else max(
        4096, required_samples(solution, z_lo, z_hi))
    lines = {
        "a": (0.0, geometry.dy / 2.0),
        "b": (geometry.dx / 2.0, geometry.dy / 2.0),
    }
    rows, footer = [], []
    for tag, (x, y) in lines.items():
        line = intensity_line(solution, x, y, z_lo, z_hi, n)
        rows.extend(
            (float(z) / LAMBDA_P, float(i), x / geometry.dx, y / geometry.dy)
            for z, i in zip(line.z, line.intensity))
        up, down = fringe_visibility(line)
        footer.append(f"# analysis: line={tag} upstream_visibility={_fmt(up)} "
                      f"downstream_visibility={_fmt(down)}")
        fit_branch = 0 if tag == "a" else min(1, len(branches) - 1)
        try:
            length = fit_decay_length(line, fit_branch)
            footer.append(f"# analysis: line={tag} branch={fit_branch} "
                          f"fitted_decay_length_lambdap={_fmt(length / LAMBDA_P)}")
        except InsufficientSignalError as exc:
            footer.append(f"# analysis: line={tag} branch={fit_branch} fit_failed: {exc}")
    columns = ("z_over_lambdap", "intensity", "x_over_Dx", "y_over_Dy")
    manifest = _manifest_lines("field-map", config,
                               extra=[f"# field_method: {args.method}",
                                      f"# samples_per_line: {n}"])
    _write_csv(args.out, manifest, columns, rows, footer=footer)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate

def _check(name, worst, limit, detail=""):
    ok = worst <= limit
    tag = "PASS" if ok else "FAIL"
    print(f"[{tag}] {name}: worst {worst:.3e} (limit {limit:.3e}) {detail}".rstrip())
    return ok


def _normalization_residual(geometry, branch):
    # index-weighted cross-section integral of |f|^2 against A, by quadrature
    a = geometry.dx / 2.0
    x_out = a + 60.0 / branch.gamma_x

    def xpart(inside):
        lo, hi = (0.0, a) if inside else (a, x_out)
        seeds = np.linspace(lo, hi, 9)

        def fx(x):
            f = transverse_profile(branch, x, geometry.dy / 2.0, geometry)
            return np.asarray(f) ** 2
        val, _, _ = integrate_adaptive(fx, seeds, abs_tol=1e-12)
        return 2.0 * float(val[0].real)  # even in x by |f|^2 symmetry

    def ypart():
        seeds = np.linspace(0.0, geometry.dy, 9)

        def fy(y):
            return np.sin(math.pi * y / geometry.dy) ** 2
        val, _, _ = integrate_adaptive(fy, seeds, abs_tol=1e-12)
        return float(val[0].real)

    # (x at y=dy/2 carries sin^2=1, so divide it back out through ypart)
    total = (geometry.n0 ** 2 * xpart(True) + xpart(False)) * ypart()
    return abs(total - geometry.cross_section) / geometry.cross_section


def cmd_validate(args):
    config = load_config(args.config)
    geometry, atom, solver = config.geometry, config.atom, config.solver
    pos = atom.position
    ok = True

    # pole identity on a kappa grid
    worst = 0.0
    branches = enumerate_branches(geometry)
    for kap in (1e-5, 1e-4, 1e-3, 1e-2):
        for branch in branches:
            p = pole_params(branch, kap)
            worst = max(worst,
                        abs(p.r ** 2 - p.s ** 2 + 2.0 * p.u) / max(abs(2 * p.u), 1e-30),
                        abs(p.r * p.s - kap) / kap)
    ok &= _check("pole-identity", worst, 1e-12)

    # oracle equivalence over the threshold sweep
    worst_re, worst_im = 0.0, 0.0
    for om_th in np.linspace(0.98, 1.02, args.points):
        cfg = config_with(dict(config.raw), omega_th=repr(float(om_th)))
        bs = enumerate_branches(cfg.geometry)
        for branch in bs[:2]:
            lan = lightshift_analytic(cfg.geometry, branch, cfg.atom.position,
                                      cfg.atom.g_squared, cfg.atom.gamma).value
            lnum = lightshift_numeric(
                cfg.geometry, branch, cfg.atom.position, cfg.atom.g_squared,
                cfg.atom.gamma, omega_c=solver.omega_c,
                omega_c_list=solver.omega_c_list, quad_tol=solver.quad_tol,
                kmax_margin=solver.kmax_margin).value
            if abs(lan.real) > 0.1:
                worst_re = max(worst_re, abs(lnum.real - lan.real) / abs(lan.real))
            if max(abs(lan.imag), abs(lnum.imag)) > 0.1:
                worst_im = max(worst_im, abs(lnum.imag - lan.imag) / abs(lan.imag))
    ok &= _check("oracle-equivalence-re", worst_re, 0.01,
                 f"({args.points} threshold points)")
    ok &= _check("oracle-equivalence-im", worst_im, 0.05, "(renormalized Im)")

    # threshold asymptote at kappa = 1e-6
    cfg6 = config_with(dict(config.raw), kappa="1e-6")
    b1 = enumerate_branches(cfg6.geometry)[1]
    asym = threshold_asymptote(cfg6.geometry, b1, cfg6.atom.position,
                               cfg6.atom.g_squared, cfg6.atom.gamma).value
    full = lightshift_analytic(cfg6.geometry, b1, cfg6.atom.position,
                               cfg6.atom.g_squared, cfg6.atom.gamma).value
    ok &= _check("threshold-asymptote", abs(abs(asym) - abs(full)) / abs(full), 0.02,
                 "(kappa = 1e-6)")

    # kappa scaling of the threshold shift
    mags = []
    for kap in (1e-5, 1e-4, 1e-3):
        cfgk = config_with(dict(config.raw), kappa=repr(kap))
        bk = enumerate_branches(cfgk.geometry)[1]
        lv = lightshift_analytic(cfgk.geometry, bk, cfgk.atom.position,
                                 cfgk.atom.g_squared, cfgk.atom.gamma).value
        mags.append(abs(lv) * math.sqrt(kap))
    ok &= _check("kappa-scaling", (max(mags) - min(mags)) / min(mags), 0.03)

    # passivity spot check, both methods
    rng = np.random.default_rng(20260810)
    worst = -float("inf")
    for _ in range(args.fuzz):
        try:
            cfg_f = config_with(
                n0=repr(rng.uniform(1.1, 2.5)),
                dx=repr(rng.uniform(0.4, 1.3)),
                dy=repr(rng.uniform(0.25, 1.2)),
                omega_th="1.0",
                kappa=repr(10 ** rng.uniform(-5, -2)),
            )
        except ConfigError:
            continue
        bs = enumerate_branches(cfg_f.geometry)
        branch = bs[rng.integers(len(bs))]
        pos_f = (rng.uniform(-0.6, 0.6) * cfg_f.geometry.dx,
                 rng.uniform(0.0, 1.0) * cfg_f.geometry.dy, 0.0)
        la = lightshift_analytic(cfg_f.geometry, branch, pos_f,
                                 cfg_f.atom.g_squared, cfg_f.atom.gamma).value
        ln = lightshift_numeric(cfg_f.geometry, branch, pos_f,
                                cfg_f.atom.g_squared, cfg_f.atom.gamma).value
        worst = max(worst, la.real, ln.real)
    ok &= _check("passivity", worst, 1e-12, f"({args.fuzz} fuzzed sets, Re L)")

    # profile normalization by quadrature
    worst = max(_normalization_residual(geometry, b) for b in branches)
    ok &= _check("normalization-quadrature", worst, 1e-8)

    # decay-length consistency of the stationary field against its poles
    solution, bs = _field_solution(config)
    expected = solution.decay_scales()
    if args.corrupt_pole_units:
        # regression guard: emulate the dimensionally inconsistent pole
        # formula (s too small by one factor of c in wavelength units)
        solution.poles = [PoleParams(r=p.r, s=p.s / (2.0 * math.pi), u=p.u)
                          for p in solution.poles]
    worst = 0.0
    for tag, x, branch_index in (("a", 0.0, 0), ("b", geometry.dx / 2.0, 1)):
        scale = expected[branch_index]
        span = max(45.0 * LAMBDA_P, 3.0 * scale)
        n = max(4096, required_samples(solution, -span, span))
        line = intensity_line(solution, x, geometry.dy / 2.0, -span, span, n)
        window = (0.25 * scale, min(2.5 * scale, 0.95 * span))
        try:
            fitted = fit_decay_length(line, branch_index, window=window)
            worst = max(worst, abs(fitted - scale) / scale)
        except InsufficientSignalError:
            worst = max(worst, float("inf"))
    ok &= _check("decay-consistency", worst, 0.10,
                 "(fitted vs pole decay scale)")

    print("validation:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_VALIDATION


# ---------------------------------------------------------------------------

def _parse_range(text, default):
    if text is None:
        return default
    try:
        lo, hi = (float(part) for part in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"--range expects MIN:MAX, got '{text}'") from exc
    return lo, hi


def build_parser():
    parser = argparse.ArgumentParser(
        prog="starkshift",
        description="Guided-mode continuum light shift of a single atom: "
                    "dispersion curves, shift sweeps, stationary field maps.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, points_default):
        p.add_argument("--config", default=None,
                       help="config file (default: $STARKSHIFT_CONFIG or built-ins)")
        p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
        p.add_argument("--points", type=int, default=points_default)
        p.add_argument("--range", default=None, help="MIN:MAX for the grid")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("dispersion", help="mode frequency vs longitudinal wavenumber")
    common(p, 181)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("lightshift-sweep", help="L0, L1 vs threshold frequency")
    common(p, 21)
    p.add_argument("--sweep-key", default="omega_th", choices=SWEEPABLE_KEYS)
    p.set_defaults(func=cmd_lightshift_sweep)

    p = sub.add_parser("field-map", help="stationary intensity lines")
    common(p, None)
    p.add_argument("--method", default="analytic", choices=("analytic", "numeric"))
    p.set_defaults(func=cmd_field_map)

    p = sub.add_parser("validate", help="internal consistency checks")
    p.add_argument("--config", default=None)
    p.add_argument("--points", type=int, default=9,
                   help="threshold points for the oracle-equivalence check")
    p.add_argument("--fuzz", type=int, default=200)
    p.add_argument("--corrupt-pole-units", action="store_true",
                   help=argparse.SUPPRESS)  # regression guard, see validate
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except StarkShiftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
