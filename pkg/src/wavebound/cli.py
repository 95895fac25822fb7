"""Command-line front end.

Four commands:

* ``wavebound bound {scalar,two-species,fisher-stefan}`` -- compute a
  speed bound (or the self-consistent coupled speed) and print it as JSON.
* ``wavebound criterion`` -- classify a scalar model as pushed /
  pulled_candidate / degenerate_pushed and print the criterion integrals.
* ``wavebound simulate {scalar,two-species,stefan}`` -- run a
  finite-difference simulation, write profile/front CSVs, print the
  fitted speed.
* ``wavebound figure {1..5}`` -- run the parameter sweep behind one of
  the five standard data figures and write one CSV per curve (bound,
  linear, and simulated speeds side by side).

Every command writes a JSON run manifest (command line, resolved
configuration, package versions, output paths, wall-clock time) into the
output directory.  Exit codes: 0 success, 2 model/usage error, 3
non-convergence, 4 numerical instability, 5 front-tracking failure,
6 partial sweep failure.

Sweep points run on a small thread pool; set WAVEBOUND_THREADS to cap
(or serialise with WAVEBOUND_THREADS=1).  Output rows are sorted before
writing, so results do not depend on scheduling.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy

from . import __version__
from .errors import (
    ConfigError,
    ExprSyntaxError,
    FrontTrackingError,
    InstabilityError,
    ModelError,
    NonConvergenceError,
    WaveboundError,
)
from .model import ScalarModel, TwoSpeciesModel, make_preset
from .pde import (
    SimConfig,
    SimResult,
    simulate_fisher_stefan,
    simulate_scalar,
    simulate_two_species,
)
from .twospecies import (
    linear_speed_two_species,
    solve_implicit_speed,
    weak_coupling_report,
)
from .varbound import (
    fisher_stefan_bound,
    linear_speed,
    selection_criterion,
    sup_F,
)

EXIT_OK = 0
EXIT_MODEL = 2
EXIT_NONCONV = 3
EXIT_INSTABILITY = 4
EXIT_FRONT = 5
EXIT_PARTIAL = 6

_SCALAR_PRESETS = ("fisher_kpp", "porous_fisher", "allee", "linear_shift")
_TWO_PRESETS = ("ecm_c", "ecm_b", "landman")


# ----------------------------------------------------------------------
# plumbing
# ----------------------------------------------------------------------


def _parse_params(pairs: Sequence[str]) -> Dict[str, float]:
    out: Dict[str, float] = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise ConfigError(f"--param expects NAME=VALUE, got {pair!r}")
        try:
            out[name] = float(value)
        except ValueError:
            raise ConfigError(f"--param {name}: {value!r} is not a number")
    return out


def _add_scalar_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=_SCALAR_PRESETS)
    p.add_argument("--D", help="diffusivity expression in u")
    p.add_argument("--f", help="reaction expression in u")
    p.add_argument(
        "--param", action="append", default=[], metavar="NAME=VALUE"
    )


def _add_two_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=_TWO_PRESETS)
    p.add_argument("--D", help="diffusivity expression in u1, u2")
    p.add_argument("--f", help="reaction expression in u1, u2")
    p.add_argument("--kappa", type=float, help="degradation rate (with --D/--f)")
    p.add_argument("--nu", type=float, help="far-field substance level (with --D/--f)")
    p.add_argument(
        "--param", action="append", default=[], metavar="NAME=VALUE"
    )


def _build_scalar_model(args: argparse.Namespace) -> ScalarModel:
    params = _parse_params(args.param)
    if args.preset:
        model = make_preset(args.preset, params)
        if not isinstance(model, ScalarModel):
            raise ConfigError(f"{args.preset} is not a single-species preset")
        return model
    if args.D is None or args.f is None:
        raise ConfigError("provide --preset, or both --D and --f")
    return ScalarModel(args.D, args.f, params=params)


def _build_two_model(args: argparse.Namespace) -> TwoSpeciesModel:
    params = _parse_params(args.param)
    if args.preset:
        model = make_preset(args.preset, params)
        if not isinstance(model, TwoSpeciesModel):
            raise ConfigError(f"{args.preset} is not a two-species preset")
        return model
    if args.D is None or args.f is None:
        raise ConfigError("provide --preset, or both --D and --f")
    if args.kappa is None or args.nu is None:
        raise ConfigError("--D/--f models need --kappa and --nu")
    return TwoSpeciesModel(
        args.D, args.f, kappa=args.kappa, nu=args.nu, params=params
    )


def _scalar_model_config(model: ScalarModel) -> Dict[str, object]:
    return {"D": model.D, "f": model.f, "params": dict(model.params)}


def _two_model_config(model: TwoSpeciesModel) -> Dict[str, object]:
    return {
        "D": model.D,
        "f": model.f,
        "kappa": model.kappa,
        "nu": model.nu,
        "params": dict(model.params),
    }


def _emit(payload: Dict[str, object]) -> None:
    print(json.dumps(payload, indent=2, default=float))


def _write_manifest(
    out_dir: str,
    name: str,
    argv: Sequence[str],
    config: Dict[str, object],
    outputs: Sequence[str],
    t0: float,
) -> str:
    manifest = {
        "command_line": list(argv),
        "resolved_config": config,
        "versions": {
            "wavebound": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
        },
        "outputs": sorted(outputs),
        "wall_clock_seconds": round(time.monotonic() - t0, 3),
    }
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, default=float)
        fh.write("\n")
    return path


def _fmt_cell(v: object) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _write_csv(path: str, header: Sequence[str], rows: List[Tuple]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in sorted(rows, key=lambda r: tuple(map(str, r))):
            fh.write(",".join(_fmt_cell(v) for v in row) + "\n")


def _float_list(text: str) -> List[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}")


def _pool_size(n_items: int) -> int:
    env = os.environ.get("WAVEBOUND_THREADS", "").strip()
    if env:
        workers = max(1, int(env))
    else:
        workers = min(4, os.cpu_count() or 1)
    return max(1, min(workers, n_items))


def _sweep(
    points: List[Tuple],
    worker: Callable[[Tuple], Tuple],
) -> Tuple[List[Tuple], List[Dict[str, str]]]:
    """Run ``worker`` over all points on a bounded pool; collect failures."""

    def guarded(point: Tuple) -> Tuple[str, object]:
        try:
            return ("ok", worker(point))
        except WaveboundError as exc:
            return ("fail", {"point": repr(point), "error": str(exc)})

    workers = _pool_size(len(points))
    if workers == 1:
        results = [guarded(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(guarded, points))
    rows = [payload for tag, payload in results if tag == "ok"]
    failures = [payload for tag, payload in results if tag == "fail"]
    return rows, failures  # type: ignore[return-value]


# ----------------------------------------------------------------------
# bound / criterion
# ----------------------------------------------------------------------


def _cmd_bound_scalar(args: argparse.Namespace, argv: Sequence[str]) -> int:
    t0 = time.monotonic()
    model = _build_scalar_model(args)
    result = sup_F(model)
    _emit(result.to_dict())
    os.makedirs(args.out, exist_ok=True)
    _write_manifest(
        args.out,
        "bound-scalar_manifest.json",
        argv,
        {"model": _scalar_model_config(model)},
        [],
        t0,
    )
    return EXIT_OK


def _cmd_bound_two(args: argparse.Namespace, argv: Sequence[str]) -> int:
    t0 = time.monotonic()
    model = _build_two_model(args)
    solve = solve_implicit_speed(model)
    payload = solve.to_dict()
    payload["weak_coupling"] = weak_coupling_report(model, solve).to_dict()
    _emit(payload)
    os.makedirs(args.out, exist_ok=True)
    _write_manifest(
        args.out,
        "bound-two-species_manifest.json",
        argv,
        {"model": _two_model_config(model)},
        [],
        t0,
    )
    return EXIT_OK


def _cmd_bound_fs(args: argparse.Namespace, argv: Sequence[str]) -> int:
    t0 = time.monotonic()
    value = fisher_stefan_bound(args.kappa)
    _emit({"kappa": args.kappa, "c_lb": value})
    os.makedirs(args.out, exist_ok=True)
    _write_manifest(
        args.out,
        "bound-fisher-stefan_manifest.json",
        argv,
        {"kappa": args.kappa},
        [],
        t0,
    )
    return EXIT_OK


def _cmd_criterion(args: argparse.Namespace, argv: Sequence[str]) -> int:
    t0 = time.monotonic()
    model = _build_scalar_model(args)
    report = selection_criterion(model)
    _emit(report.to_dict())
    os.makedirs(args.out, exist_ok=True)
    _write_manifest(
        args.out,
        "criterion_manifest.json",
        argv,
        {"model": _scalar_model_config(model)},
        [],
        t0,
    )
    return EXIT_OK


# ----------------------------------------------------------------------
# simulate
# ----------------------------------------------------------------------


def _sim_config(args: argparse.Namespace) -> SimConfig:
    snaps = tuple(args.snapshot) if args.snapshot else (args.T / 2.0, args.T)
    return SimConfig(
        L=args.L,
        dx=args.dx,
        T=args.T,
        dt=args.dt,
        snapshot_times=snaps,
        ic_kind=args.ic,
        ic_width=args.ic_width,
        ic_value=args.ic_value,
        level=args.level,
    )


def _finish_sim(
    result: SimResult,
    args: argparse.Namespace,
    argv: Sequence[str],
    model_config: Dict[str, object],
    t0: float,
    kind: str,
) -> int:
    if math.isnan(result.fitted_speed):
        raise FrontTrackingError(
            "no trackable front: the profile never crossed the level inside "
            "the usable window"
        )
    os.makedirs(args.out, exist_ok=True)
    profiles = os.path.join(args.out, "profiles.csv")
    front = os.path.join(args.out, "front.csv")
    result.write_profiles_csv(profiles)
    result.write_front_csv(front)
    _emit(
        {
            "fitted_speed": result.fitted_speed,
            "fit_residual": result.fit_residual,
            "stability_report": result.stability_report,
            "min_density": result.min_density,
            "max_density": result.max_density,
        }
    )
    _write_manifest(
        args.out,
        f"simulate-{kind}_manifest.json",
        argv,
        {"model": model_config, "sim": result.config.to_dict()},
        [profiles, front],
        t0,
    )
    return EXIT_OK


def _cmd_simulate_scalar(args: argparse.Namespace, argv: Sequence[str]) -> int:
    t0 = time.monotonic()
    model = _build_scalar_model(args)
    result = simulate_scalar(model, _sim_config(args))
    return _finish_sim(result, args, argv, _scalar_model_config(model), t0, "scalar")


def _cmd_simulate_two(args: argparse.Namespace, argv: Sequence[str]) -> int:
    t0 = time.monotonic()
    model = _build_two_model(args)
    result = simulate_two_species(model, _sim_config(args))
    return _finish_sim(result, args, argv, _two_model_config(model), t0, "two-species")


def _cmd_simulate_stefan(args: argparse.Namespace, argv: Sequence[str]) -> int:
    t0 = time.monotonic()
    result = simulate_fisher_stefan(args.kappa, _sim_config(args))
    return _finish_sim(result, args, argv, {"kappa": args.kappa}, t0, "stefan")


# ----------------------------------------------------------------------
# figures
# ----------------------------------------------------------------------


def _sim_cfg_for_sweep(args: argparse.Namespace, L: float, dx: float, T: float) -> SimConfig:
    return SimConfig(
        L=args.sim_L if args.sim_L is not None else L,
        dx=args.sim_dx if args.sim_dx is not None else dx,
        T=args.sim_T if args.sim_T is not None else T,
    )


def _figure_1(args: argparse.Namespace, out: str) -> Tuple[List[str], List[Dict[str, str]]]:
    m_values = _float_list(args.m_list) if args.m_list else [1.0, 2.0, 3.0]
    n_values = _float_list(args.n_list) if args.n_list else [1.0, 2.0, 3.0]
    csvs: List[str] = []
    all_failures: List[Dict[str, str]] = []

    def worker(point: Tuple) -> Tuple:
        m, n = point
        model = make_preset("porous_fisher", {"m": m, "n": n})
        res = sup_F(model)
        if args.no_sim:
            sim, resid = float("nan"), float("nan")
        else:
            cfg = _sim_cfg_for_sweep(args, L=200.0, dx=0.05, T=150.0)
            sim_res = simulate_scalar(model, cfg)
            sim, resid = sim_res.fitted_speed, sim_res.fit_residual
        return (n, res.c_lb, res.c_linear, sim, resid)

    for m in m_values:
        rows, failures = _sweep([(m, n) for n in n_values], worker)
        path = os.path.join(out, f"figure1_m{m:g}.csv")
        _write_csv(path, ["n", "c_lb", "c_linear", "simulated", "fit_residual"], rows)
        csvs.append(path)
        all_failures.extend(failures)
    return csvs, all_failures


def _figure_2(args: argparse.Namespace, out: str) -> Tuple[List[str], List[Dict[str, str]]]:
    alpha_values = (
        _float_list(args.alpha_list) if args.alpha_list else [0.25, 0.5, 1.0, 2.0]
    )
    a_values = (
        _float_list(args.a_list) if args.a_list else [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
    )
    csvs: List[str] = []
    all_failures: List[Dict[str, str]] = []

    def worker(point: Tuple) -> Tuple:
        alpha, a = point
        model = make_preset("allee", {"alpha": alpha, "a": a})
        res = sup_F(model)
        label = selection_criterion(model).classification
        if args.no_sim:
            sim, resid = float("nan"), float("nan")
        else:
            cfg = _sim_cfg_for_sweep(args, L=200.0, dx=0.1, T=150.0)
            sim_res = simulate_scalar(model, cfg)
            sim, resid = sim_res.fitted_speed, sim_res.fit_residual
        return (a, res.c_lb, res.c_linear, label, sim, resid)

    for alpha in alpha_values:
        rows, failures = _sweep([(alpha, a) for a in a_values], worker)
        path = os.path.join(out, f"figure2_alpha{alpha:g}.csv")
        _write_csv(
            path,
            ["a", "c_lb", "c_linear", "classification", "simulated", "fit_residual"],
            rows,
        )
        csvs.append(path)
        all_failures.extend(failures)
    return csvs, all_failures


def _figure_3(args: argparse.Namespace, out: str) -> Tuple[List[str], List[Dict[str, str]]]:
    kappa_values = (
        _float_list(args.kappa_list)
        if args.kappa_list
        else [0.05, 0.1, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0, 20.0, 50.0]
    )

    def worker(point: Tuple) -> Tuple:
        (kappa,) = point
        c_lb = fisher_stefan_bound(kappa)
        if args.no_sim:
            sim, resid = float("nan"), float("nan")
        else:
            T = 400.0 if kappa < 0.25 else 150.0
            cfg = _sim_cfg_for_sweep(args, L=60.0, dx=0.1, T=T)
            sim_res = simulate_fisher_stefan(kappa, cfg)
            sim, resid = sim_res.fitted_speed, sim_res.fit_residual
        return (kappa, c_lb, 2.0, sim, resid)

    rows, failures = _sweep([(k,) for k in kappa_values], worker)
    path = os.path.join(out, "figure3.csv")
    _write_csv(
        path, ["kappa", "c_lb", "c_linear", "simulated", "fit_residual"], rows
    )
    return [path], failures


def _figure_4(args: argparse.Namespace, out: str) -> Tuple[List[str], List[Dict[str, str]]]:
    nu_values = (
        _float_list(args.nu_list) if args.nu_list else [0.25, 0.5, 0.75]
    )
    kappa_values = (
        _float_list(args.kappa_list)
        if args.kappa_list
        else [0.1, 0.3, 1.0, 3.0, 10.0]
    )
    csvs: List[str] = []
    all_failures: List[Dict[str, str]] = []

    def worker(point: Tuple) -> Tuple:
        preset, nu, kappa = point
        model = make_preset(preset, {"kappa": kappa, "nu": nu})
        solve = solve_implicit_speed(model)
        report = weak_coupling_report(model, solve)
        if args.no_sim:
            sim, resid = float("nan"), float("nan")
        else:
            cfg = _sim_cfg_for_sweep(args, L=360.0, dx=0.1, T=150.0)
            sim_res = simulate_two_species(model, cfg)
            sim, resid = sim_res.fitted_speed, sim_res.fit_residual
        return (
            kappa,
            solve.c,
            solve.c_linear,
            solve.epsilon,
            report.valid,
            sim,
            resid,
        )

    for preset in ("ecm_c", "ecm_b"):
        for nu in nu_values:
            rows, failures = _sweep(
                [(preset, nu, k) for k in kappa_values], worker
            )
            path = os.path.join(out, f"figure4_{preset}_nu{nu:g}.csv")
            _write_csv(
                path,
                [
                    "kappa",
                    "c_lb",
                    "c_linear",
                    "epsilon",
                    "valid",
                    "simulated",
                    "fit_residual",
                ],
                rows,
            )
            csvs.append(path)
            all_failures.extend(failures)
    return csvs, all_failures


def _figure_5(args: argparse.Namespace, out: str) -> Tuple[List[str], List[Dict[str, str]]]:
    K_values = _float_list(args.K_list) if args.K_list else [0.5, 2.0, 8.0]
    lambda_values = (
        _float_list(args.lambda_list)
        if args.lambda_list
        else [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    )
    csvs: List[str] = []
    all_failures: List[Dict[str, str]] = []

    def worker(point: Tuple) -> Tuple:
        K, lam = point
        model = make_preset("landman", {"lambda": lam, "K": K})
        solve = solve_implicit_speed(model)
        report = weak_coupling_report(model, solve)
        if args.no_sim:
            sim, resid = float("nan"), float("nan")
        else:
            cfg = _sim_cfg_for_sweep(args, L=360.0, dx=0.1, T=150.0)
            sim_res = simulate_two_species(model, cfg)
            sim, resid = sim_res.fitted_speed, sim_res.fit_residual
        return (
            lam,
            solve.c,
            solve.c_linear,
            solve.epsilon,
            report.valid,
            sim,
            resid,
        )

    for K in K_values:
        rows, failures = _sweep([(K, lam) for lam in lambda_values], worker)
        path = os.path.join(out, f"figure5_K{K:g}.csv")
        _write_csv(
            path,
            [
                "lambda",
                "c_lb",
                "c_linear",
                "epsilon",
                "valid",
                "simulated",
                "fit_residual",
            ],
            rows,
        )
        csvs.append(path)
        all_failures.extend(failures)
    return csvs, all_failures


_FIGURES = {1: _figure_1, 2: _figure_2, 3: _figure_3, 4: _figure_4, 5: _figure_5}


def _cmd_figure(args: argparse.Namespace, argv: Sequence[str]) -> int:
    t0 = time.monotonic()
    os.makedirs(args.out, exist_ok=True)
    csvs, failures = _FIGURES[args.n](args, args.out)
    _emit({"csvs": csvs, "failures": failures})
    _write_manifest(
        args.out,
        f"figure{args.n}_manifest.json",
        argv,
        {"figure": args.n},
        csvs,
        t0,
    )
    return EXIT_PARTIAL if failures else EXIT_OK


# ----------------------------------------------------------------------
# parser / entry point
# ----------------------------------------------------------------------


def _add_sim_flags(
    p: argparse.ArgumentParser, L: float, dx: float, T: float
) -> None:
    p.add_argument("--L", type=float, default=L)
    p.add_argument("--dx", type=float, default=dx)
    p.add_argument("--T", type=float, default=T)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--level", type=float, default=0.1)
    p.add_argument(
        "--snapshot", action="append", type=float, metavar="TIME",
        help="profile snapshot time (repeatable; default T/2 and T)",
    )
    p.add_argument("--ic", choices=("step", "smoothed_step", "uniform"), default="step")
    p.add_argument("--ic-width", type=float, default=1.0, dest="ic_width")
    p.add_argument("--ic-value", type=float, default=0.5, dest="ic_value")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavebound",
        description="Travelling-wave speed bounds and validating simulations.",
    )
    parser.add_argument(
        "--version", action="version", version=f"wavebound {__version__}"
    )
    top = parser.add_subparsers(dest="command", required=True)

    bound = top.add_parser("bound", help="compute speed bounds")
    bsub = bound.add_subparsers(dest="target", required=True)
    b_scalar = bsub.add_parser("scalar", help="single-species variational bound")
    _add_scalar_model_flags(b_scalar)
    b_scalar.add_argument("--out", default=".")
    b_scalar.set_defaults(handler=_cmd_bound_scalar)
    b_two = bsub.add_parser("two-species", help="coupled self-consistent speed")
    _add_two_model_flags(b_two)
    b_two.add_argument("--out", default=".")
    b_two.set_defaults(handler=_cmd_bound_two)
    b_fs = bsub.add_parser("fisher-stefan", help="moving-boundary bound")
    b_fs.add_argument("--kappa", type=float, required=True)
    b_fs.add_argument("--out", default=".")
    b_fs.set_defaults(handler=_cmd_bound_fs)

    crit = top.add_parser("criterion", help="pushed/pulled classification")
    _add_scalar_model_flags(crit)
    crit.add_argument("--out", default=".")
    crit.set_defaults(handler=_cmd_criterion)

    sim = top.add_parser("simulate", help="finite-difference runs")
    ssub = sim.add_subparsers(dest="target", required=True)
    s_scalar = ssub.add_parser("scalar")
    _add_scalar_model_flags(s_scalar)
    _add_sim_flags(s_scalar, L=400.0, dx=0.1, T=150.0)
    s_scalar.add_argument("--out", default=".")
    s_scalar.set_defaults(handler=_cmd_simulate_scalar)
    s_two = ssub.add_parser("two-species")
    _add_two_model_flags(s_two)
    _add_sim_flags(s_two, L=360.0, dx=0.1, T=150.0)
    s_two.add_argument("--out", default=".")
    s_two.set_defaults(handler=_cmd_simulate_two)
    s_fs = ssub.add_parser("stefan")
    s_fs.add_argument("--kappa", type=float, required=True)
    _add_sim_flags(s_fs, L=60.0, dx=0.1, T=150.0)
    s_fs.add_argument("--out", default=".")
    s_fs.set_defaults(handler=_cmd_simulate_stefan)

    fig = top.add_parser("figure", help="standard sweep data (CSV per curve)")
    fig.add_argument("n", type=int, choices=(1, 2, 3, 4, 5))
    fig.add_argument("--out", default=".")
    fig.add_argument("--no-sim", action="store_true", dest="no_sim",
                     help="skip simulations; write bound columns only")
    fig.add_argument("--m-list", dest="m_list", help="figure 1: comma-separated m")
    fig.add_argument("--n-list", dest="n_list", help="figure 1: comma-separated n")
    fig.add_argument("--alpha-list", dest="alpha_list", help="figure 2")
    fig.add_argument("--a-list", dest="a_list", help="figure 2")
    fig.add_argument("--kappa-list", dest="kappa_list", help="figures 3 and 4")
    fig.add_argument("--nu-list", dest="nu_list", help="figure 4")
    fig.add_argument("--lambda-list", dest="lambda_list", help="figure 5")
    fig.add_argument("--K-list", dest="K_list", help="figure 5")
    fig.add_argument("--sim-T", dest="sim_T", type=float, default=None)
    fig.add_argument("--sim-L", dest="sim_L", type=float, default=None)
    fig.add_argument("--sim-dx", dest="sim_dx", type=float, default=None)
    fig.set_defaults(handler=_cmd_figure)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args, argv)
    except (ModelError, ConfigError, ExprSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except NonConvergenceError as exc:
        detail = ""
        if exc.bracket is not None:
            detail = f" (last bracket: [{exc.bracket[0]:.6g}, {exc.bracket[1]:.6g}])"
        print(f"error: {exc}{detail}", file=sys.stderr)
        return EXIT_NONCONV
    except InstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSTABILITY
    except FrontTrackingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FRONT


if __name__ == "__main__":
    sys.exit(main())
