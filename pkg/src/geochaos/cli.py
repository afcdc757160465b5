"""Command-line entry point.

Subcommands: ``metric``, ``curvature``, ``geodesic``, ``jacobi``, ``ige``,
``experiment``.  Every subcommand takes ``--config`` pointing at a JSON file
that either names one of the four experiment models (with its parameters) or
lists raw families.  ``experiment`` runs the full pipeline and writes
``report.json``, ``geodesic.csv``, ``jacobi.csv`` (where applicable), and
``ige.csv`` under ``<output_dir>/<model>_seed<seed>/``.

Exit codes: 0 success, 1 configuration error, 2 numerical error (domain
exit, stiffness, quadrature failure), 64 unknown subcommand.  Errors are
serialized to stderr as JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import entropy, models, serialize
from .curvature import riemann_ricci_scalar
from .dynamics import (
    fit_exponential_rate,
    integrate_geodesic,
    integrate_jacobi,
    orthogonal_unit_deviation,
)
from .errors import (
    ConfigError,
    DomainError,
    DomainExitError,
    GeochaosError,
    QuadratureError,
    SingularMetricError,
    StiffnessError,
)
from .manifold import fisher_metric_analytic, make_family, product_manifold

MODELS = ("gaussian_ed", "iho", "spin_integrable", "spin_chaotic")
SUBCOMMANDS = ("metric", "curvature", "geodesic", "jacobi", "ige", "experiment")

_NUMERICAL_ERRORS = (
    DomainExitError,
    StiffnessError,
    QuadratureError,
    SingularMetricError,
    DomainError,
)

COMMON_DEFAULTS = {
    "tol": 1e-9,
    "tau_grid_points": 601,
    "seed": 0,
    "output_dir": "out",
    "floor": 1e-3,
    "tau_min": 0.1,
    "window": 0.5,
}

MODEL_DEFAULTS = {
    "gaussian_ed": {"l": 1, "c": 0.5, "mu0": 0.0, "sigma0": 1.0, "tau_max": 30.0},
    "iho": {
        "l": 1,
        "omega_mean": 1.0,
        "omega_std": 0.0,
        "omegas": None,
        "members": 1,
        "theta0": 0.1,
        "tau_max": 40.0,
        "tau_grid_points": 801,
    },
    "spin_integrable": {"a": 0.5, "b": 0.5, "tau_max": 50.0, "tau_grid_points": 1001},
    "spin_chaotic": {"c": 0.5, "tau_max": 40.0, "tau_grid_points": 801},
}


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def _require_number(cfg, key, lo=None, hi=None, lo_open=False, hi_open=False):
    value = cfg[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, "must be a number")
    value = float(value)
    if lo is not None and (value < lo or (lo_open and value == lo)):
        raise ConfigError(key, f"must be {'>' if lo_open else '>='} {lo}")
    if hi is not None and (value > hi or (hi_open and value == hi)):
        raise ConfigError(key, f"must be {'<' if hi_open else '<='} {hi}")
    return value


def _require_int(cfg, key, lo=None, hi=None):
    value = cfg[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(key, "must be an integer")
    if lo is not None and value < lo:
        raise ConfigError(key, f"must be >= {lo}")
    if hi is not None and value > hi:
        raise ConfigError(key, f"must be <= {hi}")
    return value


def load_config(path):
    path = Path(path)
    if not path.exists():
        raise ConfigError(str(path), "config file does not exist")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(str(path), "config must be a JSON object")
    return validate_config(raw)


def validate_config(raw):
    """Normalize a raw config dict, rejecting bad fields with their path."""
    if ("model" in raw) == ("families" in raw):
        raise ConfigError("model", "config needs exactly one of 'model', 'families'")
    cfg = dict(COMMON_DEFAULTS)
    if "model" in raw:
        model = raw["model"]
        if model not in MODELS:
            raise ConfigError("model", f"must be one of {', '.join(MODELS)}")
        cfg.update(MODEL_DEFAULTS[model])
    cfg.update(raw)

    _require_number(cfg, "tol", lo=1e-12, hi=1e-3)
    _require_number(cfg, "tau_max", lo=0.0, lo_open=True)
    _require_int(cfg, "tau_grid_points", lo=1)
    _require_int(cfg, "seed", lo=0, hi=(1 << 64) - 1)
    _require_number(cfg, "floor", lo=0.0, lo_open=True)
    _require_number(cfg, "tau_min", lo=0.0, lo_open=True)
    _require_number(cfg, "window", lo=0.0, hi=1.0, lo_open=True)
    if not isinstance(cfg["output_dir"], str):
        raise ConfigError("output_dir", "must be a string path")

    if "families" in raw:
        _validate_families(cfg)
        return cfg

    model = cfg["model"]
    if model == "gaussian_ed":
        _require_int(cfg, "l", lo=1, hi=4)
        c = _require_number(cfg, "c")
        if c == 0 or abs(c) > 2.0:
            raise ConfigError("c", "must be nonzero with |c| <= 2")
        _require_number(cfg, "mu0")
        _require_number(cfg, "sigma0", lo=0.0, lo_open=True)
    elif model == "iho":
        _require_int(cfg, "l", lo=1)
        _require_int(cfg, "members", lo=1)
        theta0 = _require_number(cfg, "theta0")
        if theta0 == 0:
            raise ConfigError("theta0", "must be nonzero")
        if cfg.get("omegas") is not None:
            om = cfg["omegas"]
            if not isinstance(om, list) or len(om) != cfg["l"]:
                raise ConfigError("omegas", f"must list {cfg['l']} frequencies")
            for i, w in enumerate(om):
                if not isinstance(w, (int, float)) or w <= 0:
                    raise ConfigError(f"omegas[{i}]", "must be > 0")
        else:
            mean = _require_number(cfg, "omega_mean", lo=0.0, lo_open=True)
            std = _require_number(cfg, "omega_std", lo=0.0)
            if mean <= 3.0 * std:
                raise ConfigError("omega_mean", "must exceed 3 * omega_std")
    elif model == "spin_integrable":
        _require_number(cfg, "a", lo=0.0, lo_open=True)
        _require_number(cfg, "b", lo=0.0, lo_open=True)
    elif model == "spin_chaotic":
        _require_number(cfg, "c", lo=0.0, lo_open=True)
    return cfg


def _validate_families(cfg):
    fams = cfg["families"]
    if not isinstance(fams, list) or not fams:
        raise ConfigError("families", "must be a non-empty list")
    for i, entry in enumerate(fams):
        if not isinstance(entry, dict) or "family" not in entry:
            raise ConfigError(f"families[{i}]", "must be an object with 'family'")
        name = entry["family"]
        params = entry.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError(f"families[{i}].params", "must be an object")
        try:
            make_family(name, **params)
        except GeochaosError as exc:
            key = "sigma" if "sigma" in str(exc) else "mu"
            raise ConfigError(f"families[{i}].params.{key}", str(exc)) from exc
    for key in ("theta0", "v0"):
        if key in cfg:
            vec = cfg[key]
            if not isinstance(vec, list) or not all(
                isinstance(x, (int, float)) for x in vec
            ):
                raise ConfigError(key, "must be a list of numbers")


# ---------------------------------------------------------------------------
# manifold / initial-data resolution
# ---------------------------------------------------------------------------


def resolve_manifold(cfg):
    """(metric, theta0, v0) for the configured model or family list.

    ``v0`` is None when the config does not define dynamics (bare families
    without a 'v0' entry).
    """
    if "families" in cfg:
        factors = []
        point = []
        for entry in cfg["families"]:
            fam = make_family(entry["family"], **entry.get("params", {}))
            factors.append(fisher_metric_analytic(fam))
            point.extend(fam.params)
        metric = product_manifold(factors)
        theta0 = np.asarray(cfg.get("theta0", point), dtype=float)
        if theta0.shape != (metric.dim,):
            raise ConfigError("theta0", f"must have dimension {metric.dim}")
        v0 = None
        if "v0" in cfg:
            v0 = np.asarray(cfg["v0"], dtype=float)
            if v0.shape != (metric.dim,):
                raise ConfigError("v0", f"must have dimension {metric.dim}")
        return metric, theta0, v0

    model = cfg["model"]
    if model == "gaussian_ed":
        metric = models.gaussian_manifold(cfg["l"])
        theta0 = np.tile([cfg["mu0"], cfg["sigma0"]], cfg["l"])
        v0 = np.tile([0.0, cfg["c"] * cfg["sigma0"]], cfg["l"])
        return metric, theta0, v0
    if model == "spin_integrable":
        return (
            models.spin_integrable_manifold(),
            np.array([1.0, 1.0]),
            np.array([cfg["a"], cfg["b"]]),
        )
    if model == "spin_chaotic":
        return (
            models.spin_chaotic_manifold(),
            np.array([1.0, 0.0, 1.0]),
            np.array([0.0, 0.0, cfg["c"]]),
        )
    # iho: expose the conformal metric at the rest point
    omegas = cfg["omegas"] or [cfg["omega_mean"]] * cfg["l"]
    metric = models.conformal_oscillator_metric(omegas)
    theta0 = np.full(cfg["l"], cfg["theta0"])
    return metric, theta0, None


def parse_point(spec_text, metric, theta0):
    """--point value: 'default', comma floats, or name=value overrides."""
    if spec_text in (None, "default"):
        return np.asarray(theta0, dtype=float)
    parts = [p.strip() for p in spec_text.split(",") if p.strip()]
    if all("=" in p for p in parts) and parts:
        point = np.asarray(theta0, dtype=float).copy()
        names = list(metric.coord_names)
        for part in parts:
            name, _, value = part.partition("=")
            name = name.strip()
            if name not in names:
                raise ConfigError(
                    "point", f"unknown coordinate {name!r}; have {names}"
                )
            point[names.index(name)] = float(value)
        return point
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError("point", f"cannot parse {spec_text!r}") from exc
    if len(values) != metric.dim:
        raise ConfigError("point", f"expected {metric.dim} coordinates")
    return np.asarray(values, dtype=float)


# ---------------------------------------------------------------------------
# experiment pipeline
# ---------------------------------------------------------------------------


def run_experiment(cfg):
    model = cfg["model"]
    if model == "gaussian_ed":
        return models.gaussian_ed_experiment(
            cfg["l"],
            cfg["c"],
            cfg["tau_max"],
            cfg["tol"],
            mu0=cfg["mu0"],
            sigma0=cfg["sigma0"],
            tau_grid_points=cfg["tau_grid_points"],
            floor=cfg["floor"],
            tau_min=cfg["tau_min"],
            window=cfg["window"],
            seed=cfg["seed"],
        )
    if model == "iho":
        return models.iho_experiment(
            cfg["l"],
            cfg["omega_mean"],
            cfg["omega_std"],
            cfg["members"],
            cfg["seed"],
            cfg["tau_max"],
            omegas=cfg["omegas"],
            theta0=cfg["theta0"],
            tol=cfg["tol"],
            tau_grid_points=cfg["tau_grid_points"],
            floor=cfg["floor"],
            tau_min=cfg["tau_min"],
            window=cfg["window"],
        )
    if model == "spin_integrable":
        return models.spin_chain_integrable_experiment(
            cfg["a"],
            cfg["b"],
            cfg["tau_max"],
            cfg["tol"],
            tau_grid_points=cfg["tau_grid_points"],
            floor=cfg["floor"],
            tau_min=cfg["tau_min"],
            window=cfg["window"],
            seed=cfg["seed"],
        )
    if model == "spin_chaotic":
        return models.spin_chain_chaotic_experiment(
            cfg["c"],
            cfg["tau_max"],
            cfg["tol"],
            tau_grid_points=cfg["tau_grid_points"],
            floor=cfg["floor"],
            tau_min=cfg["tau_min"],
            window=cfg["window"],
            seed=cfg["seed"],
        )
    raise ConfigError("model", f"experiment pipeline undefined for {model!r}")


def output_dir(cfg):
    base = os.environ.get("IGAC_OUTPUT_DIR", cfg["output_dir"])
    return Path(base)


def experiment_dir(cfg):
    if "model" not in cfg:
        raise ConfigError("model", "experiment stages need a model config")
    return output_dir(cfg) / f"{cfg['model']}_seed{cfg['seed']}"


def write_experiment_files(report, outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {}
    traj = report.trajectory
    dim = traj.dim
    header = (
        ["tau"]
        + [f"theta_{k}" for k in range(dim)]
        + [f"thetadot_{k}" for k in range(dim)]
        + ["speed"]
    )
    cols = (
        [traj.tau]
        + [traj.theta[:, k] for k in range(dim)]
        + [traj.theta_dot[:, k] for k in range(dim)]
        + [traj.speed]
    )
    paths["geodesic"] = serialize.write_csv(outdir / "geodesic.csv", header, cols)
    if report.jacobi is not None:
        jac = report.jacobi
        header = ["tau"] + [f"j_{k}" for k in range(dim)] + ["intensity"]
        cols = [jac.tau] + [jac.j[:, k] for k in range(dim)] + [jac.intensity]
        paths["jacobi"] = serialize.write_csv(outdir / "jacobi.csv", header, cols)
    ige = report.ige
    paths["ige"] = serialize.write_csv(
        outdir / "ige.csv", ["tau", "volume", "ige"], [ige.tau, ige.volume, ige.ige]
    )
    paths["report"] = serialize.write_json(outdir / "report.json", report.summary())
    return paths


def run(config_path):
    """Full pipeline for a config file; returns the process exit status."""
    try:
        cfg = load_config(config_path)
        if "model" not in cfg:
            raise ConfigError("model", "the experiment pipeline needs a model config")
        report = run_experiment(cfg)
        paths = write_experiment_files(report, experiment_dir(cfg))
    except ConfigError as exc:
        _print_error(exc)
        return 1
    except _NUMERICAL_ERRORS as exc:
        _print_error(exc)
        return 2
    print(serialize.dumps_json({str(k): str(v) for k, v in paths.items()}))
    return 0


def _print_error(exc):
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, DomainExitError):
        payload["tau"] = exc.tau
        payload["state"] = np.asarray(exc.state).tolist()
    if isinstance(exc, ConfigError):
        payload["field"] = exc.path
    print(json.dumps(payload), file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_metric(cfg, args):
    metric, theta0, _ = resolve_manifold(cfg)
    point = parse_point(args.point, metric, theta0)
    metric.check_interior(point)
    g = metric.value(point)
    print(
        serialize.dumps_json(
            {"coords": list(metric.coord_names), "point": point, "g": g}
        )
    )
    return 0


def _cmd_curvature(cfg, args):
    metric, theta0, _ = resolve_manifold(cfg)
    point = parse_point(args.point, metric, theta0)
    metric.check_interior(point)
    report = riemann_ricci_scalar(metric, point)
    payload = report.to_dict()
    payload["coords"] = list(metric.coord_names)
    print(serialize.dumps_json(payload))
    return 0


def _trajectory_for_stage(cfg, args):
    tau_max = args.tau_max if args.tau_max is not None else cfg["tau_max"]
    n = max(int(cfg["tau_grid_points"]), 201)
    if cfg.get("model") == "iho":
        omegas = cfg["omegas"] or [cfg["omega_mean"]] * cfg["l"]
        from .manifold import euclidean_metric

        metric = euclidean_metric(cfg["l"])
        traj = models.oscillator_flow(
            omegas, cfg["theta0"], tau_max, tol=cfg["tol"], n_samples=n
        )
        return metric, traj, None
    metric, theta0, v0 = resolve_manifold(cfg)
    if v0 is None:
        raise ConfigError("v0", "dynamics stages need an initial velocity")
    traj = integrate_geodesic(metric, theta0, v0, tau_max, tol=cfg["tol"], n_samples=n)
    return metric, traj, v0


def _stage_dir(cfg):
    if "model" in cfg:
        return experiment_dir(cfg)
    d = output_dir(cfg) / f"families_seed{cfg['seed']}"
    return d


def _cmd_geodesic(cfg, args):
    metric, traj, _ = _trajectory_for_stage(cfg, args)
    outdir = _stage_dir(cfg)
    outdir.mkdir(parents=True, exist_ok=True)
    dim = traj.dim
    header = (
        ["tau"]
        + [f"theta_{k}" for k in range(dim)]
        + [f"thetadot_{k}" for k in range(dim)]
        + ["speed"]
    )
    cols = (
        [traj.tau]
        + [traj.theta[:, k] for k in range(dim)]
        + [traj.theta_dot[:, k] for k in range(dim)]
        + [traj.speed]
    )
    path = serialize.write_csv(outdir / "geodesic.csv", header, cols)
    print(
        serialize.dumps_json(
            {"csv": str(path), "samples": traj.tau.size, "speed_drift": traj.speed_drift()}
        )
    )
    return 0


def _cmd_jacobi(cfg, args):
    if cfg.get("model") == "iho":
        raise ConfigError("model", "jacobi stage is not defined for the iho model")
    metric, traj, v0 = _trajectory_for_stage(cfg, args)
    direction = np.zeros(metric.dim)
    direction[0] = 1.0
    if abs(v0[0]) > 0 and metric.dim > 1:
        direction = np.zeros(metric.dim)
        direction[1] = 1.0
    j_dot0 = orthogonal_unit_deviation(metric, traj.theta[0], v0, direction)
    jac = integrate_jacobi(metric, traj, np.zeros(metric.dim), j_dot0)
    outdir = _stage_dir(cfg)
    outdir.mkdir(parents=True, exist_ok=True)
    dim = metric.dim
    header = ["tau"] + [f"j_{k}" for k in range(dim)] + ["intensity"]
    cols = [jac.tau] + [jac.j[:, k] for k in range(dim)] + [jac.intensity]
    path = serialize.write_csv(outdir / "jacobi.csv", header, cols)
    rate, amplitude, residual = fit_exponential_rate(
        jac.tau, jac.intensity, window=cfg["window"]
    )
    print(
        serialize.dumps_json(
            {
                "csv": str(path),
                "rate": rate,
                "amplitude": amplitude,
                "residual": residual,
            }
        )
    )
    return 0


def _cmd_ige(cfg, args):
    metric, traj, _ = _trajectory_for_stage(cfg, args)
    series = entropy.ige_series(
        metric,
        traj,
        tau_min=cfg["tau_min"],
        floor=cfg["floor"],
        window=cfg["window"],
    )
    outdir = _stage_dir(cfg)
    outdir.mkdir(parents=True, exist_ok=True)
    path = serialize.write_csv(
        outdir / "ige.csv",
        ["tau", "volume", "ige"],
        [series.tau, series.volume, series.ige],
    )
    payload = series.growth.to_dict()
    payload["csv"] = str(path)
    print(serialize.dumps_json(payload))
    return 0


def _cmd_experiment(cfg, args):
    report = run_experiment(cfg)
    paths = write_experiment_files(report, experiment_dir(cfg))
    payload = report.summary()
    payload["files"] = {str(k): str(v) for k, v in paths.items()}
    print(serialize.dumps_json(payload))
    return 0


_HANDLERS = {
    "metric": _cmd_metric,
    "curvature": _cmd_curvature,
    "geodesic": _cmd_geodesic,
    "jacobi": _cmd_jacobi,
    "ige": _cmd_ige,
    "experiment": _cmd_experiment,
}


def _usage():
    return (
        "usage: geochaos {metric|curvature|geodesic|jacobi|ige|experiment} "
        "--config CONFIG [--point POINT] [--tau-max TAU] [--output-dir DIR]"
    )


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(_usage())
        return 0
    command = argv[0]
    if command not in SUBCOMMANDS:
        print(_usage(), file=sys.stderr)
        print(f"unknown subcommand: {command!r}", file=sys.stderr)
        return 64
    parser = argparse.ArgumentParser(prog=f"geochaos {command}", add_help=True)
    parser.add_argument("--config", required=True, help="path to the JSON config")
    parser.add_argument("--point", default=None, help="'default', floats, or k=v list")
    parser.add_argument("--tau-max", type=float, default=None, dest="tau_max")
    parser.add_argument("--output-dir", default=None, dest="output_dir")
    args = parser.parse_args(argv[1:])
    try:
        cfg = load_config(args.config)
        if args.output_dir is not None:
            cfg["output_dir"] = args.output_dir
        return _HANDLERS[command](cfg, args)
    except ConfigError as exc:
        _print_error(exc)
        return 1
    except _NUMERICAL_ERRORS as exc:
        _print_error(exc)
        return 2


def console_main():
    raise SystemExit(main())
