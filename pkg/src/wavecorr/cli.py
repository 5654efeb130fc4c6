"""Command-line entry points.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 the run
could not start (bad config, unknown kind, or a budget refusal).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .correlator import (
    AmplitudeGrid,
    GridBudgetError,
    correlator_bruteforce,
    correlator_metropolis,
)
from .experiments import (
    KINDS,
    CheckResult,
    DataSeries,
    ExperimentConfig,
    ResultRecord,
    RunManifest,
    config_hash,
    load_summary,
    run_experiment,
    verify_claims,
    write_run,
)
from .lattice import (
    BoundaryPair,
    DiscreteWaveFunction,
    LatticeSpec,
    make_gaussian,
    make_homogeneous,
    make_inhomogeneous,
    random_wave,
)
from .measure import QuadratureBudgetError
from .operators import (
    HamiltonianSpec,
    expectations,
    hamiltonian_matrix,
    validate_boundary_pair,
)
from .propagator import PropagatorSpec, step_matrix


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def _check_seed(seed: int) -> int:
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    return seed


def _lattice_from(config: dict, overrides: dict | None = None) -> LatticeSpec:
    fields = dict(config.get("lattice", {}))
    fields.update(overrides or {})
    return LatticeSpec(**fields)


def _hamiltonian_from(config: dict) -> HamiltonianSpec:
    fields = dict(config.get("hamiltonian", {"kind": "free"}))
    return HamiltonianSpec(**fields)


def _state_from(lat: LatticeSpec, spec: dict, rng) -> DiscreteWaveFunction:
    kind = spec.get("type", "homogeneous")
    if kind == "homogeneous":
        return make_homogeneous(lat)
    if kind == "inhomogeneous":
        return make_inhomogeneous(lat, spec["peak_density"], spec.get("peak_site", 0))
    if kind == "gaussian":
        return make_gaussian(
            lat, spec["center_site"], spec["width_sites"], spec.get("wavenumber", 0.0)
        )
    if kind == "random":
        return random_wave(lat, rng)
    if kind == "amplitudes":
        amps = np.array([complex(re, im) for re, im in spec["values"]])
        return DiscreteWaveFunction.from_unnormalized(lat, amps)
    raise ValueError(f"unknown state type {kind!r}")


def _print_checks(checks: dict) -> bool:
    all_passed = True
    for name, c in checks.items():
        status = "PASS" if c.passed else "FAIL"
        all_passed &= c.passed
        print(f"[{status}] {name}: margin={c.margin:.6g} {c.detail}")
    return all_passed


def _persist(record, checks, out_dir, seed):
    stamp = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
    manifest = RunManifest(
        config_hash=config_hash(record.config),
        seed=seed,
        code_version=__version__,
        started=stamp,
        finished=stamp,
        checks={name: c.passed for name, c in checks.items()},
    )
    write_run(record, manifest, out_dir, seed)
    print(f"wrote {out_dir}")


# === subcommands ===


def _cmd_ratios(args) -> int:
    overrides = _load_config(args.config)
    config = ExperimentConfig.build(
        "ratios_sweep", overrides, seed=_check_seed(args.seed), out_dir=args.out
    )
    record, _ = run_experiment(config)
    for key, value in record.metrics.items():
        print(f"{key} = {value:.6g}")
    return 0 if _print_checks(record.checks) else 1


def _cmd_propagate(args) -> int:
    config = _load_config(args.config)
    steps = int(config.get("steps", 200))
    if steps < 1:
        raise ValueError("steps must be positive")
    lat = _lattice_from(
        config if "lattice" in config else {"lattice": {"sites": 8, "spacing": 0.25}}
    )
    h = _hamiltonian_from(config if "hamiltonian" in config else {"hamiltonian": {"kind": "harmonic"}})
    rng = np.random.default_rng(np.random.SeedSequence(_check_seed(args.seed)))
    psi0 = _state_from(
        lat,
        config.get("initial", {"type": "gaussian", "center_site": (lat.sites - 1) / 2, "width_sites": 1.2}),
        rng,
    )
    prop = PropagatorSpec(h, lat.dt)
    u = step_matrix(prop, lat)
    hmat = hamiltonian_matrix(h, lat)
    e0, _ = expectations(psi0, h)
    amps = psi0.amplitudes
    rows = []
    worst_norm = 0.0
    worst_energy = 0.0
    for t in range(1, steps + 1):
        amps = u @ amps
        norm_err = abs(lat.spacing * float(np.sum(np.abs(amps) ** 2)) - 1.0)
        energy = float((lat.spacing * np.vdot(amps, hmat @ amps)).real)
        rows.append((t, norm_err, abs(energy - e0)))
        worst_norm = max(worst_norm, norm_err)
        worst_energy = max(worst_energy, abs(energy - e0))
    # reverse pass: undo every step with the inverse map and compare
    back = amps.copy()
    u_inv = u.conj().T
    for _ in range(steps):
        back = u_inv @ back
    revert_err = float(
        np.sqrt(lat.spacing * np.sum(np.abs(back - psi0.amplitudes) ** 2))
    )
    checks = {
        "norm_preserved": CheckResult(worst_norm <= 1e-10, 1e-10 - worst_norm, f"{steps} steps"),
        "energy_preserved": CheckResult(worst_energy <= 1e-8, 1e-8 - worst_energy, ""),
        "reversible": CheckResult(revert_err <= 1e-8, 1e-8 - revert_err, "forward then inverse"),
    }
    metrics = {
        "worst_norm_error": worst_norm,
        "worst_energy_error": worst_energy,
        "reversal_error": revert_err,
        "steps": float(steps),
    }
    print(f"norm drift {worst_norm:.3e}, energy drift {worst_energy:.3e}, reversal {revert_err:.3e}")
    ok = _print_checks(checks)
    if args.out:
        record = ResultRecord(
            kind="propagate",
            config={"kind": "propagate", "options": config, "seed": args.seed},
            metrics=metrics,
            checks=checks,
            series=[DataSeries("drift", ("step", "norm_error", "energy_error"), rows)],
        )
        _persist(record, checks, args.out, args.seed)
    return 0 if ok else 1


def _cmd_correlator(args) -> int:
    config = _load_config(args.config)
    if not config:
        raise ValueError("correlator requires --config with lattice, hamiltonian and states")
    lat = _lattice_from(config)
    h = _hamiltonian_from(config)
    rng = np.random.default_rng(np.random.SeedSequence(_check_seed(args.seed)))
    psi1 = _state_from(lat, config.get("psi1", {"type": "homogeneous"}), rng)
    psi2 = _state_from(lat, config.get("psi2", {"type": "homogeneous"}), rng)
    pair = BoundaryPair(
        psi1, psi2, int(config.get("t1", 0)), int(config.get("t2", lat.time_slices - 1))
    )
    grid_cfg = config.get("grid", {})
    grid = AmplitudeGrid(
        prob_quanta=int(grid_cfg.get("prob_quanta", lat.prob_quanta)),
        phase_points=int(grid_cfg.get("phase_points", 8)),
    )
    validation = validate_boundary_pair(pair, h)
    print(
        f"boundary compatibility: {'ok' if validation.passed else 'MISMATCH'} "
        f"(energy {validation.energy_residual:.3e}, momentum {validation.momentum_residual:.3e})"
    )
    method = config.get("method", "bruteforce")
    if method == "bruteforce":
        est = correlator_bruteforce(pair, h, grid, budget=args.budget)
    elif method == "metropolis":
        est = correlator_metropolis(
            pair,
            h,
            chains=int(config.get("chains", 8)),
            steps=int(config.get("steps", 20000)),
            seed=_check_seed(args.seed),
            grid=grid,
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    print(f"C = {est.value.real:.17g} + {est.value.imag:.17g}i")
    print(f"|C| = {abs(est.value):.17g}  error {est.abs_error:.3g}  points {est.n_points}")
    print(f"sign diagnostic {est.sign_diagnostic:.6g}" + ("  UNRELIABLE" if est.unreliable else ""))
    for w in est.warnings:
        print(f"warning: {w}")
    checks = {
        "sign_reliable": CheckResult(
            not est.unreliable, est.sign_diagnostic - 0.01, "phase-average magnitude"
        )
    }
    if args.out:
        record = ResultRecord(
            kind="correlator",
            config={"kind": "correlator", "options": config, "seed": args.seed},
            metrics={
                "value_re": est.value.real,
                "value_im": est.value.imag,
                "magnitude": abs(est.value),
                "abs_error": est.abs_error,
                "n_points": float(est.n_points),
                "sign_diagnostic": est.sign_diagnostic,
            },
            checks=checks,
            series=[],
        )
        _persist(record, checks, args.out, args.seed)
    return 0 if not est.unreliable else 1


def _cmd_experiment(args) -> int:
    overrides = _load_config(args.config)
    out = args.out or os.path.join("runs", args.kind)
    config = ExperimentConfig.build(
        args.kind, overrides, seed=_check_seed(args.seed), out_dir=out
    )
    record, manifest = run_experiment(config)
    print(f"experiment {args.kind} (config {manifest.config_hash[:12]})")
    for key, value in record.metrics.items():
        print(f"{key} = {value:.6g}")
    ok = _print_checks(record.checks)
    print(f"wrote {out}")
    return 0 if ok else 1


def _cmd_verify(args) -> int:
    root = args.out
    if not os.path.isdir(root):
        raise ValueError(f"no run directory at {root!r}")
    summaries = []
    for entry in sorted(os.listdir(root)):
        path = os.path.join(root, entry)
        if os.path.isfile(os.path.join(path, "summary.json")):
            summaries.append(load_summary(path))
    rows = verify_claims(summaries)
    failed = False
    for row in rows:
        margin = "" if row.margin is None else f" margin={row.margin:.6g}"
        print(f"[{row.status.upper():7s}] {row.claim} ({row.source_kind}){margin}")
        if row.status == "fail":
            failed = True
            print(f"          {row.detail}")
    if not summaries:
        print("no persisted runs found")
        return 1
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wavecorr",
        description="lattice wave-function correlator laboratory",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ratios", help="analytic measure-contribution ratios")
    p.add_argument("--config", help="JSON file overriding sweep options")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="persist the sweep as a run directory")
    p.set_defaults(func=_cmd_ratios)

    p = sub.add_parser("propagate", help="reference dynamics drift checks")
    p.add_argument("--config", help="JSON file with lattice/hamiltonian/initial/steps")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="persist drift series as a run directory")
    p.set_defaults(func=_cmd_propagate)

    p = sub.add_parser("correlator", help="boundary-correlator point estimate")
    p.add_argument("--config", required=True, help="JSON run description")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=100_000_000, help="max grid points")
    p.add_argument("--out", help="persist the estimate as a run directory")
    p.set_defaults(func=_cmd_correlator)

    p = sub.add_parser("experiment", help="run one named experiment")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--config", help="JSON file overriding experiment options")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="run directory (default runs/<kind>)")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("verify", help="recompute claim status from persisted runs")
    p.add_argument("--out", required=True, help="directory holding run subdirectories")
    p.set_defaults(func=_cmd_verify)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GridBudgetError, QuadratureBudgetError) as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
