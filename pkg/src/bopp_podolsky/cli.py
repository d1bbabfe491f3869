"""Command-line front end: ``bopp-podolsky <command> [flags]``.

Every command writes its outputs and a ``manifest.json`` into ``--out``.
Exit codes: 0 success, 1 numerical failure, 2 invalid input, 3 hypotheses
of an experiment not met by the supplied data.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    HypothesisError,
    default_dt,
    evolve,
    free_window,
    global_trial,
    instability_experiment,
    virial_check,
)
from .fields import Field, FieldError, ModelParams, gaussian
from .functionals import FiberError
from .grid import GridError, make_radial_grid
from .io import FieldFileError, read_field, sha256_file, write_csv, write_field, write_json
from .kernel import KernelError, cross_validate

EXIT_OK, EXIT_NUMERIC, EXIT_INPUT, EXIT_HYPOTHESIS = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass
class RunManifest:
    command: str
    params: dict
    grid: dict | None
    seeds: list = field(default_factory=list)
    version: str = __version__
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    def write(self, out: Path) -> Path:
        for name in list(self.outputs):
            self.outputs[name] = sha256_file(out / name)
        return write_json(asdict(self), out / "manifest.json")


# -- flag parsing -------------------------------------------------------------


def parse_grid(text: str | None):
    """'NxR' -> (N, R); R may be omitted ('4096x') to keep the default extent."""
    if text is None:
        return None
    try:
        n, _, r = str(text).lower().partition("x")
        return int(n), (float(r) if r else None)
    except ValueError as exc:
        raise InputError(f"bad --grid {text!r}, expected NxR") from exc


def parse_ladder(text: str):
    """'a:b:n' -> (a, b, n)."""
    try:
        a, b, n = str(text).split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError as exc:
        raise InputError(f"bad --m-ladder {text!r}, expected a:b:n") from exc
    if n < 2 or a <= 0 or b <= 0 or a == b:
        raise InputError(f"bad --m-ladder {text!r}: need n >= 2 and distinct positive ends")
    return a, b, n


def parse_init(text: str | None):
    """'kappa:theta' or 'gaussian:width' -> (kind, value)."""
    if text is None:
        return None
    kind, _, val = str(text).partition(":")
    if kind not in ("kappa", "gaussian"):
        raise InputError(f"bad --init {text!r}, expected kappa:THETA or gaussian:WIDTH")
    try:
        return kind, float(val)
    except ValueError as exc:
        raise InputError(f"bad --init value in {text!r}") from exc


def _common(sp, m=True):
    sp.add_argument("--config", help="JSON file of flag values; explicit flags take precedence")
    sp.add_argument("--p", type=float, help="nonlinearity exponent in (2,6)")
    sp.add_argument("--a", type=float, help="kernel length (default 1)")
    if m:
        sp.add_argument("--m", type=float, help="L^2 norm of the solution")
    sp.add_argument("--grid", help="NxR; for ground states R is the extent of the Q grid")
    sp.add_argument("--out", help="output directory (default: ./<command>)")
    sp.add_argument("--tol", type=float, help="convergence tolerance")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bopp-podolsky", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("q-solve", help="free profile Q and its integral identities")
    _common(sp, m=False)

    sp = sub.add_parser("ground-state", help="normalized ground state u_m")
    _common(sp)
    sp.add_argument("--seed", type=int, help="random positive initial guess from this seed")
    sp.add_argument("--from", dest="from_", help="initial guess from a field file")

    sp = sub.add_parser("gamma-curve", help="gamma(m) on an evenly spaced mass range")
    _common(sp, m=False)
    sp.add_argument("--m-ladder", help="a:b:n, n evenly spaced masses from a to b")

    sp = sub.add_parser("asymptotics", help="limit ratios along a geometric mass ladder")
    _common(sp, m=False)
    sp.add_argument("--m-ladder", help="a:b:n, n geometrically spaced masses from a to b")

    sp = sub.add_parser("evolve", help="time evolution and the stability experiments")
    _common(sp)
    sp.add_argument("--from", dest="from_", help="field file (a ground state for kappa:THETA)")
    sp.add_argument("--init", help="kappa:THETA (dilate --from) or gaussian:WIDTH")
    sp.add_argument("--dt", type=float, help="time step (default: 0.01 of the shortest intrinsic time scale)")
    sp.add_argument("--T", type=float, help="horizon; negative integrates backwards")
    sp.add_argument("--sample-every", type=int, help="steps between monitor samples")
    sp.add_argument("--adaptive", action="store_true", default=None)
    sp.add_argument("--linear-only", action="store_true", default=None, help="drop both potentials")
    sp.add_argument("--refine", type=int, help="grid refinement factor for kappa data with THETA > 0")
    sp.add_argument("--checkpoint-interval", type=float, help="wall seconds between checkpoints")

    sp = sub.add_parser("validate-kernel", help="radial O(N) path against the box FFT path")
    sp.add_argument("--config")
    sp.add_argument("--a", type=float)
    sp.add_argument("--out")
    return ap


DEFAULTS = {
    "tol": None,
    "T": 10.0,
    "sample_every": 10,
    "adaptive": False,
    "linear_only": False,
    "refine": 8,
    "checkpoint_interval": 60.0,
}


def resolve_args(argv=None) -> argparse.Namespace:
    """Parse flags; values from --config fill whatever was not given explicitly."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise InputError("config must be a JSON object")
        if "params" in cfg and "outputs" in cfg:
            # a manifest from an earlier run: replay its full flag set
            if cfg.get("command") != args.command:
                raise InputError(f"manifest is for {cfg.get('command')!r}, not {args.command!r}")
            cfg = cfg["params"]
        for k, v in cfg.items():
            key = k.replace("-", "_")
            key = "from_" if key == "from" else key
            if not hasattr(args, key):
                raise InputError(f"unknown config key {k!r} for {args.command}")
            if getattr(args, key) is None:
                setattr(args, key, v)
    for k, v in DEFAULTS.items():
        if hasattr(args, k) and getattr(args, k) is None:
            setattr(args, k, v)
    if args.out is None:
        args.out = args.command
    return args


def _params(args, need_m=True) -> ModelParams:
    if args.p is None:
        raise InputError("--p is required")
    m = getattr(args, "m", None)
    if need_m and m is None:
        raise InputError("--m is required")
    a = 1.0 if args.a is None else float(args.a)
    return ModelParams(float(args.p), a, float(m) if m is not None else 1.0)


def _record(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("config",)}


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- commands -----------------------------------------------------------------


def cmd_q_solve(args):
    from .solvers import q_at_origin, q_grid, q_identities, solve_Q

    if args.p is None:
        raise InputError("--p is required")
    p = float(args.p)
    if not 2.0 < p < 6.0:
        raise InputError(f"p out of range (2,6): {p}")
    N, R = parse_grid(args.grid) or (4096, None)
    grid = q_grid(p, N, R)
    Q = solve_Q(p, tol=args.tol or 1e-10, grid=grid)
    out = _out(args)
    write_field(Q, out / "Q.bpfld", p=p)
    report = {"p": p, "grid": {"N": grid.N, "h": grid.h, "R": grid.R}, "q0": q_at_origin(Q),
              "q0_shooting": Q.meta["q0_shooting"], **q_identities(Q, p)}
    write_json(report, out / "report.json")
    return out, report, {"N": grid.N, "R": grid.R}, ["Q.bpfld", "report.json"], []


def cmd_ground_state(args):
    from .solvers import ground_state, natural_grid, random_guess

    params = _params(args)
    N, R = parse_grid(args.grid) or (4096, None)
    grid, s = natural_grid(params, N, R)
    init, seeds, inputs = None, [], {}
    if args.from_:
        src = read_field(args.from_)
        inputs[str(args.from_)] = sha256_file(args.from_)
        from .fields import resample_spectral

        init = src if src.grid == grid else resample_spectral(src.with_values(np.abs(src.values)), grid)
    elif args.seed is not None:
        init, seeds = random_guess(grid, s, args.seed), [args.seed]
    res = ground_state(params, grid=grid, scale=s, init=init, tol=args.tol or 1e-8)
    out = _out(args)
    write_field(res.u, out / "ground.bpfld", params.p, params.a, {"omega": res.omega, "level": res.level})
    side = {"params": asdict(params), "grid": {"N": res.u.grid.N, "h": res.u.grid.h}, **res.summary()}
    write_json(side, out / "ground.json")
    if not res.converged:
        raise ArithmeticError("; ".join(res.warnings) or "ground state did not converge")
    return out, side, {"N": N, "R_q": R}, ["ground.bpfld", "ground.json"], seeds, inputs


def cmd_gamma_curve(args):
    from .solvers import gamma_curve

    params = _params(args, need_m=False)
    if not args.m_ladder:
        raise InputError("--m-ladder is required")
    a, b, n = parse_ladder(args.m_ladder)
    ms = np.linspace(min(a, b), max(a, b), n)
    N, _ = parse_grid(args.grid) or (4096, None)
    rows = gamma_curve(params, ms, N=N, tol=args.tol or 1e-8)
    out = _out(args)
    cols = ["m", "gamma", "omega", "scale", "el_residual", "pohozaev", "converged", "error"]
    write_csv(rows, out / "gamma.csv", cols)
    g = np.array([r["gamma"] for r in rows])
    meta = {"params": {"p": params.p, "a": params.a}, "m": ms.tolist(), "columns": cols,
            "nonincreasing": bool(np.all(g[1:] <= g[:-1] * (1 + 1e-4))) if np.all(np.isfinite(g)) else False}
    write_json(meta, out / "gamma.json")
    if any(r["error"] for r in rows):
        raise ArithmeticError("some mass points failed; see gamma.csv")
    return out, meta, {"N": N}, ["gamma.csv", "gamma.json"], []


def cmd_asymptotics(args):
    from .asymptotics import closed_forms, ladder_direction, limit_ratios, omega_limit
    from .solvers import cached_Q, ground_state, natural_grid

    params = _params(args, need_m=False)
    a, b, n = parse_ladder(args.m_ladder or ("0.5:0.0625:4" if ladder_direction(params.p) == "down" else "1:8:4"))
    ms = np.geomspace(a, b, n)
    N, R = parse_grid(args.grid) or (4096, None)
    results = []
    for m in ms:
        pm = params.with_mass(float(m))
        grid, s = natural_grid(pm, N, R)
        results.append(ground_state(pm, grid=grid, scale=s, tol=args.tol or 1e-8))
    Q = cached_Q(params.p, N, R)
    rows = limit_ratios(results, params, Q)
    out = _out(args)
    write_csv(rows, out / "asymptotics.csv")
    cf = closed_forms(params.with_mass(float(ms[0])), Q)
    meta = {"params": {"p": params.p, "a": params.a}, "m": ms.tolist(), "direction": ladder_direction(params.p),
            "limits": {"level_ratio": 1.0, "grad_ratio": 1.0, "nonlocal_ratio": 0.0, "omega_ratio": omega_limit(params.p)},
            "alphas": [cf.alpha1, cf.alpha2, cf.alpha3], "omega0": cf.omega0,
            "converged": [r.converged for r in results]}
    write_json(meta, out / "asymptotics.json")
    return out, meta, {"N": N, "R_q": R}, ["asymptotics.csv", "asymptotics.json"], []


def cmd_evolve(args):
    init = parse_init(args.init)
    inputs = {}
    src = None
    if args.from_:
        src, header = _read_with_header(args.from_)
        inputs[str(args.from_)] = sha256_file(args.from_)
        for k in ("p", "a"):
            if getattr(args, k) is None and header.get(k) is not None:
                setattr(args, k, header[k])
        if args.m is None:
            args.m = src.norm()
    elif args.m is None:
        args.m = 1.0
    params = _params(args)
    out = _out(args)
    ckpt = out / "checkpoint.bpfld"
    checks = {}
    if init and init[0] == "kappa":
        if src is None:
            raise InputError("--init kappa:THETA needs --from")
        theta = init[1]
        if theta > 0:
            rec, checks = instability_experiment(src, params, theta, T=args.T, refine=args.refine)
        elif theta < 0:
            psi0 = Field(src.grid.scaled(math.exp(-theta)), src.values * math.exp(1.5 * theta))
            level = float(_energy(src, params).E)
            rec, checks = global_trial(psi0, params, level, T=args.T, dt=args.dt, sample_every=args.sample_every)
        else:
            rec = _plain(src, params, args, ckpt)
    else:
        if init and init[0] == "gaussian":
            N, R = parse_grid(args.grid) or (4096, 40.0)
            psi0 = gaussian(make_radial_grid(N, R or 40.0), params.m, init[1])
        elif src is not None:
            psi0 = src
        else:
            raise InputError("evolve needs --from or --init gaussian:WIDTH")
        rec = _plain(psi0, params, args, ckpt)
    write_csv(rec.rows(), out / "trajectory.csv")
    write_field(rec.final, out / "final.bpfld", params.p, params.a, {"t": rec.final.meta.get("t", 0.0)})
    report = {"status": rec.status, "message": rec.message, "steps": rec.steps, "t_end": rec.times[-1],
              "mass_drift": rec.mass_drift(), "energy_drift": rec.energy_drift(), **checks}
    upto = free_window(rec)
    report["edge_mass_final"] = rec.edge[-1]
    report["virial_window_end"] = rec.times[upto - 1] if upto else None
    try:
        report["virial_deviation"] = virial_check(rec, upto=upto)
    except ValueError:
        report["virial_deviation"] = None
    write_json(report, out / "report.json")
    outputs = ["trajectory.csv", "final.bpfld", "report.json"] + (["checkpoint.bpfld"] if ckpt.exists() else [])
    if rec.status == "error":
        raise ArithmeticError(rec.message)
    if init and init[0] == "kappa" and init[1] > 0 and rec.status != "blowup_detected":
        raise ArithmeticError(f"no blowup detected before T={args.T}")
    if init and init[0] == "kappa" and init[1] < 0 and not (checks["P_positive_throughout"] and checks["bounded"]):
        raise ArithmeticError("global trial left the admissible set")
    return out, report, {"N": rec.final.grid.N, "h": rec.final.grid.h}, outputs, [], inputs


def _read_with_header(path):
    from .io import read_field_with_header

    return read_field_with_header(path)


def _energy(u, params):
    from .functionals import energy

    return energy(u, params)


def _plain(psi0, params, args, ckpt):
    dt = args.dt or default_dt(psi0, params, args.linear_only)
    return evolve(psi0.to_complex(), params, dt, args.T, sample_every=args.sample_every,
                  linear_only=args.linear_only, adaptive=args.adaptive, checkpoint=ckpt,
                  checkpoint_every=args.checkpoint_interval)


def cmd_validate_kernel(args):
    a = 1.0 if args.a is None else float(args.a)
    report = cross_validate(a)
    report["pass"] = report["max_phi_gap"] <= 1e-5 and report["max_pair_gap"] <= 1e-10
    out = _out(args)
    write_json(report, out / "report.json")
    if not report["pass"]:
        raise ArithmeticError(f"kernel paths disagree: phi gap {report['max_phi_gap']:.3e}")
    return out, report, report["radial"], ["report.json"], []


COMMANDS = {
    "q-solve": cmd_q_solve,
    "ground-state": cmd_ground_state,
    "gamma-curve": cmd_gamma_curve,
    "asymptotics": cmd_asymptotics,
    "evolve": cmd_evolve,
    "validate-kernel": cmd_validate_kernel,
}


def _fail(code, kind, message):
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = resolve_args(argv)
    except InputError as exc:
        return _fail(EXIT_INPUT, "invalid_input", str(exc))
    try:
        ret = COMMANDS[args.command](args)
    except (InputError, FieldError, GridError, KernelError, FieldFileError, OSError) as exc:
        return _fail(EXIT_INPUT, "invalid_input", str(exc))
    except HypothesisError as exc:
        return _fail(EXIT_HYPOTHESIS, "hypotheses_violated", str(exc))
    except (ArithmeticError, FiberError, RuntimeError, np.linalg.LinAlgError) as exc:
        _manifest_on_failure(args)
        return _fail(EXIT_NUMERIC, "numerical_failure", str(exc))
    out, report, grid, outputs, seeds, *rest = ret
    inputs = rest[0] if rest else {}
    RunManifest(args.command, _record(args), grid, seeds, inputs=inputs, outputs=dict.fromkeys(outputs)).write(out)
    print(json.dumps({"out": str(out), "outputs": outputs}))
    return EXIT_OK


def _manifest_on_failure(args):
    out = Path(args.out)
    if out.is_dir():
        names = [f.name for f in sorted(out.iterdir()) if f.is_file() and f.name != "manifest.json"
                 and not f.name.startswith(".")]
        RunManifest(args.command, _record(args), None, outputs=dict.fromkeys(names)).write(out)


if __name__ == "__main__":
    sys.exit(main())
