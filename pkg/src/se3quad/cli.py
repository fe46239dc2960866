"""Command-line front end: scenario configs, run/certify/sweep, CSV output.

Configs are YAML documents mirroring the Scenario type; the bundled "case1"
(helix tracking) and "case2" (inverted recovery) configs live next to this
module.  Initial rotations may be given as an axis-angle triple (entries like
"0.99pi" are accepted) or as 9 row-major numbers.

Exit codes: 0 success, 2 configuration error, 3 simulation degeneracy.
"""

import argparse
import json
import math
import os
import re
import sys
import tempfile
from dataclasses import replace
from importlib import resources

import numpy as np
import yaml

from .certify import certify_attitude, certify_large_angle, certify_position
from .control import Gains
from .errors import (
    ConfigError,
    DegenerateThrust,
    HeadingParallel,
    InitialAttitudeError,
    NumericalBlowup,
)
from .geometry import check_rotation, exp_so3
from .model import DisturbanceModel, QuadrotorParams, RigidBodyState, reference_disturbances
from .sim import (
    Scenario,
    attitude_polynomial_command,
    auto_acceleration_bound,
    elliptic_helix,
    hover_command,
    polynomial_command,
    run,
)

CSV_COLUMNS = (
    ["t"]
    + [f"x{i}" for i in range(3)]
    + [f"v{i}" for i in range(3)]
    + [f"R{i}{j}" for i in range(3) for j in range(3)]
    + [f"W{i}" for i in range(3)]
    + ["f"]
    + [f"M{i}" for i in range(3)]
    + [f"f{i}" for i in range(1, 5)]
    + [f"ex{i}" for i in range(3)]
    + [f"ev{i}" for i in range(3)]
    + [f"eR{i}" for i in range(3)]
    + [f"eW{i}" for i in range(3)]
    + ["Psi", "V1", "V2", "V", "V3"]
)

CSV_HEADER = ",".join(CSV_COLUMNS)

GAIN_FIELDS = ("kx", "kv", "kR", "kOmega", "c1", "c2", "eps_x", "eps_R",
               "tau", "psi1", "psi2", "ex_max", "B")

_PI_RE = re.compile(r"^\s*([+-]?\d*\.?\d*(?:[eE][+-]?\d+)?)\s*pi\s*$")


def _parse_angle(value):
    """Float or a 'pi' expression such as '0.99pi', 'pi', '-0.5pi'."""
    if isinstance(value, (int, float)):
        return float(value)
    s = str(value)
    m = _PI_RE.match(s)
    if m:
        coef = m.group(1)
        if coef in ("", "+", "-"):
            coef += "1"
        return float(coef) * math.pi
    try:
        return float(s)
    except ValueError as exc:
        raise ConfigError(f"cannot parse angle value {value!r}") from exc


def _require(mapping, key, where):
    if key not in mapping:
        raise ConfigError(f"missing field {where}.{key}")
    return mapping[key]


def _vec3(value, where):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise ConfigError(f"{where} must be a 3-vector")
    return arr


def _parse_rotation(value, where):
    if isinstance(value, (list, tuple)) and len(value) == 3:
        axis_angle = np.array([_parse_angle(v) for v in value])
        return exp_so3(axis_angle)
    if isinstance(value, (list, tuple)) and len(value) == 9:
        R = np.asarray([float(v) for v in value], dtype=float).reshape(3, 3)
        try:
            return check_rotation(R)
        except Exception as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where} must be an axis-angle triple or 9 row-major numbers")


def _parse_trajectory(node, mode):
    kind = _require(node, "kind", "trajectory")
    if kind == "helix":
        return elliptic_helix
    if kind == "hover":
        return hover_command
    if kind == "custom-polynomial":
        b1 = node.get("b1d", [1.0, 0.0, 0.0])
        return polynomial_command(
            _require(node, "x", "trajectory"), _require(node, "y", "trajectory"),
            _require(node, "z", "trajectory"), b1_d=b1)
    if kind == "attitude-polynomial":
        if mode != "attitude":
            raise ConfigError("attitude-polynomial trajectories need mode: attitude")
        return attitude_polynomial_command(
            _require(node, "axis", "trajectory"), _require(node, "angle", "trajectory"))
    raise ConfigError(f"unknown trajectory.kind {kind!r}")


def _parse_disturbance(node, params):
    kind = _require(node, "kind", "disturbance")
    if kind in ("reference", "paper"):
        return reference_disturbances()
    if kind == "none":
        return DisturbanceModel.none()
    if kind == "custom":
        const = _vec3(node.get("force", [0.0, 0.0, 0.0]), "disturbance.force")
        amp = float(node.get("moment_amplitude", 0.0))

        def moment(t, amp=amp):
            return amp * np.array([
                np.sin(8.0 * np.pi * t), np.sin(np.pi * t), np.cos(4.0 * np.pi * t)])

        return DisturbanceModel(
            lambda t: const, moment,
            bound_force=float(np.linalg.norm(const)),
            bound_moment=abs(amp) * math.sqrt(3.0),
        )
    raise ConfigError(f"unknown disturbance.kind {kind!r}")


def scenario_from_config(cfg):
    """Builds a Scenario from a parsed config mapping; raises ConfigError."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a mapping")
    try:
        pn = _require(cfg, "params", "config")
        params = QuadrotorParams(
            m=float(_require(pn, "m", "params")),
            J=np.asarray(_require(pn, "J", "params"), dtype=float),
            d=float(_require(pn, "d", "params")),
            c_tau_f=float(_require(pn, "c_tau_f", "params")),
            g=float(pn.get("g", 9.81)),
            delta_x=float(pn.get("delta_x", 0.0)),
            delta_R=float(pn.get("delta_R", 0.0)),
        )
        gn = _require(cfg, "gains", "config")
        b_raw = gn.get("B", "auto")
        gains = Gains(
            kx=float(_require(gn, "kx", "gains")),
            kv=float(_require(gn, "kv", "gains")),
            kR=float(_require(gn, "kR", "gains")),
            kOmega=float(_require(gn, "kOmega", "gains")),
            c1=float(_require(gn, "c1", "gains")),
            c2=float(_require(gn, "c2", "gains")),
            eps_x=float(_require(gn, "eps_x", "gains")),
            eps_R=float(_require(gn, "eps_R", "gains")),
            tau=float(gn.get("tau", 3.0)),
            psi1=float(gn.get("psi1", 0.9)),
            psi2=float(gn.get("psi2", 1.0)),
            ex_max=float(gn.get("ex_max", 1.0)),
            B=None if (b_raw in (None, "auto")) else float(b_raw),
        )
        inn = _require(cfg, "initial", "config")
        initial = RigidBodyState(
            x=_vec3(_require(inn, "x", "initial"), "initial.x"),
            v=_vec3(_require(inn, "v", "initial"), "initial.v"),
            R=_parse_rotation(_require(inn, "R", "initial"), "initial.R"),
            Omega=_vec3(_require(inn, "Omega", "initial"), "initial.Omega"),
        )
        mode = cfg.get("mode", "position")
        trajectory = _parse_trajectory(_require(cfg, "trajectory", "config"), mode)
        disturbances = _parse_disturbance(
            cfg.get("disturbance", {"kind": "none"}), params)
        sn = _require(cfg, "sim", "config")
        dt = float(_require(sn, "dt", "sim"))
        duration = float(_require(sn, "duration", "sim"))
        robust = _parse_on_off(cfg.get("robust", True))
        scenario = Scenario(
            params=params, gains=gains, initial=initial, trajectory=trajectory,
            disturbances=disturbances, duration=duration, dt=dt, mode=mode,
            robust=robust, name=str(cfg.get("name", "")),
        )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(str(exc)) from exc
    if mode != "attitude" and gains.B is None:
        gains = replace(gains, B=auto_acceleration_bound(params, trajectory, duration))
        scenario = replace(scenario, gains=gains)
    if mode != "attitude" and gains.B is not None:
        ts = np.linspace(0.0, duration, 1025)
        sup = max(
            float(np.linalg.norm(params.m * params.g * np.array([0, 0, 1.0])
                                 - params.m * trajectory(float(tt)).a_d))
            for tt in ts)
        if sup >= gains.B:
            raise ConfigError(
                f"B = {gains.B} does not bound the commanded acceleration force {sup:.4f}")
    # keep the raw config around so serialization can round-trip
    object.__setattr__(scenario, "_config", cfg)
    return scenario


def _parse_on_off(value):
    if isinstance(value, bool):
        return value
    if str(value).lower() in ("on", "true", "1", "yes"):
        return True
    if str(value).lower() in ("off", "false", "0", "no"):
        return False
    raise ConfigError(f"expected on/off, got {value!r}")


def config_from_scenario(sc):
    """Serializes a Scenario back to a config mapping (inverse of parsing)."""
    cfg = getattr(sc, "_config", None)
    out = {
        "params": {
            "m": sc.params.m,
            "J": [float(x) for x in np.diagonal(sc.params.J)]
            if np.allclose(sc.params.J, np.diag(np.diagonal(sc.params.J)))
            else [float(x) for x in sc.params.J.reshape(-1)],
            "d": sc.params.d, "c_tau_f": sc.params.c_tau_f, "g": sc.params.g,
            "delta_x": sc.params.delta_x, "delta_R": sc.params.delta_R,
        },
        "gains": {k: getattr(sc.gains, k) for k in GAIN_FIELDS},
        "initial": {
            "x": [float(v) for v in sc.initial.x],
            "v": [float(v) for v in sc.initial.v],
            "R": [float(v) for v in sc.initial.R.reshape(-1)],
            "Omega": [float(v) for v in sc.initial.Omega],
        },
        "trajectory": (cfg or {}).get("trajectory", {"kind": "custom"}),
        "disturbance": (cfg or {}).get("disturbance", {"kind": "none"}),
        "sim": {"dt": sc.dt, "duration": sc.duration},
        "mode": sc.mode,
        "robust": sc.robust,
        "name": sc.name,
    }
    return out


def bundled_config_path(name):
    ref = resources.files("se3quad").joinpath(f"configs/{name}.yaml")
    if not ref.is_file():
        raise ConfigError(f"no bundled config named {name!r}")
    return str(ref)


def load_config(path_or_name):
    """Loads a YAML config by path, or by bundled name (case1, case2, ...)."""
    path = path_or_name
    if not os.path.exists(path):
        if re.fullmatch(r"[A-Za-z0-9_\-]+", path_or_name):
            path = bundled_config_path(path_or_name)
        else:
            raise ConfigError(f"config file not found: {path_or_name}")
    try:
        with open(path) as fh:
            return yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(str(exc)) from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc


def apply_overrides(cfg, overrides):
    """Applies key=value overrides with dotted paths (e.g. gains.eps_R=0.01)."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        key, value = item.split("=", 1)
        node = cfg
        parts = key.split(".")
        # bare gain names are a convenience for the common case
        if len(parts) == 1 and parts[0] in GAIN_FIELDS:
            parts = ["gains", parts[0]]
        if len(parts) == 1 and parts[0] in ("dt", "duration"):
            parts = ["sim", parts[0]]
        for part in parts[:-1]:
            if not isinstance(node, dict) or part not in node:
                raise ConfigError(f"unknown override path {key!r}")
            node = node[part]
        if not isinstance(node, dict):
            raise ConfigError(f"unknown override path {key!r}")
        leaf = parts[-1]
        if leaf not in node and key not in ("robust", "mode", "name"):
            # allow introducing optional leaves that the config omitted
            known = {"B", "tau", "psi1", "psi2", "ex_max", "g", "delta_x", "delta_R",
                     "robust", "mode", "name"}
            if leaf not in known:
                raise ConfigError(f"unknown override path {key!r}")
        node[leaf] = yaml.safe_load(value)
    return cfg


def _fmt(x):
    return f"{x:.17g}"


def write_log_csv(log, path):
    """Writes a TrajectoryLog as CSV with the fixed column schema.

    The file is written to a temporary sibling and renamed so a failure never
    leaves a partial CSV behind.
    """
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".csv.tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(CSV_HEADER + "\n")
            for k in range(len(log.t)):
                row = (
                    [log.t[k]], log.x[k], log.v[k], log.R[k].reshape(-1),
                    log.Omega[k], [log.f[k]], log.M[k], log.rotors[k],
                    log.e_x[k], log.e_v[k], log.e_R[k], log.e_Omega[k],
                    [log.Psi[k], log.V1[k], log.V2[k], log.V[k], log.V3[k]],
                )
                fh.write(",".join(_fmt(v) for part in row for v in part) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_log_csv(path):
    """Reads a CSV produced by write_log_csv into a dict of column arrays."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != CSV_COLUMNS:
            raise ConfigError(f"unexpected CSV columns in {path}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        data = data.reshape(0, len(CSV_COLUMNS))
    return {name: data[:, i] for i, name in enumerate(CSV_COLUMNS)}


def certificate_report(gains, params, mode):
    """Certificates and their verdicts as a JSON-friendly mapping."""
    att = certify_attitude(gains, params)
    report = {
        "attitude": {
            "c2_max": att.c2_max,
            "eps_R_max": att.eps_R_max,
            "ultimate_bound": att.ultimate_bound,
            "decrease_threshold": att.decrease_threshold,
            "conditions": [
                {"name": c.name, "satisfied": c.satisfied, "margin": c.margin}
                for c in att.conditions
            ],
        }
    }
    if mode != "attitude" and gains.B is not None:
        pos = certify_position(gains, params)
        report["position"] = {
            "alpha": pos.alpha,
            "c1_max": pos.c1_max,
            "c2_max": pos.c2_max,
            "eps_sum_max": pos.eps_sum_max,
            "ultimate_bound": pos.ultimate_bound,
            "decrease_threshold": pos.decrease_threshold,
            "conditions": [
                {"name": c.name, "satisfied": c.satisfied, "margin": c.margin}
                for c in pos.conditions
            ],
        }
        if gains.psi1 < 1.0 <= gains.psi2 < 2.0:
            ok, eps_max = certify_large_angle(gains, params)
            report["large_angle"] = {"satisfied": ok, "eps_R_max": eps_max}
    return report


def _print_certificates(report, out=None):
    out = out or sys.stdout
    for name, cert in report.items():
        if name == "large_angle":
            print(f"large-angle recovery: eps_R_max = {cert['eps_R_max']:.6g} "
                  f"({'satisfied' if cert['satisfied'] else 'NOT satisfied'})", file=out)
            continue
        print(f"{name} certificate:", file=out)
        for key in ("c1_max", "c2_max", "eps_R_max", "eps_sum_max",
                    "ultimate_bound", "decrease_threshold", "alpha"):
            if key in cert:
                print(f"  {key:20s} = {cert[key]:.6g}", file=out)
        for c in cert["conditions"]:
            flag = "ok  " if c["satisfied"] else "FAIL"
            print(f"  [{flag}] {c['name']:16s} margin = {c['margin']:+.6g}", file=out)


def _certificate_warnings(report):
    warnings = []
    for name, cert in report.items():
        if name == "large_angle":
            if not cert["satisfied"]:
                warnings.append("large_angle.eps_R_bound")
            continue
        for c in cert["conditions"]:
            if not c["satisfied"]:
                warnings.append(f"{name}.{c['name']}")
    return warnings


def _cmd_run(args):
    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, args.override or [])
        if args.robust is not None:
            cfg["robust"] = args.robust
        if args.dt is not None:
            cfg.setdefault("sim", {})["dt"] = args.dt
        if args.duration is not None:
            cfg.setdefault("sim", {})["duration"] = args.duration
        sc = scenario_from_config(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    report = certificate_report(sc.gains, sc.params, sc.mode)
    warnings = _certificate_warnings(report)

    try:
        log = run(sc)
    except (DegenerateThrust, HeadingParallel, NumericalBlowup, InitialAttitudeError) as exc:
        print(f"simulation degeneracy: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3

    summary = {
        "name": sc.name or str(args.config),
        "mode": sc.mode,
        "robust": sc.robust,
        "dt": sc.dt,
        "duration": sc.duration,
        "terminal_position_error": log.terminal_position_error(),
        "initial_attitude_error": float(log.Psi[0]),
        "max_attitude_error": float(np.max(log.Psi)),
        "switch_time": log.switch_time,
        "certificate_warnings": warnings,
    }
    if args.out:
        write_log_csv(log, args.out)
        sidecar = os.path.splitext(args.out)[0] + ".summary.json"
        with open(sidecar, "w") as fh:
            json.dump({"summary": summary, "certificates": report}, fh, indent=2)
        summary["csv"] = args.out

    print(f"terminal |e_x|      : {summary['terminal_position_error']:.6f} m")
    print(f"initial Psi         : {summary['initial_attitude_error']:.6f}")
    print(f"max Psi             : {summary['max_attitude_error']:.6f}")
    if log.switch_time is not None:
        print(f"mode switch at      : {log.switch_time:.4f} s")
    if warnings:
        print("certificate warnings: " + ", ".join(warnings))
    else:
        print("certificate warnings: none")
    return 0


def _cmd_certify(args):
    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, args.override or [])
        sc = scenario_from_config(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report = certificate_report(sc.gains, sc.params, sc.mode)
    _print_certificates(report)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)
    return 0


def _sweep_bound(sc):
    if sc.mode == "attitude":
        return certify_attitude(sc.gains, sc.params).ultimate_bound
    return certify_position(sc.gains, sc.params).ultimate_bound


def _cmd_sweep(args):
    try:
        base = load_config(args.config)
        base = apply_overrides(base, args.override or [])
        parameter = args.parameter
        if parameter not in GAIN_FIELDS and parameter not in ("dt", "duration"):
            raise ConfigError(f"unknown sweep parameter {parameter!r}")
        values = [float(v) for v in args.values.split(",") if v.strip() != ""]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    rows = []
    for value in values:  # executed in input order; output order is deterministic
        cfg = yaml.safe_load(yaml.safe_dump(base))
        try:
            cfg = apply_overrides(cfg, [f"{parameter}={value!r}"])
            sc = scenario_from_config(cfg)
            log = run(sc)
        except ConfigError as exc:
            print(f"config error at {parameter}={value}: {exc}", file=sys.stderr)
            return 2
        except (DegenerateThrust, HeadingParallel, NumericalBlowup, InitialAttitudeError) as exc:
            print(f"simulation degeneracy at {parameter}={value}: {exc}", file=sys.stderr)
            return 3
        rows.append((value, log.terminal_position_error(), _sweep_bound(sc)))

    lines = ["parameter,value,terminal_error,ultimate_bound"]
    lines += [f"{parameter},{_fmt(v)},{_fmt(e)},{_fmt(b)}" for v, e, b in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        directory = os.path.dirname(os.path.abspath(args.out)) or "."
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".csv.tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, args.out)
    else:
        sys.stdout.write(text)
    return 0


def _robust_flag(value):
    return _parse_on_off(value)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="se3quad",
        description="Robust geometric tracking control of a quadrotor on SE(3)")
    sub = parser.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="simulate a scenario and write CSV + summary")
    pr.add_argument("config", nargs="?", default=None,
                    help="config path or bundled name (case1, case2)")
    pr.add_argument("--config", dest="config_flag", default=None, help="config path")
    pr.add_argument("--out", default=None, help="output CSV path")
    pr.add_argument("--robust", type=_robust_flag, default=None, metavar="on|off")
    pr.add_argument("--dt", type=float, default=None)
    pr.add_argument("--duration", type=float, default=None)
    pr.add_argument("--override", action="append", metavar="key=value")
    pr.set_defaults(func=_cmd_run)

    pc = sub.add_parser("certify", help="evaluate the gain certificates of a config")
    pc.add_argument("config", nargs="?", default=None)
    pc.add_argument("--config", dest="config_flag", default=None)
    pc.add_argument("--out", default=None, help="write the certificates as JSON")
    pc.add_argument("--override", action="append", metavar="key=value")
    pc.set_defaults(func=_cmd_certify)

    ps = sub.add_parser("sweep", help="sweep one parameter over a list of values")
    ps.add_argument("config", nargs="?", default=None)
    ps.add_argument("--config", dest="config_flag", default=None)
    ps.add_argument("--parameter", required=True)
    ps.add_argument("--values", required=True, help="comma-separated values")
    ps.add_argument("--out", default=None, help="output CSV path")
    ps.add_argument("--override", action="append", metavar="key=value")
    ps.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config_flag", None):
        args.config = args.config_flag
    if args.config is None:
        print("config error: no config given", file=sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
