"""Command-line front end.

    deqctl solve           --config run.json --out outdir
    deqctl simulate-dcp    --config run.json --seed 7
    deqctl simulate-queue  --config run.json
    deqctl convergence     --config run.json
    deqctl check           [--config run.json]

The configuration is a JSON object with optional sections ``model``,
``solver``, ``mc``, ``queue`` and ``convergence``; see README.md for the keys.
Exit codes: 0 success, 1 invalid configuration, 2 solver failure,
3 regression check failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import fields
from pathlib import Path

from . import io
from .diffusion import MCConfig, estimate_dcp_cost, policy_barriers, simulate_reflected
from .hjb import SolverConfig, SolverError, find_c, find_barriers, solve
from .params import WORKED_EXAMPLE, InvalidParams, ModelParams
from .queuesim import (
    BufferPolicy,
    Interarrival,
    Patience,
    QueueConfig,
    convergence_study,
    estimate_qcp_cost,
    markov_bridge,
    scale_trajectory,
    simulate_queue,
)
from .queuesim.simulator import CLASS_NAMES, EVENT_NAMES

COMMANDS = ("solve", "simulate-dcp", "simulate-queue", "convergence", "check")

# (p_s, a*, b*) for the worked example, and its separatrix
REFERENCE_C = -0.9440
REFERENCE_BARRIERS = (
    (0.1, -0.5248, 0.1104),
    (0.3, -0.6568, 0.1333),
    (0.5, -0.7707, 0.1935),
    (0.7, -0.8671, 0.2876),
    (0.9, -0.9345, 0.5501),
)
REFERENCE_TOL = 5e-3


class ConfigError(ValueError):
    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


def _section(cfg: dict, name: str, required: bool = True) -> dict:
    if name not in cfg:
        if required:
            raise ConfigError(name, "section is required for this command")
        return {}
    sec = cfg[name]
    if not isinstance(sec, dict):
        raise ConfigError(name, "must be an object")
    return sec


def _build(cls, sec: dict, where: str, **extra):
    known = {f.name for f in fields(cls)}
    for k in sec:
        if k not in known:
            raise ConfigError(f"{where}.{k}", "unknown key")
    try:
        return cls(**sec, **extra)
    except TypeError as exc:
        raise ConfigError(where, str(exc)) from None
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from None


def parse_model(cfg: dict) -> ModelParams:
    sec = _section(cfg, "model")
    try:
        return ModelParams.from_dict(sec)
    except InvalidParams as exc:
        field = getattr(exc, "field", None)
        raise ConfigError(f"model.{field}" if field else "model", str(exc)) from None
    except (TypeError, ValueError) as exc:
        raise ConfigError("model", str(exc)) from None


def parse_solver(cfg: dict, p: ModelParams) -> SolverConfig:
    sec = dict(_section(cfg, "solver", required=False))
    known = {f.name for f in fields(SolverConfig)}
    for k in sec:
        if k not in known:
            raise ConfigError(f"solver.{k}", "unknown key")
    try:
        sc = SolverConfig.default_for(p, **sec)
        sc.validate_for(p)
    except (TypeError, ValueError) as exc:
        raise ConfigError("solver", str(exc)) from None
    return sc


def _seed(sec: dict, where: str, override: int | None) -> int:
    seed = override if override is not None else sec.get("seed")
    if seed is None:
        raise ConfigError(f"{where}.seed", "a seed is required for stochastic commands")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0 or seed >= 2**64:
        raise ConfigError(f"{where}.seed", "must be an unsigned 64-bit integer")
    return seed


def _number(sec: dict, key: str, where: str, default=None, positive=False):
    v = sec.get(key, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}.{key}", "must be a finite number")
    if positive and not v > 0:
        raise ConfigError(f"{where}.{key}", "must be > 0")
    return v


def parse_mc(cfg: dict, seed_override: int | None) -> tuple[MCConfig, dict]:
    sec = dict(_section(cfg, "mc"))
    seed = _seed(sec, "mc", seed_override)
    extra = {}
    for k in ("x0", "path_T", "barriers", "write_path"):
        if k in sec:
            extra[k] = sec.pop(k)
    sec["seed"] = seed
    mc = _build(MCConfig, sec, "mc")
    extra.setdefault("x0", 0.0)
    _number(extra, "x0", "mc")
    if "barriers" in extra:
        b = extra["barriers"]
        if not (isinstance(b, list) and len(b) == 2):
            raise ConfigError("mc.barriers", "must be a two-element list [lower, upper]")
        extra["barriers"] = tuple(-math.inf if v is None and i == 0 else math.inf if v is None else float(v)
                                  for i, v in enumerate(b))
    return mc, extra


def _dist(sec, key: str, where: str, cls):
    v = sec.get(key)
    if v is None:
        return cls()
    if isinstance(v, str):
        v = {"family": v}
    if not isinstance(v, dict):
        raise ConfigError(f"{where}.{key}", "must be a family name or an object")
    if "times" in v:
        v = dict(v, times=tuple(v["times"]))
    return _build(cls, v, f"{where}.{key}")


_QUEUE_RUN_KEYS = ("T", "reps", "seed", "m_b", "m_s", "policy", "bridge")


def parse_queue(cfg: dict, p: ModelParams | None) -> tuple[QueueConfig, dict]:
    sec = dict(_section(cfg, "queue"))
    run = {k: sec.pop(k) for k in _QUEUE_RUN_KEYS if k in sec}
    if run.get("bridge") == "markov":
        if p is None:
            raise ConfigError("queue.bridge", "the markov bridge needs a model section")
        if "n" not in sec:
            raise ConfigError("queue.n", "required")
        try:
            base = markov_bridge(p, sec.pop("n"), x0_hat=sec.pop("x0_hat", 0.0))
        except ValueError as exc:
            raise ConfigError("queue", str(exc)) from None
        if sec:
            raise ConfigError(f"queue.{next(iter(sec))}", "not allowed together with bridge=markov")
        return base, run
    for key, cls in (("interarrival_b", Interarrival), ("interarrival_s", Interarrival),
                     ("patience_b", Patience), ("patience_s", Patience)):
        sec[key] = _dist(sec, key, "queue", cls)
    for req in ("n", "lambda0", "beta_b", "beta_s"):
        if req not in sec:
            raise ConfigError(f"queue.{req}", "required")
    return _build(QueueConfig, sec, "queue"), run


def _queue_policy(run: dict, qc: QueueConfig, p: ModelParams | None, sc_of) -> BufferPolicy:
    mode = run.get("policy", "buffers" if ("m_b" in run or "m_s" in run) else "threshold")
    if mode == "buffers":
        try:
            return BufferPolicy(run.get("m_b"), run.get("m_s"))
        except ValueError as exc:
            raise ConfigError("queue.m_b/m_s", str(exc)) from None
    if mode == "zero":
        return BufferPolicy()
    if mode == "threshold":
        if p is None:
            raise ConfigError("model", "a threshold policy needs a model section")
        sol = solve(p, sc_of(p))
        return BufferPolicy.from_barriers(sol.a_star, sol.b_star, qc.n)
    raise ConfigError("queue.policy", "must be one of threshold, zero, buffers")


# --------------------------------------------------------------------------


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg)


def cmd_solve(cfg: dict, args, out: Path) -> int:
    p = parse_model(cfg)
    sc = parse_solver(cfg, p)
    sol = solve(p, sc)
    io.write_report(out / "policy.txt", {
        "regime": str(sol.regime),
        "a_star": sol.a_star,
        "b_star": sol.b_star,
        "c": sol.c,
        "k_s": sol.k_s,
        "k_b": sol.k_b,
        "T_s": p.T_s,
        "T_b": p.T_b,
        "Q0": sol.value(0.0),
    })
    io.write_csv(out / "W.csv", {"x": sol.W_curve.grid, "W": sol.W_curve.y, "Wp": sol.W_curve.dy})
    io.write_csv(out / "Q.csv", {"x": sol.Q_curve.grid, "Q": sol.Q_curve.y})
    if args.plot:
        from .plotting import plot_solution

        plot_solution(sol, out)
    _say(args, f"regime={sol.regime} a_star={io.fmt(sol.a_star)} b_star={io.fmt(sol.b_star)} c={io.fmt(sol.c)}")
    return 0


def cmd_simulate_dcp(cfg: dict, args, out: Path) -> int:
    p = parse_model(cfg)
    sc = parse_solver(cfg, p)
    mc, extra = parse_mc(cfg, args.seed)
    sol = solve(p, sc)
    lo, hi = extra.get("barriers", policy_barriers(sol))
    est = estimate_dcp_cost(p, sol, extra["x0"], mc, barriers=(lo, hi))
    io.write_report(out / "cost.txt", {
        "mean": est.mean,
        "stderr": est.stderr,
        "reps": est.reps,
        "T_max": est.T_max,
        "dt": mc.dt,
        "tail_bound": est.tail_bound,
        "seed": mc.seed,
        "x0": float(extra["x0"]),
        "lower_barrier": lo,
        "upper_barrier": hi,
        "value_function": sol.value(float(extra["x0"])),
    })
    if extra.get("write_path", False) or args.plot:
        T = float(extra.get("path_T", min(est.T_max, 10.0)))
        path = simulate_reflected(p, sol, extra["x0"], T, mc.dt, mc.seed)
        io.write_csv(out / "path.csv", {"t": path.grid, "X": path.X, "L_a": path.L_a, "L_b": path.L_b})
        if args.plot:
            from .plotting import plot_sde_path

            plot_sde_path(path, lo, hi, out)
    _say(args, f"mean={io.fmt(est.mean)} stderr={io.fmt(est.stderr)}")
    return 0


def cmd_simulate_queue(cfg: dict, args, out: Path) -> int:
    p = parse_model(cfg) if "model" in cfg else None
    qc, run = parse_queue(cfg, p)
    seed = _seed(run, "queue", args.seed)
    reps = run.get("reps", 100)
    if not isinstance(reps, int) or reps < 2:
        raise ConfigError("queue.reps", "must be an integer >= 2")
    T = _number(run, "T", "queue", default=12.0 / qc.alpha, positive=True)
    pol = _queue_policy(run, qc, p, lambda q: parse_solver(cfg, q))
    est = estimate_qcp_cost(qc, pol, reps, seed, T)
    io.write_report(out / "cost.txt", {
        "mean": est.mean, "stderr": est.stderr, "reps": est.reps, "T_max": est.T_max,
        "tail_bound": est.tail_bound, "seed": seed, "n": qc.n, "m_b": pol.m_b, "m_s": pol.m_s,
    })
    traj = simulate_queue(qc, pol, T, seed, rep=0)
    io.write_csv(out / "events.csv", {
        "t": traj.t,
        "event_type": [EVENT_NAMES[int(e)] for e in traj.event],
        "class": [CLASS_NAMES[int(c)] for c in traj.cls],
        "X": traj.X, "G_b": traj.G_b, "G_s": traj.G_s, "U_b": traj.U_b, "U_s": traj.U_s,
    })
    scaled = scale_trajectory(qc, traj)
    io.write_csv(out / "scaled.csv", scaled.columns())
    if args.plot:
        from .plotting import plot_scaled

        plot_scaled(scaled, out)
    _say(args, f"mean={io.fmt(est.mean)} stderr={io.fmt(est.stderr)} m_b={pol.m_b} m_s={pol.m_s}")
    return 0


def cmd_convergence(cfg: dict, args, out: Path) -> int:
    p = parse_model(cfg)
    sc = parse_solver(cfg, p)
    sec = _section(cfg, "convergence")
    seed = _seed(sec, "convergence", args.seed)
    n_list = sec.get("n_list", [25, 100, 400])
    if not (isinstance(n_list, list) and n_list and all(isinstance(n, int) and n >= 1 for n in n_list)):
        raise ConfigError("convergence.n_list", "must be a non-empty list of positive integers")
    reps = sec.get("reps", 200)
    if not isinstance(reps, int) or reps < 2:
        raise ConfigError("convergence.reps", "must be an integer >= 2")
    T_max = _number(sec, "T_max", "convergence", positive=True)
    x0 = _number(sec, "x0_hat", "convergence", default=0.0)
    for k in sec:
        if k not in ("n_list", "reps", "seed", "T_max", "x0_hat"):
            raise ConfigError(f"convergence.{k}", "unknown key")
    try:
        bridge = markov_bridge(p, n_list[0], x0_hat=x0)
        for n in n_list:
            bridge.with_n(n)
    except ValueError as exc:
        raise ConfigError("convergence.n_list", str(exc)) from None
    report = convergence_study(p, bridge, n_list, reps, seed, T_max, sol=solve(p, sc))
    io.write_csv(out / "convergence.csv", {
        "n": [r.n for r in report.rows],
        "policy": [r.label for r in report.rows],
        "m_b": [r.m_b for r in report.rows],
        "m_s": [r.m_s for r in report.rows],
        "mean": [r.mean for r in report.rows],
        "stderr": [r.stderr for r in report.rows],
        "value": [report.value for _ in report.rows],
        "gap": [r.gap for r in report.rows],
    })
    ns = sorted(report.diagnostics)
    keys = list(report.diagnostics[ns[0]])
    io.write_csv(out / "diagnostics.csv", {"n": ns, **{k: [report.diagnostics[n][k] for n in ns] for k in keys}})
    if args.plot:
        from .plotting import plot_convergence

        plot_convergence(report, out)
    _say(args, f"value={io.fmt(report.value)} rows={len(report.rows)}")
    return 0


def run_reference_check(p: ModelParams, sc: SolverConfig | None = None, tol: float = REFERENCE_TOL):
    """Separatrix and barrier pairs of the worked example against the reference values."""
    sc = sc or SolverConfig.default_for(p)
    rows = []
    c = find_c(p, sc)
    rows.append(("c", c, None, REFERENCE_C, None, abs(c - REFERENCE_C) <= tol))
    for ps, a_ref, b_ref in REFERENCE_BARRIERS:
        a, b = find_barriers(p.with_(p_s=ps), sc)
        ok = abs(a - a_ref) <= tol and abs(b - b_ref) <= tol
        rows.append((f"p_s={ps}", a, b, a_ref, b_ref, ok))
    return rows


def cmd_check(cfg: dict, args, out: Path) -> int:
    p = parse_model(cfg) if "model" in cfg else WORKED_EXAMPLE
    sc = parse_solver(cfg, p)
    rows = run_reference_check(p, sc)
    report = {}
    for name, a, b, a_ref, b_ref, ok in rows:
        tag = "PASS" if ok else "FAIL"
        if b is None:
            line = f"{tag} {name}: {a:.6f} (reference {a_ref:.4f})"
        else:
            line = f"{tag} {name}: a*={a:.6f} b*={b:.6f} (reference {a_ref:.4f}, {b_ref:.4f})"
        _say(args, line)
        report[f"{name}.status"] = tag
        report[f"{name}.a"] = a
        if b is not None:
            report[f"{name}.b"] = b
    passed = sum(r[-1] for r in rows)
    report["passed"] = passed
    report["total"] = len(rows)
    io.write_report(out / "check.txt", report)
    _say(args, f"{passed}/{len(rows)} rows pass")
    return 0 if passed == len(rows) else 3


HANDLERS = {
    "solve": cmd_solve,
    "simulate-dcp": cmd_simulate_dcp,
    "simulate-queue": cmd_simulate_queue,
    "convergence": cmd_convergence,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="deqctl", description="Admission control for double-ended matching queues.")
    ap.add_argument("command", nargs="?", choices=COMMANDS, help="workflow (defaults to the config's 'command')")
    ap.add_argument("--config", type=Path, help="JSON configuration file")
    ap.add_argument("--seed", type=int, help="seed override for stochastic commands")
    ap.add_argument("--out", type=Path, help="output directory (default: config output_dir or '.')")
    ap.add_argument("--quiet", action="store_true", help="suppress console output")
    ap.add_argument("--plot", action="store_true", help="also render PNG figures next to the CSVs")
    return ap


def _load(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config", "top level must be an object")
    return cfg


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args.config)
        command = args.command or cfg.get("command")
        if command not in COMMANDS:
            raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}")
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed", "must be an unsigned 64-bit integer")
        out = args.out or Path(cfg.get("output_dir", "."))
        out.mkdir(parents=True, exist_ok=True)
        return HANDLERS[command](cfg, args, out)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
