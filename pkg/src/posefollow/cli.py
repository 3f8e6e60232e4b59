"""Command-line entry point.

Subcommands: run a config file, run a named preset batch, validate a
config, and benchmark the engine. All outputs land in the directory given
by --out: one CSV trajectory and one JSON summary per run, plus the
resolved config file for preset runs.
"""

import argparse
import json
import math
import os
import subprocess
import sys
import time
from pathlib import Path

from ._accel import JIT_ENABLED
from .config import parse_config
from .errors import ConfigInvalid, PoseFollowError
from .presets import PRESET_NAMES, preset_configs
from .sim import export_run, metrics, run_closed_loop


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posefollow",
        description="Rigid-body pose-following simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one config file")
    sim.add_argument("--config", required=True, help="config JSON file")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--dt", type=float, default=None, help="override integration step [s]")
    sim.add_argument(
        "--export-rate", type=float, default=None, help="override export rate [Hz]"
    )

    pre = sub.add_parser("preset", help="run a named experiment batch")
    pre.add_argument("--name", required=True, help="|".join(PRESET_NAMES))
    pre.add_argument("--out", required=True, help="output directory")
    pre.add_argument(
        "--seed", type=int, default=None, help="seed for random start poses (fig2-convergence)"
    )
    pre.add_argument("--dt", type=float, default=None, help="override integration step [s]")
    pre.add_argument(
        "--export-rate", type=float, default=None, help="override export rate [Hz]"
    )

    val = sub.add_parser("validate", help="check a config file and print its hash")
    val.add_argument("--config", required=True, help="config JSON file")

    ben = sub.add_parser("bench", help="measure engine throughput")
    ben.add_argument("--steps", type=int, default=200_000, help="integration steps per pass")
    ben.add_argument("--repeat", type=int, default=3, help="timed passes")
    ben.add_argument(
        "--no-compare",
        action="store_true",
        help="skip the pure-python comparison subprocess",
    )
    return parser


def _apply_overrides(obj: dict, dt, export_rate) -> dict:
    if dt is not None:
        obj.setdefault("sim", {})["dt"] = dt
    if export_rate is not None:
        obj.setdefault("sim", {})["export_rate"] = export_rate
    return obj


def _run_and_report(cfg, outdir) -> None:
    rec = run_closed_loop(cfg)
    csv_path, json_path = export_run(rec, outdir)
    m = metrics(rec)
    bits = [f"conv_t={m['convergence_time']}"]
    if m["completed"]:
        bits.append(f"completed_at={m['completion_time']}")
    if math.isfinite(m["max_d_perp_post_disturbance"]):
        bits.append(f"max_d_post={m['max_d_perp_post_disturbance']:.4g}")
    print(f"{rec.label}: {' '.join(bits)} -> {csv_path}")


def _cmd_simulate(args) -> int:
    path = Path(args.config)
    try:
        obj = json.loads(path.read_text())
    except OSError as e:
        raise ConfigInvalid(f"cannot read config file {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigInvalid(f"config file {path} is not valid JSON: {e}") from None
    obj = _apply_overrides(obj, args.dt, args.export_rate)
    cfg = parse_config(obj, base_dir=path.parent)
    _run_and_report(cfg, args.out)
    return 0


def _cmd_preset(args) -> int:
    configs = preset_configs(args.name, seed=args.seed)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for obj in configs:
        obj = _apply_overrides(obj, args.dt, args.export_rate)
        cfg_path = outdir / f"{obj['label']}.config.json"
        cfg_path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
        cfg = parse_config(obj, base_dir=outdir)
        _run_and_report(cfg, outdir)
    return 0


def _cmd_validate(args) -> int:
    from .config import load_config

    cfg = load_config(args.config)
    print(f"ok {cfg.config_hash}")
    return 0


def _bench_config(steps: int) -> dict:
    duration = steps * 1e-3
    return {
        "schema_version": 1,
        "label": "bench",
        "reference": {"kind": "helix3d"},
        "gains": {"kp": 3.0, "kv": 3.0, "k_theta": 1.0},
        "mode": "velocity",
        "profile": {"kind": "constant", "base": 0.075},
        "initial_state": {
            "p": [3.0, -0.5, 0.3],
            "v": [0.0, 0.0, 0.0],
            "q": [0.8775825618903728, 0.0, 0.0, 0.479425538604203],
            "w": [0.0, 0.0, 0.0],
        },
        "sim": {"duration": duration, "dt": 1e-3, "export_rate": 10.0},
    }


def _cmd_bench(args) -> int:
    label = "jit" if JIT_ENABLED else "python"
    warm = parse_config(_bench_config(min(args.steps, 1000)))
    run_closed_loop(warm)
    cfg = parse_config(_bench_config(args.steps))
    best = float("inf")
    for _ in range(max(1, args.repeat)):
        t0 = time.perf_counter()
        run_closed_loop(cfg)
        best = min(best, time.perf_counter() - t0)
    rate = args.steps / best
    print(f"engine: {label}")
    print(f"steps/s: {rate:.0f}")
    if args.no_compare or not JIT_ENABLED:
        return 0
    # the fallback path is selected at import time, so it runs in a child
    sub_steps = max(1000, args.steps // 100)
    env = dict(os.environ, POSEFOLLOW_DISABLE_JIT="1")
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "posefollow.cli",
            "bench",
            "--steps",
            str(sub_steps),
            "--repeat",
            "1",
            "--no-compare",
        ],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    py_rate = None
    for line in proc.stdout.splitlines():
        if line.startswith("steps/s:"):
            py_rate = float(line.split(":", 1)[1])
    if py_rate is None:
        print("comparison run produced no rate", file=sys.stderr)
        return 1
    print(f"python steps/s: {py_rate:.0f}")
    print(f"speedup: {rate / py_rate:.1f}x")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {
        "simulate": _cmd_simulate,
        "preset": _cmd_preset,
        "validate": _cmd_validate,
        "bench": _cmd_bench,
    }[args.command]
    try:
        return handler(args)
    except PoseFollowError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
