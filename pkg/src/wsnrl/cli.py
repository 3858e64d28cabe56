"""Command-line entry point: ``wsnrl {train,eval,simulate,report,synth-solar}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .baselines import baseline_policy
from .cases import get_case
from .config import load_config
from .harness import desk_hyper, evaluate, evaluate_policy, report, run_case
from .agent.ppo import PpoHyper
from .solar import synth_solar, write_solar_csv


def _window(text: str):
    try:
        start, steps = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected START,STEPS") from None
    return start, steps


def _hyper(args) -> PpoHyper:
    keys = {"feature_size": args.feature_size, "epochs_per_update": args.epochs,
            "learning_rate": args.lr, "optimizer": args.optimizer, "minibatch_size": args.minibatch}
    given = {k: v for k, v in keys.items() if v is not None}
    if args.no_adv_norm:
        given["adv_norm"] = False
    return desk_hyper(**given) if args.desk else PpoHyper(**given)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wsnrl", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a PPO agent on one case and evaluate it")
    t.add_argument("--case", type=int, required=True)
    t.add_argument("--seed", type=int, nargs="+", default=[0])
    t.add_argument("--episodes", type=int, default=20000)
    t.add_argument("--config", type=Path)
    t.add_argument("--out", type=Path, required=True)
    t.add_argument("--desk", action="store_true", help="single-core desk-scale network and optimiser settings")
    t.add_argument("--feature-size", type=int)
    t.add_argument("--epochs", type=int)
    t.add_argument("--minibatch", type=int)
    t.add_argument("--lr", type=float)
    t.add_argument("--optimizer", choices=["adam", "sgd"])
    t.add_argument("--no-adv-norm", action="store_true")
    t.add_argument("--greedy", action="store_true", help="evaluate with argmax actions")

    e = sub.add_parser("eval", help="evaluate a checkpoint over a contiguous window")
    e.add_argument("--checkpoint", type=Path, required=True)
    e.add_argument("--window", type=_window, help="START,STEPS (default: last eval_steps of the profile)")
    e.add_argument("--greedy", action="store_true")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", type=Path)

    s = sub.add_parser("simulate", help="run a rule-based baseline policy")
    s.add_argument("--policy", choices=["all_active", "round_robin", "greedy_battery"], required=True)
    s.add_argument("--case", type=int)
    s.add_argument("--config", type=Path)
    s.add_argument("--window", type=_window)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--fraction", type=float, default=0.5)
    s.add_argument("--k", type=int)
    s.add_argument("--out", type=Path)
    s.add_argument("--trace", type=Path, help="write the step-log CSV here")

    r = sub.add_parser("report", help="compare finished runs")
    r.add_argument("dirs", nargs="+", type=Path)
    r.add_argument("--out", type=Path)

    g = sub.add_parser("synth-solar", help="write a synthetic timestamp,energy_mwh CSV (30-minute rows)")
    g.add_argument("--days", type=int, required=True)
    g.add_argument("--out", type=Path, required=True)
    g.add_argument("--panel-watts", type=float, default=3.0)
    g.add_argument("--latitude-factor", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "train":
        cfg = load_config(args.config)
        dirs = run_case(args.case, args.episodes, args.seed, args.out, cfg, _hyper(args), args.greedy)
        for d in dirs:
            print(d / "eval" / "metrics.json")
    elif args.command == "eval":
        start, steps = args.window or (None, None)
        out = args.out or args.checkpoint.parent.parent / "eval_cli"
        metrics, _ = evaluate(args.checkpoint, start, steps, args.greedy, args.seed, out)
        print(json.dumps({k: v for k, v in metrics.to_dict().items() if k != "per_node_active"}, indent=2))
    elif args.command == "simulate":
        cfg = load_config(args.config)
        if args.case is not None:
            cfg = get_case(args.case).apply(cfg)
        kwargs = {"round_robin": {"fraction": args.fraction}, "greedy_battery": {"k": args.k}}.get(args.policy, {})
        start, steps = args.window or (None, None)
        metrics, env = evaluate_policy(cfg, baseline_policy(args.policy, **kwargs), args.seed, start, steps, args.out)
        if args.trace:
            env.write_step_log(args.trace)
        print(json.dumps({k: v for k, v in metrics.to_dict().items() if k != "per_node_active"}, indent=2))
    elif args.command == "report":
        rows = report(args.dirs, args.out)
        for row in rows:
            print(row)
    elif args.command == "synth-solar":
        prof = synth_solar(args.days, args.panel_watts, args.latitude_factor, args.seed, raw=True)
        write_solar_csv(prof, args.out)
        print(f"wrote {len(prof)} rows to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
