"""Command-line entry point.

Subcommands:
    train       train a model from scratch, write checkpoint + JSONL log
    eval        per-appearance completion-time table on the delivery sequence
    heatmap     Reach(D) visit-frequency grid (CSV + PGM) on a fixed map
    finetune    cargo-stage continual learning: heads and task embeddings only
    grad-check  finite-difference verification of the full backward pass

Run `sem-a2c <subcommand> --help` for flags. Config files are JSON documents
whose keys mirror TrainConfig; unknown keys are rejected.
"""

import argparse
import json
import os
import sys

import numpy as np

from .harness import (
    NetPolicy,
    collect_heatmap,
    eval_by_appearance,
    full_model_grad_check,
    load_net,
    save_checkpoint,
)
from .harness.heatmap import CONDITIONS
from .models import MODEL_NAMES, ModelConfig
from .training import Trainer, load_config


def _parse_task_flag(s):
    if s is None:
        return None
    return s if "," not in s else [t.strip() for t in s.split(",")]


def _config_echo(cfg):
    doc = dict(cfg.__dict__)
    doc["tasks"] = cfg.task_names
    return doc


def _train_config(args, extra_overrides=None):
    overrides = {
        "seed": args.seed,
        "model": getattr(args, "model", None),
        "map_size": args.map,
        "total_env_steps": args.steps,
        "tasks": _parse_task_flag(getattr(args, "tasks", None)),
    }
    if extra_overrides:
        overrides.update(extra_overrides)
    return load_config(args.config, overrides)


def cmd_train(args):
    cfg = _train_config(args)
    os.makedirs(args.out, exist_ok=True)
    log_path = os.path.join(args.out, "train_log.jsonl")
    if os.path.exists(log_path):
        os.remove(log_path)
    trainer = Trainer(cfg, log_path=log_path, verbose=not args.quiet)
    trainer.train()
    ckpt = os.path.join(args.out, "checkpoint.bin")
    save_checkpoint(ckpt, trainer.net.params, cfg.model, trainer.model_cfg,
                    config_echo=_config_echo(cfg), seed=cfg.seed)
    print(f"trained {trainer.env_steps} env steps; checkpoint: {ckpt}")
    return 0


def cmd_eval(args):
    net, manifest = load_net(args.checkpoint)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed).spawn(1)[0])
    policy = NetPolicy(net, rng,
                       use_predicted_completion=args.use_predicted_completion)
    report = eval_by_appearance(policy, args.runs, map_size=args.map,
                                episode_len=args.episode_len, seed=args.seed)
    csv_text = report.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(csv_text)
    return 0


def cmd_heatmap(args):
    net, _ = load_net(args.checkpoint)
    children = np.random.SeedSequence(args.seed + 1).spawn(max(args.runs, 1))

    def factory(run):
        return NetPolicy(net, np.random.default_rng(children[run]))

    grid = collect_heatmap(factory, args.seed, args.runs, args.condition,
                           map_size=args.map, episode_len=args.episode_len)
    grid.to_csv(args.out + ".csv")
    grid.to_pgm(args.out + ".pgm")
    print(f"{grid.segments} matching segments over {args.runs} runs; "
          f"wrote {args.out}.csv and {args.out}.pgm")
    return 0


def cmd_finetune(args):
    net, manifest = load_net(args.checkpoint)
    pretrain_tasks = (manifest.get("config") or {}).get("tasks")
    if pretrain_tasks is None:
        print("checkpoint carries no task-set echo; cannot verify reach_c "
              "pretraining", file=sys.stderr)
        return 1
    cfg = _train_config(args, extra_overrides={"tasks": "all7",
                                               "model": manifest["model"]})
    os.makedirs(args.out, exist_ok=True)
    log_path = os.path.join(args.out, "finetune_log.jsonl")
    if os.path.exists(log_path):
        os.remove(log_path)

    net, log, trainables = _finetune(net, pretrain_tasks, cfg, log_path,
                                     verbose=not args.quiet)
    ckpt = os.path.join(args.out, "checkpoint.bin")
    save_checkpoint(ckpt, net.params, manifest["model"],
                    ModelConfig(**manifest["model_config"]),
                    config_echo=_config_echo(cfg), seed=cfg.seed)
    print(f"fine-tuned (trainable: {', '.join(trainables)}); checkpoint: {ckpt}")
    return 0


def _finetune(net, pretrain_tasks, cfg, log_path, verbose):
    from .training.loop import continual_freeze
    from .env import TaskId as T

    # same precondition as finetune_continual, but wiring the trainer to a
    # log file and verbosity
    names = {t if isinstance(t, str) else T(t).name.lower() for t in pretrain_tasks}
    if "reach_c" not in names:
        raise ValueError("pretraining task set lacks reach_c")
    trainables = continual_freeze(net.params)
    trainer = Trainer(cfg, net=net, log_path=log_path, verbose=verbose)
    log = trainer.train()
    return net, log, trainables


def cmd_grad_check(args):
    report = full_model_grad_check(model=args.model, seed=args.seed,
                                   max_entries=args.entries)
    print(report.format(tol=args.tol))
    ok = report.passed(args.tol)
    print(f"max relative error {report.max_rel_error:.3e} "
          f"({'PASS' if ok else 'FAIL'} at {args.tol:g})")
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="sem-a2c", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, checkpoint=False):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--map", type=int, default=None,
                       help="square map side length")
        if checkpoint:
            p.add_argument("--checkpoint", required=True)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--config", default=None, help="JSON config path")
    p.add_argument("--model", choices=MODEL_NAMES, default=None)
    p.add_argument("--tasks", default=None,
                   help="task alias (taxi4/pretrain5/all7) or comma list")
    p.add_argument("--steps", type=int, default=None, help="total env steps")
    p.add_argument("--out", default="runs/train")
    p.add_argument("--quiet", action="store_true")
    common(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="appearance-index completion table")
    p.add_argument("--runs", type=int, default=500)
    p.add_argument("--episode-len", type=int, default=400)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.add_argument("--use-predicted-completion", action="store_true",
                   help="feed the model its own completion prediction")
    common(p, checkpoint=True)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("heatmap", help="Reach(D) visit-frequency grid")
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--episode-len", type=int, default=400)
    p.add_argument("--condition", choices=CONDITIONS, default="after-target-visit")
    p.add_argument("--out", required=True, help="output path prefix")
    common(p, checkpoint=True)
    p.set_defaults(fn=cmd_heatmap)

    p = sub.add_parser("finetune", help="cargo-stage continual learning")
    p.add_argument("--config", default=None)
    p.add_argument("--steps", type=int, default=None, help="fine-tuning budget")
    p.add_argument("--out", default="runs/finetune")
    p.add_argument("--quiet", action="store_true")
    common(p, checkpoint=True)
    p.set_defaults(fn=cmd_finetune)

    p = sub.add_parser("grad-check", help="finite-difference gradient audit")
    p.add_argument("--model", choices=MODEL_NAMES, default="sem")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--entries", type=int, default=25,
                   help="sampled entries per parameter group")
    p.set_defaults(fn=cmd_grad_check)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)

    # defaults that only apply when neither config nor flag set them
    if getattr(args, "map", None) is None and args.command in ("eval", "heatmap"):
        args.map = 15

    try:
        return args.fn(args)
    except (ValueError, RuntimeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
