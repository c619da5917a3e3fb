"""Command line front end: ``photoevents <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from ._validation import ConfigError
from .config import PipelineConfig, mu_grid
from .data import (DataFormatError, order_stream, read_interactions, read_photos, serialize_interactions,
                   serialize_photos)
from .graph import ConvergenceError, build_graph, top_ppr
from .metrics import evaluate
from .pipeline import (ablation, cluster_photos, fit_model, model_config, sweep,
                       theta_matrix, truth_of, verify_model_digest)
from .svm import SimilarityModel
from .synth import generate, load_profile

log = logging.getLogger("photoevents")

CSV_HEADER = ["photo_id", "cluster_id"]


class CommandError(Exception):
    pass


def write_atomic(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def clusters_csv(clustering) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for pid in clustering.items:
        w.writerow([pid, clustering.assignment[pid]])
    return buf.getvalue()


def read_clusters_csv(path) -> dict[str, int]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise DataFormatError(f"{path}: expected header {','.join(CSV_HEADER)!r}")
        out = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataFormatError(f"{path}: line {lineno}: expected 2 columns")
            try:
                cid = int(row[1])
            except ValueError:
                raise DataFormatError(f"{path}: line {lineno}: cluster_id must be an integer") from None
            if row[0] in out:
                raise DataFormatError(f"{path}: line {lineno}: duplicate photo_id {row[0]!r}")
            out[row[0]] = cid
    return out


# --
# config handling

def _load_config(args) -> PipelineConfig:
    if getattr(args, "config", None) and getattr(args, "profile", None):
        raise CommandError("--config and --profile are mutually exclusive")
    if getattr(args, "config", None):
        config = PipelineConfig.load(args.config)
    elif getattr(args, "profile", None):
        config = PipelineConfig.from_dict(load_profile(args.profile))
    else:
        config = PipelineConfig()
    return _apply_overrides(config, args)


def _apply_overrides(config: PipelineConfig, args) -> PipelineConfig:
    if getattr(args, "seed", None) is not None:
        config = (config.replace("sampling", seed=args.seed).replace("training", seed=args.seed)
                  .replace("synth", seed=args.seed))
    if getattr(args, "lam", None) is not None:
        config = config.replace("training", lam=args.lam)
    if getattr(args, "epochs", None) is not None:
        config = config.replace("training", epochs=args.epochs)
    if getattr(args, "alpha", None) is not None:
        config = config.replace("graph", alpha=args.alpha)
    if getattr(args, "social", None) is not None:
        config = config.replace("features", enable_social=args.social)
    if getattr(args, "order_key", None) is not None:
        config = config.replace("clustering", order_key=args.order_key)
    return config


def _interactions(path):
    return read_interactions(path) if path else []


def _load_model(path) -> SimilarityModel:
    with open(path, encoding="utf-8") as fh:
        model = SimilarityModel.from_json(fh.read())
    if not verify_model_digest(model):
        raise CommandError(f"{path}: config digest does not match the recorded config")
    return model


# --
# subcommands

def cmd_synth(args):
    config = _load_config(args)
    photos, interactions = generate(config.synth)
    write_atomic(args.out_photos, serialize_photos(photos))
    write_atomic(args.out_interactions, serialize_interactions(interactions))
    log.info("wrote %d photos, %d interactions", len(photos), len(interactions))


def cmd_train(args):
    config = _load_config(args)
    photos = read_photos(args.photos)
    model = fit_model(photos.photos, _interactions(args.interactions), config)
    write_atomic(args.model, model.to_json())


def cmd_cluster(args):
    model = _load_model(args.model)
    mu = model_config(model).clustering.mu if args.mu is None else args.mu
    photos = read_photos(args.photos)
    clustering = cluster_photos(model, photos.photos, _interactions(args.interactions), mu)
    write_atomic(args.out, clusters_csv(clustering))


def cmd_evaluate(args):
    predicted = read_clusters_csv(args.clusters)
    truth = truth_of(read_photos(args.photos).photos)
    report = evaluate(predicted, truth, mu=args.mu)
    write_atomic(args.out, dump_json(report.to_dict()))


def cmd_sweep(args):
    model = _load_model(args.model)
    cc = model_config(model).clustering
    mus = mu_grid(cc.mu_min if args.mu_min is None else args.mu_min,
                  cc.mu_max if args.mu_max is None else args.mu_max,
                  cc.mu_step if args.mu_step is None else args.mu_step)
    photos = read_photos(args.photos)
    stream = order_stream(photos.photos, cc.order_key)
    S = theta_matrix(model, stream, _interactions(args.interactions))
    reports = sweep(stream, S, mus, cc.window, cc.order_key)
    write_atomic(args.out, dump_json([r.to_dict() for r in reports]))


def cmd_ablation(args):
    config = _load_config(args)
    seeds = None
    if args.seeds:
        try:
            seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
        except ValueError:
            raise CommandError(f"--seeds must be comma-separated integers, got {args.seeds!r}") from None
    result = ablation(config, seeds)
    write_atomic(args.out, dump_json(result))


def cmd_ppr(args):
    config = _load_config(args)
    photos = read_photos(args.photos)
    if args.photo_id not in photos:
        raise CommandError(f"unknown photo_id {args.photo_id!r}")
    graph = build_graph(photos.photos, _interactions(args.interactions), config.graph)
    for kind, key, score in top_ppr(graph, args.photo_id, args.top_k, config.graph):
        print(f"{kind.value}\t{key}\t{score!r}")


# --
# parser

def _add_config_opts(p, seed=True):
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--profile", help="name of a shipped profile (e.g. ablation, clean)")
    if seed:
        p.add_argument("--seed", type=int, help="override all seeds")


def _add_training_opts(p):
    p.add_argument("--lambda", dest="lam", type=float, help="SVM regularization")
    p.add_argument("--epochs", type=int)
    p.add_argument("--alpha", type=float, help="restart probability of the walk")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--social", dest="social", action="store_true", default=None)
    g.add_argument("--no-social", dest="social", action="store_false")
    p.add_argument("--order-key", choices=["upload_time", "taken_time"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="photoevents", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    _add_config_opts(p)
    p.add_argument("--out-photos", required=True)
    p.add_argument("--out-interactions", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="sample pairs, fit the similarity model")
    _add_config_opts(p)
    _add_training_opts(p)
    p.add_argument("--photos", required=True)
    p.add_argument("--interactions")
    p.add_argument("--model", required=True, help="output model JSON")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cluster", help="cluster a photo stream with a trained model")
    p.add_argument("--photos", required=True)
    p.add_argument("--interactions")
    p.add_argument("--model", required=True)
    p.add_argument("--mu", type=float)
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("evaluate", help="score a clustering CSV against photo event_ids")
    p.add_argument("--clusters", required=True)
    p.add_argument("--photos", required=True)
    p.add_argument("--mu", type=float, help="threshold to record in the report")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="metrics across a range of thresholds")
    p.add_argument("--photos", required=True)
    p.add_argument("--interactions")
    p.add_argument("--model", required=True)
    p.add_argument("--mu-min", type=float)
    p.add_argument("--mu-max", type=float)
    p.add_argument("--mu-step", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ablation", help="photo-only vs photo+social on synthetic data")
    _add_config_opts(p, seed=False)
    p.add_argument("--seeds", help="comma-separated seeds (default from config)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ablation)

    p = sub.add_parser("ppr", help="print top random-walk scores from one photo")
    _add_config_opts(p, seed=False)
    p.add_argument("--alpha", type=float)
    p.add_argument("--photos", required=True)
    p.add_argument("--interactions")
    p.add_argument("--photo-id", required=True)
    p.add_argument("--top-k", type=int, default=20)
    p.set_defaults(func=cmd_ppr)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (CommandError, ConfigError, DataFormatError, ConvergenceError, ValueError, OSError) as e:
        print(f"photoevents: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
