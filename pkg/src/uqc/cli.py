"""Command-line driver: ``uqc gen-data | train | infer | transpile | reproduce``.

Settings are resolved as command-line flags, then a JSON ``--config`` file,
then the built-in defaults in :data:`PROBLEM_DEFAULTS`. Every seed is a flag
with a fixed default, so a command line fully determines its outputs.

Exit status is 0 on success, 2 for configuration errors and 1 for runtime
failures.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from . import backend as bk
from . import data, trainer, transpiler
from .model import UqcParams, label_states

log = logging.getLogger("uqc")

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2

# problem -> layers, train/test/inference sizes, shots
PROBLEM_DEFAULTS = {
    # binary problems: 6 layers; 200 inference points at 100 shots
    "circle": {"layers": 6, "train_n": 1000, "test_n": 2000, "infer_n": 200, "shots": 100},
    "sine": {"layers": 6, "train_n": 1000, "test_n": 2000, "infer_n": 200, "shots": 100},
    # three classes: 10 layers; 150 inference points
    "two-circles": {"layers": 10, "train_n": 1000, "test_n": 2000, "infer_n": 150, "shots": 100},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    problem: str = "circle"
    layers: int | None = None
    train_n: int | None = None
    test_n: int | None = None
    infer_n: int | None = None
    learning_rate: float = 0.6
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    epochs: int = 20
    batch_size: int = 100
    restarts: int = 1
    backend: str = "exact"
    depolarizing_p: float | None = None
    readout_flip_0to1: float | None = None
    readout_flip_1to0: float | None = None
    shots: int | None = None
    data_seed: int = 7
    init_seed: int = 0
    shuffle_seed: int = 0
    sampler_seed: int = 0
    out: str = "out"

    def resolved(self) -> "RunConfig":
        try:
            problem = data.Problem.parse(self.problem).value
        except ValueError as err:
            raise ConfigError(str(err)) from None
        table = PROBLEM_DEFAULTS[problem]
        cfg = replace(self, problem=problem, **{k: getattr(self, k) if getattr(self, k) is not None
                                                else v for k, v in table.items()})
        if cfg.backend not in ("exact", "sampler"):
            raise ConfigError(f"backend must be 'exact' or 'sampler', not {cfg.backend!r}")
        for name in ("layers", "train_n", "test_n", "infer_n", "shots", "epochs",
                     "batch_size", "restarts"):
            if getattr(cfg, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        return cfg

    def adam(self) -> trainer.AdamConfig:
        try:
            return trainer.AdamConfig(self.learning_rate, self.beta1, self.beta2, self.epsilon)
        except ValueError as err:
            raise ConfigError(str(err)) from None

    def noise(self) -> bk.NoiseModel:
        base = asdict(bk.default_noise())
        for k in base:
            if getattr(self, k) is not None:
                base[k] = getattr(self, k)
        try:
            return bk.NoiseModel(**base)
        except ValueError as err:
            raise ConfigError(str(err)) from None

    def make_backend(self, kind: str | None = None):
        kind = kind or self.backend
        if kind == "exact":
            return bk.ExactBackend()
        return bk.SamplerBackend(self.sampler_seed, self.noise())


# provenance ---------------------------------------------------------------

def _hashed_config(cfg: RunConfig) -> dict:
    # the output location does not influence any result
    return {k: v for k, v in asdict(cfg).items() if k != "out"}


def config_hash(cfg: RunConfig) -> str:
    blob = json.dumps(_hashed_config(cfg), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def provenance(cfg: RunConfig, command: str) -> dict:
    return {
        "tool": "uqc",
        "version": __version__,
        "command": command,
        "config_hash": config_hash(cfg),
        "seeds": {"data": cfg.data_seed, "datasets": dataset_seeds(cfg.data_seed),
                  "init": cfg.init_seed, "shuffle": cfg.shuffle_seed,
                  "sampler": cfg.sampler_seed},
    }


def write_manifest(out: Path, cfg: RunConfig, command: str) -> None:
    """Record provenance and SHA-256 of every file in ``out`` (recursively)."""
    files = {}
    for p in sorted(out.rglob("*")):
        if p.is_file() and p.name != "manifest.json":
            files[p.relative_to(out).as_posix()] = data.file_sha256(p)
    doc = {"provenance": provenance(cfg, command), "config": _hashed_config(cfg),
           "files": files}
    _write_json(out / "manifest.json", doc)


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=1, sort_keys=False) + "\n", encoding="utf-8")


def _write_jsonl(path: Path, records) -> None:
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")


def _out_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise data.DatasetIOError(f"cannot create {out}: {err}") from err
    return out


# pipeline steps -------------------------------------------------------------

def dataset_seeds(data_seed: int) -> dict:
    """Train, test and inference sets use consecutive seeds."""
    return {"train": data_seed, "test": data_seed + 1, "infer": data_seed + 2}


def generate_sets(cfg: RunConfig) -> dict:
    seeds = dataset_seeds(cfg.data_seed)
    sizes = {"train": cfg.train_n, "test": cfg.test_n, "infer": cfg.infer_n}
    return {k: data.generate(cfg.problem, sizes[k], seeds[k]) for k in seeds}


def train_model(cfg: RunConfig, train_set, test_set):
    """Train ``cfg.restarts`` models from consecutive init/shuffle seeds and keep
    the one with the best test accuracy (earliest restart on ties)."""
    best = None
    for r in range(cfg.restarts):
        tcfg = trainer.TrainConfig(cfg.epochs, cfg.batch_size, cfg.shuffle_seed + r)
        params, metrics = trainer.train(train_set, test_set, cfg.layers, cfg.adam(), tcfg,
                                        init_seed=cfg.init_seed + r)
        score = max(metrics.test_accuracy)
        log.info("%s restart %d: best test accuracy %.4f at epoch %d (%.2f s)", cfg.problem, r,
                 score, metrics.best_epoch, sum(metrics.seconds))
        if best is None or score > best[0]:
            best = (score, r, params, metrics)
    _, r, params, metrics = best
    meta = {"problem_name": cfg.problem, "seed": cfg.init_seed + r,
            "shuffle_seed": cfg.shuffle_seed + r, "best_epoch": metrics.best_epoch}
    return UqcParams(params.values, params.num_classes, meta), metrics


def run_inference(cfg: RunConfig, params: UqcParams, infer_set, kind: str | None = None,
                  model_id: str = ""):
    backend = cfg.make_backend(kind)
    res = bk.infer_dataset(params, infer_set.points, label_states(params.num_classes),
                           backend, cfg.shots, model_id)
    acc = float(np.mean(res.labels == infer_set.labels))
    summary = {
        "accuracy": acc,
        "total_measurements": res.total_measurements,
        "backend": backend.kind,
        "noise": asdict(backend.noise) if isinstance(backend, bk.SamplerBackend) else None,
        "seed": backend.seed if isinstance(backend, bk.SamplerBackend) else None,
        "shots": cfg.shots,
        "points": len(infer_set),
    }
    return res, summary


def write_predictions(path: Path, points, labels) -> None:
    lines = ["x1,x2,predicted_label"]
    lines += [f"{a:.17g},{b:.17g},{int(c)}" for (a, b), c in zip(points, labels)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# commands -------------------------------------------------------------------

def cmd_gen_data(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg.out)
    sets = generate_sets(cfg)
    for name, ds in sets.items():
        data.save_csv(ds, out / f"{name}.csv")
    write_manifest(out, cfg, "gen-data")
    log.info("wrote %s", ", ".join(f"{k}.csv ({len(v)} rows)" for k, v in sets.items()))
    return EXIT_OK


def _load_set(path, problem, name):
    try:
        return data.load_csv(path, problem)
    except data.LabelRangeError as err:
        raise ConfigError(f"{name} data does not match problem {problem}: {err}") from None


def cmd_train(cfg: RunConfig, args) -> int:
    data_dir = Path(args.data_dir or cfg.out)
    train_set = _load_set(data_dir / "train.csv", cfg.problem, "training")
    test_set = _load_set(data_dir / "test.csv", cfg.problem, "test")
    if args.num_classes is not None and args.num_classes != train_set.num_classes:
        raise ConfigError(f"num_classes {args.num_classes} does not match problem "
                          f"{cfg.problem} ({train_set.num_classes} classes)")
    if cfg.batch_size > len(train_set):
        raise ConfigError("batch_size exceeds the training set size")
    out = _out_dir(cfg.out)
    params, metrics = train_model(cfg, train_set, test_set)
    params.save(out / "model.json", provenance=provenance(cfg, "train"))
    _write_jsonl(out / "metrics.jsonl", metrics.records(with_time=not args.no_timing))
    write_manifest(out, cfg, "train")
    log.info("final model: epoch %d, test accuracy %.4f", metrics.best_epoch,
             metrics.test_accuracy[metrics.best_epoch - 1])
    return EXIT_OK


def _load_model(path) -> UqcParams:
    try:
        return UqcParams.load(path)
    except (ValueError, KeyError) as err:
        raise ConfigError(f"cannot read model {path}: {err}") from None


def cmd_infer(cfg: RunConfig, args) -> int:
    params = _load_model(args.model)
    problem = args.problem or params.meta.get("problem_name") or cfg.problem
    cfg = replace(cfg, problem=problem).resolved()
    if data.Problem.parse(problem).num_classes != params.num_classes:
        raise ConfigError(f"model has {params.num_classes} classes but problem {problem} "
                          f"has {data.Problem.parse(problem).num_classes}")
    infer_set = _load_set(args.data, problem, "inference")
    out = _out_dir(cfg.out)
    res, summary = run_inference(cfg, params, infer_set, model_id=Path(args.model).name)
    summary["provenance"] = provenance(cfg, "infer")
    tag = summary["backend"]
    _write_jsonl(out / f"report_{tag}.jsonl",
                 res.records(infer_set.points, infer_set.labels) + [{"summary": summary}])
    write_predictions(out / f"predictions_{tag}.csv", infer_set.points, res.labels)
    write_manifest(out, cfg, "infer")
    log.info("%s accuracy %.4f over %d measurements", tag, summary["accuracy"],
             summary["total_measurements"])
    return EXIT_OK


def cmd_transpile(cfg: RunConfig, args) -> int:
    params = _load_model(args.model)
    if args.basis not in transpiler.BASES:
        raise ConfigError(f"basis must be one of {transpiler.BASES}")
    prog = transpiler.compile_point(params, args.point, args.basis, cfg.shots,
                                    model_id=Path(args.model).name)
    text = transpiler.serialize(prog)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_OK


def reproduce_problem(cfg: RunConfig, out: Path) -> dict:
    """Data, training and both inference backends for one problem."""
    t0 = time.perf_counter()
    sets = generate_sets(cfg)
    for name, ds in sets.items():
        data.save_csv(ds, out / f"{name}.csv")
    params, metrics = train_model(cfg, sets["train"], sets["test"])
    params.save(out / "model.json", provenance=provenance(cfg, "reproduce"))
    _write_jsonl(out / "metrics.jsonl", metrics.records(with_time=False))
    row = {"problem": cfg.problem, "layers": cfg.layers,
           "test_accuracy": metrics.test_accuracy[metrics.best_epoch - 1],
           "best_epoch": metrics.best_epoch}
    for kind in ("exact", "sampler"):
        res, summary = run_inference(cfg, params, sets["infer"], kind, "model.json")
        _write_jsonl(out / f"report_{kind}.jsonl",
                     res.records(sets["infer"].points, sets["infer"].labels) + [{"summary": summary}])
        write_predictions(out / f"predictions_{kind}.csv", sets["infer"].points, res.labels)
        row[f"{'ideal' if kind == 'exact' else 'sampler'}_accuracy"] = summary["accuracy"]
        row[f"{kind}_measurements"] = summary["total_measurements"]
    log.info("%s done in %.1f s: %s", cfg.problem, time.perf_counter() - t0, row)
    return row


def cmd_reproduce(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg.out)
    rows = []
    for name in PROBLEM_DEFAULTS:
        sub = replace(cfg, problem=name).resolved()
        if sub.batch_size > sub.train_n:
            raise ConfigError("batch_size exceeds the training set size")
        rows.append(reproduce_problem(sub, _out_dir(out / name)))
    cols = ["problem", "layers", "test_accuracy", "best_epoch", "ideal_accuracy",
            "sampler_accuracy", "exact_measurements", "sampler_measurements"]
    lines = [",".join(cols)] + [",".join(str(r[c]) for c in cols) for r in rows]
    (out / "summary.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_json(out / "summary.json", {"provenance": provenance(cfg, "reproduce"),
                                       "noise": asdict(cfg.noise()), "rows": rows})
    write_manifest(out, cfg, "reproduce")
    for r in rows:
        log.info("%-12s ideal %.3f  sampler %.3f", r["problem"], r["ideal_accuracy"],
                 r["sampler_accuracy"])
    return EXIT_OK


# argument parsing -------------------------------------------------------------

_FLAG_TO_FIELD = {f.name: f.name for f in fields(RunConfig)}


def _common(p: argparse.ArgumentParser, training=False, inference=False):
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--out", help="output directory")
    p.add_argument("--problem", help="circle, sine or two-circles")
    p.add_argument("--data-seed", dest="data_seed", type=int)
    p.add_argument("--seed", dest="data_seed", type=int, help="alias of --data-seed")
    if training:
        p.add_argument("--layers", type=int)
        p.add_argument("--lr", dest="learning_rate", type=float)
        p.add_argument("--beta1", type=float)
        p.add_argument("--beta2", type=float)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--epochs", type=int)
        p.add_argument("--batch-size", dest="batch_size", type=int)
        p.add_argument("--restarts", type=int)
        p.add_argument("--init-seed", dest="init_seed", type=int)
        p.add_argument("--shuffle-seed", dest="shuffle_seed", type=int)
    if inference:
        p.add_argument("--backend", choices=["exact", "sampler"])
        p.add_argument("--shots", type=int)
        p.add_argument("--sampler-seed", dest="sampler_seed", type=int)
        p.add_argument("--depolarizing", dest="depolarizing_p", type=float)
        p.add_argument("--readout-01", dest="readout_flip_0to1", type=float)
        p.add_argument("--readout-10", dest="readout_flip_1to0", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uqc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"uqc {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write train/test/inference CSVs")
    _common(p)
    p.add_argument("--train-n", dest="train_n", type=int)
    p.add_argument("--test-n", dest="test_n", type=int)
    p.add_argument("--infer-n", dest="infer_n", type=int)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train a model on train.csv / test.csv")
    _common(p, training=True)
    p.add_argument("--data-dir", help="directory holding train.csv and test.csv")
    p.add_argument("--num-classes", type=int)
    p.add_argument("--no-timing", action="store_true",
                   help="omit wall-clock seconds from metrics.jsonl")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("infer", help="classify an inference CSV on a backend")
    _common(p, inference=True)
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="inference CSV")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("transpile", help="compile one point to a native program")
    _common(p, inference=True)
    p.add_argument("--model", required=True)
    p.add_argument("--point", nargs=2, type=float, required=True, metavar=("X1", "X2"))
    p.add_argument("--basis", default="Z")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("reproduce", help="run the full pipeline for all three problems")
    _common(p, training=True, inference=True)
    p.add_argument("--train-n", dest="train_n", type=int)
    p.add_argument("--test-n", dest="test_n", type=int)
    p.set_defaults(func=cmd_reproduce, reproduce=True)
    return parser


def resolve_config(args) -> RunConfig:
    values = {}
    if args.config:
        try:
            values.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {args.config}: {err}") from None
        unknown = set(values) - set(_FLAG_TO_FIELD)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for name in _FLAG_TO_FIELD:
        val = getattr(args, name, None)
        if val is not None:
            values[name] = val
    if getattr(args, "reproduce", False):
        values.setdefault("restarts", 3)
    return RunConfig(**values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        if args.command not in ("infer", "reproduce"):
            cfg = cfg.resolved()
        return args.func(cfg, args)
    except (ConfigError, data.DatasetFormatError, transpiler.ProgramSchemaError) as err:
        print(f"uqc: configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, RuntimeError) as err:
        print(f"uqc: error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
