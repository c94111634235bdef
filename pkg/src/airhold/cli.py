"""Command-line orchestration of the pipeline with file-based handoffs.

Every stage writes a manifest next to its primary output recording seed,
config digest, and sha256 digests of inputs and outputs, so re-runs can be
audited and chained. All stages are deterministic from their seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import centrality, features, gat, gbdt, metrics, records
from .errors import AirholdError
from .graph import graph_from_json, graph_to_json

log = logging.getLogger("airhold")


def _digest_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _digest_config(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def _write_manifest(primary_out: Path, subcommand: str, seed, cfg: dict, inputs: list[Path], outputs: list[Path]):
    manifest = {
        "subcommand": subcommand,
        "seed": seed,
        "config_digest": _digest_config(cfg),
        "config": cfg,
        "inputs": {str(p): _digest_file(p) for p in inputs},
        "outputs": {str(p): _digest_file(p) for p in outputs},
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    path = primary_out.with_name(primary_out.name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _check_inputs(parser: argparse.ArgumentParser, *paths: Path):
    for p in paths:
        if not p.exists():
            parser.error(f"missing input file: {p}")


def _load_dataset(path: Path) -> records.Dataset:
    return records.parse_records(path.read_bytes())


def cmd_synth(args, parser) -> int:
    ds = records.synth_generate(args.seed, args.n, args.positives, args.airports)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(records.serialize_records(ds))
    _write_manifest(out, "synth", args.seed, {"n": args.n, "positives": args.positives, "airports": args.airports}, [], [out])
    log.info("wrote %s (%d records, %d positives)", out, len(ds), ds.positives)
    return 0


def cmd_split(args, parser) -> int:
    data = Path(args.data)
    _check_inputs(parser, data)
    ds = _load_dataset(data)
    train, test = records.stratified_split(ds, args.test_fraction, args.seed)
    train_out, test_out = Path(args.train_out), Path(args.test_out)
    train_out.write_bytes(records.serialize_records(train))
    test_out.write_bytes(records.serialize_records(test))
    _write_manifest(train_out, "split", args.seed, {"test_fraction": args.test_fraction}, [data], [train_out, test_out])
    return 0


def cmd_build_graph(args, parser) -> int:
    train = Path(args.train)
    _check_inputs(parser, train)
    ds = _load_dataset(train)
    index = features.GraphFeatureIndex(ds.records)
    graph_out = Path(args.graph_out)
    graph_out.write_text(graph_to_json(index.digraph))
    outputs = [graph_out]
    if args.edge_features_out:
        ef_out = Path(args.edge_features_out)
        ef_out.write_text(centrality.features_to_csv(index.digraph, index.edge_features))
        outputs.append(ef_out)
    _write_manifest(graph_out, "build-graph", None, {}, [train], outputs)
    return 0


def cmd_features(args, parser) -> int:
    train, data = Path(args.train), Path(args.data)
    _check_inputs(parser, train, data)
    train_ds = _load_dataset(train)
    data_ds = _load_dataset(data)
    registry = features.default_registry()
    index = features.GraphFeatureIndex(train_ds.records)
    augmented = features.attach_graph_features(train_ds.records, data_ds.records, index)
    matrix = features.build_matrix(augmented, registry)
    matrix_out = Path(args.matrix_out)
    matrix_out.write_text(features.matrix_to_csv(matrix))
    outputs = [matrix_out]
    if args.registry_out:
        reg_out = Path(args.registry_out)
        reg_out.write_text(features.registry_to_json(registry))
        outputs.append(reg_out)
    _write_manifest(matrix_out, "features", None, {}, [train, data], outputs)
    return 0


def _train_config_from_json(path: Path | None, seed: int) -> gbdt.TrainConfig:
    cfg = {}
    if path is not None:
        cfg = json.loads(path.read_text())
    cfg.setdefault("seed", seed)
    return gbdt.TrainConfig(**cfg)


def cmd_train_gbdt(args, parser) -> int:
    matrix_path, registry_path = Path(args.matrix), Path(args.registry)
    _check_inputs(parser, matrix_path, registry_path)
    cfg_path = Path(args.config) if args.config else None
    if cfg_path is not None:
        _check_inputs(parser, cfg_path)
    registry = features.registry_from_json(registry_path.read_text())
    matrix = features.matrix_from_csv(matrix_path.read_text(), registry)
    cfg = _train_config_from_json(cfg_path, args.seed)
    if args.task == "cls":
        model = gbdt.train_classifier(matrix, cfg)
    else:
        model = gbdt.train_regressor(matrix, cfg)
    out = Path(args.model_out)
    out.write_text(gbdt.save_model(model))
    inputs = [matrix_path, registry_path] + ([cfg_path] if cfg_path else [])
    _write_manifest(out, "train-gbdt", cfg.seed, {"task": args.task, **cfg.__dict__}, inputs, [out])
    log.info("trained %s: loss %.6f -> %.6f", args.task, model.loss_trace[0], model.loss_trace[-1])
    return 0


def cmd_train_gat(args, parser) -> int:
    train_path, test_path = Path(args.train), Path(args.test)
    _check_inputs(parser, train_path, test_path)
    train_ds = _load_dataset(train_path)
    test_ds = _load_dataset(test_path)
    cfg = gat.GatConfig(
        layers=args.layers,
        heads=args.heads,
        hidden_dim=args.hidden_dim,
        learning_rate=args.lr,
        epochs=args.epochs,
        seed=args.seed,
    )
    batch = gat.GraphBatch.from_records(train_ds.records)
    params, trace = gat.train(batch, cfg)
    test_batch = gat.GraphBatch.from_records(test_ds.records, scaler=batch.scaler)
    probs = gat.edge_predict(params, cfg, test_batch)
    rep = metrics.classification_metrics(test_batch.labels > 0.5, probs, args.threshold)
    outputs = []
    if args.params_out:
        p_out = Path(args.params_out)
        p_out.write_text(gat.save_params(params, cfg))
        outputs.append(p_out)
    row_out = Path(args.metrics_out)
    label = f"{args.layers} GAT Layer" + ("s" if args.layers > 1 else "")
    row_out.write_text(_table_row_csv(label, rep))
    outputs.append(row_out)
    _write_manifest(row_out, "train-gat", args.seed, cfg.__dict__, [train_path, test_path], outputs)
    log.info("gat layers=%d: loss %.4f -> %.4f", args.layers, trace[0], trace[-1])
    return 0


def _table_row_csv(label: str, rep: metrics.MetricsReport) -> str:
    header = "model,accuracy,precision,recall,f1"
    row = f"{label},{rep.accuracy:.4f},{rep.precision:.4f},{rep.recall:.4f},{rep.f1:.4f}"
    return header + "\n" + row + "\n"


def cmd_evaluate(args, parser) -> int:
    model_path, matrix_path, registry_path = Path(args.model), Path(args.data), Path(args.registry)
    _check_inputs(parser, model_path, matrix_path, registry_path)
    model = gbdt.load_model(model_path.read_text())
    registry = features.registry_from_json(registry_path.read_text())
    matrix = features.matrix_from_csv(matrix_path.read_text(), registry)
    preds = gbdt.predict_many(model, matrix.rows)
    if model.task == "classification":
        rep = metrics.classification_metrics(matrix.labels_cls, preds, args.threshold)
    else:
        rep = metrics.regression_metrics(matrix.labels_reg, preds)
    report_out = Path(args.report)
    report_out.write_text(json.dumps(rep.as_dict(), indent=2, sort_keys=True) + "\n")
    outputs = [report_out]
    if args.csv_row:
        row_out = Path(args.csv_row)
        row_out.write_text(_table_row_csv(args.label, rep))
        outputs.append(row_out)
    _write_manifest(report_out, "evaluate", None, {"threshold": args.threshold}, [model_path, matrix_path], outputs)
    return 0


def _load_snapshot(model_dir: Path, graph_path: Path | None):
    from .service import ModelSnapshot

    cls_path = model_dir / "gbdt_cls.json"
    reg_path = model_dir / "gbdt_reg.json"
    registry_path = model_dir / "registry.json"
    graph_path = graph_path or model_dir / "graph.json"
    for p in (cls_path, reg_path, registry_path, graph_path):
        if not p.exists():
            raise AirholdError(f"missing model artifact {p}")
    classifier = gbdt.load_model(cls_path.read_text())
    regressor = gbdt.load_model(reg_path.read_text())
    registry = features.registry_from_json(registry_path.read_text())
    digraph = graph_from_json(graph_path.read_text())
    index = features.GraphFeatureIndex(digraph=digraph)
    return ModelSnapshot(
        classifier=classifier,
        regressor=regressor,
        registry=registry,
        index=index,
        versions={"classifier": gbdt.MODEL_FORMAT_VERSION, "regressor": gbdt.MODEL_FORMAT_VERSION},
    )


def cmd_serve(args, parser) -> int:
    from .service import serve

    snapshot = _load_snapshot(Path(args.model_dir), Path(args.graph) if args.graph else None)
    serve(snapshot, args.bind)
    return 0


def cmd_pipeline(args, parser) -> int:
    """synth -> split -> graph -> features -> train (cls+reg) -> evaluate."""
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = args.seed

    log.info("stage 1/6: synthesize dataset")
    ds = records.synth_generate(seed, args.n, args.positives, args.airports)
    dataset_csv = out_dir / "dataset.csv"
    dataset_csv.write_bytes(records.serialize_records(ds))
    _write_manifest(dataset_csv, "synth", seed, {"n": args.n, "positives": args.positives, "airports": args.airports}, [], [dataset_csv])

    log.info("stage 2/6: stratified split")
    train, test = records.stratified_split(ds, args.test_fraction, seed)
    train_csv, test_csv = out_dir / "train.csv", out_dir / "test.csv"
    train_csv.write_bytes(records.serialize_records(train))
    test_csv.write_bytes(records.serialize_records(test))
    _write_manifest(train_csv, "split", seed, {"test_fraction": args.test_fraction}, [dataset_csv], [train_csv, test_csv])

    log.info("stage 3/6: training-graph features")
    index = features.GraphFeatureIndex(train.records)
    graph_json = out_dir / "graph.json"
    graph_json.write_text(graph_to_json(index.digraph))
    edge_csv = out_dir / "edge_features.csv"
    edge_csv.write_text(centrality.features_to_csv(index.digraph, index.edge_features))
    _write_manifest(graph_json, "build-graph", seed, {}, [train_csv], [graph_json, edge_csv])

    log.info("stage 4/6: feature matrices")
    registry = features.default_registry()
    registry_json = out_dir / "registry.json"
    registry_json.write_text(features.registry_to_json(registry))
    train_matrix = features.build_matrix(features.attach_graph_features(train.records, train.records, index), registry)
    test_matrix = features.build_matrix(features.attach_graph_features(train.records, test.records, index), registry)
    train_matrix_csv, test_matrix_csv = out_dir / "train_matrix.csv", out_dir / "test_matrix.csv"
    train_matrix_csv.write_text(features.matrix_to_csv(train_matrix))
    test_matrix_csv.write_text(features.matrix_to_csv(test_matrix))
    _write_manifest(train_matrix_csv, "features", seed, {}, [train_csv, test_csv, graph_json], [train_matrix_csv, test_matrix_csv, registry_json])

    log.info("stage 5/6: train gbdt models (%d rounds)", args.rounds)
    cfg = gbdt.TrainConfig(rounds=args.rounds, seed=seed)
    classifier = gbdt.train_classifier(train_matrix, cfg)
    regressor = gbdt.train_regressor(train_matrix, cfg)
    cls_json, reg_json = out_dir / "gbdt_cls.json", out_dir / "gbdt_reg.json"
    cls_json.write_text(gbdt.save_model(classifier))
    reg_json.write_text(gbdt.save_model(regressor))
    _write_manifest(cls_json, "train-gbdt", seed, {"task": "cls", **cfg.__dict__}, [train_matrix_csv], [cls_json])
    _write_manifest(reg_json, "train-gbdt", seed, {"task": "reg", **cfg.__dict__}, [train_matrix_csv], [reg_json])

    log.info("stage 6/6: evaluate on the test split")
    cls_probs = gbdt.predict_many(classifier, test_matrix.rows)
    cls_rep = metrics.classification_metrics(test_matrix.labels_cls, cls_probs, args.threshold)
    reg_preds = gbdt.predict_many(regressor, test_matrix.rows)
    reg_rep = metrics.regression_metrics(test_matrix.labels_reg, reg_preds)
    report = {
        "classification": cls_rep.as_dict(),
        "regression": reg_rep.as_dict(),
        "importances": gbdt.feature_importance(classifier),
        "config": {"seed": seed, "rounds": args.rounds, "threshold": args.threshold,
                   "n": args.n, "positives": args.positives, "airports": args.airports,
                   "test_fraction": args.test_fraction},
    }
    report_json = out_dir / "report.json"
    report_json.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    row_csv = out_dir / "report_row.csv"
    row_csv.write_text(_table_row_csv("GBDT with graph features", cls_rep))
    _write_manifest(report_json, "evaluate", seed, {"threshold": args.threshold}, [cls_json, reg_json, test_matrix_csv], [report_json, row_csv])

    if args.with_gat:
        log.info("extra stage: GAT sweep")
        batch = gat.GraphBatch.from_records(train.records)
        test_batch = gat.GraphBatch.from_records(test.records, scaler=batch.scaler)
        rows = ["model,accuracy,precision,recall,f1"]
        for layers in args.gat_layers:
            gcfg = gat.GatConfig(layers=layers, epochs=args.gat_epochs, seed=seed)
            params, _ = gat.train(batch, gcfg)
            probs = gat.edge_predict(params, gcfg, test_batch)
            rep = metrics.classification_metrics(test_batch.labels > 0.5, probs, args.threshold)
            label = f"{layers} GAT Layer" + ("s" if layers > 1 else "")
            rows.append(f"{label},{rep.accuracy:.4f},{rep.precision:.4f},{rep.recall:.4f},{rep.f1:.4f}")
        gat_csv = out_dir / "gat_rows.csv"
        gat_csv.write_text("\n".join(rows) + "\n")

    print(f"pipeline complete: report at {report_json}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="airhold", description="flight holding prediction pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, default=42336)
    p.add_argument("--positives", type=int, default=720)
    p.add_argument("--airports", type=int, default=20)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("split", help="stratified train/test split")
    p.add_argument("--data", required=True)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("build-graph", help="collapse the training flights into the weighted digraph")
    p.add_argument("--train", required=True)
    p.add_argument("--graph-out", required=True)
    p.add_argument("--edge-features-out")
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("features", help="build a model-ready matrix for a record file")
    p.add_argument("--train", required=True, help="training records (the graph source)")
    p.add_argument("--data", required=True, help="records to encode")
    p.add_argument("--matrix-out", required=True)
    p.add_argument("--registry-out")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train-gbdt", help="train the boosted-tree classifier or regressor")
    p.add_argument("--task", choices=("cls", "reg"), required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--config", help="JSON file of TrainConfig overrides")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model-out", required=True)
    p.set_defaults(func=cmd_train_gbdt)

    p = sub.add_parser("train-gat", help="train a GAT configuration and emit its metrics row")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--layers", type=int, choices=(1, 3, 5, 10, 30), required=True)
    p.add_argument("--heads", type=int, default=4)
    p.add_argument("--hidden-dim", type=int, default=8)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--params-out")
    p.add_argument("--metrics-out", required=True)
    p.set_defaults(func=cmd_train_gat)

    p = sub.add_parser("evaluate", help="score a model on a matrix and write the report")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="matrix CSV produced by the features stage")
    p.add_argument("--registry", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--report", required=True)
    p.add_argument("--csv-row")
    p.add_argument("--label", default="GBDT with graph features")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="serve the what-if prediction API")
    p.add_argument("--model-dir", required=True)
    p.add_argument("--graph", help="weighted digraph JSON (default: <model-dir>/graph.json)")
    p.add_argument("--bind", default="127.0.0.1:8080")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("pipeline", help="run the whole pipeline end to end")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n", type=int, default=42336)
    p.add_argument("--positives", type=int, default=720)
    p.add_argument("--airports", type=int, default=20)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--rounds", type=int, default=200)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--with-gat", action="store_true", help="also run the GAT layer sweep")
    p.add_argument("--gat-layers", type=int, nargs="*", default=[1, 3, 5])
    p.add_argument("--gat-epochs", type=int, default=60)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("AIRHOLD_LOG", "WARNING").upper(), format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except AirholdError as exc:
        print(f"airhold: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"airhold: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
