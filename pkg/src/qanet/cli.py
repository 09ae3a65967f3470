"""Command line front end.

Subcommands cover the full pipeline: ``synth`` phantoms, ``corrupt`` ground
truth into scored training pairs, ``score`` pairs against ground truth,
``train`` / ``predict`` / ``evaluate`` the regressor, ``cross-eval`` two
methods against each other without ground truth, plus the bundled ``demo``
and ``ablation`` drivers.

Exit codes: 0 on success, 2 for invalid inputs (bad flags, malformed files,
missing columns), 1 for internal failures. Errors print a single
``error: ...`` line on stderr.

The environment variable ``QANET_THREADS`` sets how many worker processes
the batch stages (corrupt, score) may use; 0 or unset means run serially.
BLAS pools are always pinned to one thread, which keeps numeric results
bit-identical regardless of the machine; the env vars must be set before
numpy is first imported, which is why this module pins them up front and
the package __init__ imports nothing eagerly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys


def _pin_blas_threads():
    for var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "VECLIB_MAXIMUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ.setdefault(var, "1")


_pin_blas_threads()

import numpy as np  # noqa: E402

from . import corruption, manifest, measures, phantom  # noqa: E402
from .measures import default_tolerance_grid, hit_rate_curve  # noqa: E402
from .ribcage import (  # noqa: E402
    ENCODINGS,
    VARIANTS,
    ArchConfig,
    QANet,
    TrainConfig,
    fit,
    load_checkpoint,
    load_pairs,
    predict_dataset,
)
from .segmap import instance_labels  # noqa: E402
from .pngio import load_instance_map, save_instance_map  # noqa: E402


def _worker_count() -> int:
    raw = os.environ.get("QANET_THREADS", "").strip()
    if not raw:
        return 0
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"QANET_THREADS must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError("QANET_THREADS must be non-negative")
    return value


def _run_tasks(fn, tasks):
    workers = _worker_count()
    if workers <= 1 or len(tasks) < 2:
        return [fn(task) for task in tasks]
    from concurrent.futures import ProcessPoolExecutor

    chunk = max(1, len(tasks) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def _load_json_file(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return data


def _parse_int_list(raw: str, flag: str) -> list[int]:
    try:
        values = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"{flag} expects a comma-separated list of integers, got {raw!r}") from None
    if not values:
        raise ValueError(f"{flag} must list at least one integer")
    return values


# -- corrupt -----------------------------------------------------------------


def _corrupt_task(task):
    (rid, gt_path, image_rel, gt_rel, k, pair_seed, domain, measure, sampler, seg_abs, seg_rel) = task
    gt = load_instance_map(gt_path)
    params = sampler(pair_seed, domain)
    pair = corruption.corrupt(gt, params, measure)
    save_instance_map(seg_abs, pair.corrupted)
    return {
        "id": f"{rid}_c{k:02d}",
        "image": image_rel,
        "corrupted_seg": seg_rel,
        "gt_seg": gt_rel,
        "op": params.op,
        "kernel_radius": params.kernel_radius,
        "seed": pair_seed,
        "true_q": pair.true_q,
    }


def _corrupt_manifest(rows, out_dir, per_gt, base_seed, domain, measure, sample_amplitude=False):
    """Corrupt every ground-truth map ``per_gt`` times into ``out_dir``.

    Pair ``(row i, copy k)`` draws its parameters from a seed mixed from
    (base_seed, i, k), so any single pair can be regenerated alone and the
    whole run is order-independent. ``sample_amplitude`` switches from the
    fixed-strength warp to the range-covering amplitude draw.
    """
    out_dir = os.path.abspath(out_dir)
    seg_dir = os.path.join(out_dir, "segs")
    os.makedirs(seg_dir, exist_ok=True)
    sampler = corruption.sample_coverage_params if sample_amplitude else corruption.sample_params
    tasks = []
    for i, row in enumerate(rows):
        if row.gt_seg is None:
            raise ValueError(f"row {row.id!r} is missing the gt_seg column")
        image_rel = os.path.relpath(row.image, out_dir) if row.image else ""
        gt_rel = os.path.relpath(row.gt_seg, out_dir)
        for k in range(per_gt):
            seg_name = f"segs/{row.id}_c{k:02d}.png"
            tasks.append(
                (
                    row.id,
                    row.gt_seg,
                    image_rel,
                    gt_rel,
                    k,
                    corruption.derive_seed(base_seed, i, k),
                    domain,
                    measure,
                    sampler,
                    os.path.join(out_dir, seg_name),
                    seg_name,
                )
            )
    out_rows = _run_tasks(_corrupt_task, tasks)
    path = os.path.join(out_dir, "corrupted.csv")
    manifest.write_manifest(
        path,
        out_rows,
        ["id", "image", "corrupted_seg", "gt_seg", "op", "kernel_radius", "seed", "true_q"],
    )
    return path, out_rows


def cmd_corrupt(args) -> int:
    rows = manifest.read_manifest(args.manifest)
    path, out_rows = _corrupt_manifest(
        rows, args.out, args.per_gt, args.seed, args.domain, args.measure, args.sample_amplitude
    )
    print(f"wrote {len(out_rows)} corrupted pairs to {path}")
    return 0


# -- score -------------------------------------------------------------------


def _score_task(task):
    rid, gt_path, ev_path, measure = task
    gt = load_instance_map(gt_path)
    ev = load_instance_map(ev_path)
    return {
        "id": rid,
        "n_gt": len(instance_labels(gt)),
        "n_eval": len(instance_labels(ev)),
        "score": measures.cross_method_score(gt, ev, measure),
    }


def cmd_score(args) -> int:
    rows = manifest.read_manifest(args.manifest)
    manifest.require_columns(rows, ("gt_seg", "eval_seg"), args.manifest)
    tasks = [(row.id, row.gt_seg, row.eval_seg, args.measure) for row in rows]
    out_rows = _run_tasks(_score_task, tasks)
    manifest.write_manifest(args.out, out_rows, ["id", "n_gt", "n_eval", "score"])
    mean = float(np.mean([r["score"] for r in out_rows]))
    print(f"scored {len(out_rows)} pairs, mean {mean!r}")
    return 0


# -- synth -------------------------------------------------------------------


def _phantom_config(args) -> phantom.PhantomConfig:
    cfg_dict = {}
    if args.config:
        cfg_dict.update(_load_json_file(args.config))
    overrides = {
        "width": args.width,
        "height": args.height,
        "blur_sigma": args.blur_sigma,
        "noise_std": args.noise_std,
        "background_level": args.background_level,
        "seed": args.seed,
    }
    for key, value in overrides.items():
        if value is not None:
            cfg_dict[key] = value
    if args.min_instances is not None or args.max_instances is not None:
        lo, hi = cfg_dict.get("n_instances", phantom.PhantomConfig().n_instances)
        lo = args.min_instances if args.min_instances is not None else lo
        hi = args.max_instances if args.max_instances is not None else hi
        cfg_dict["n_instances"] = (lo, hi)
    if args.radius_min is not None or args.radius_max is not None:
        lo, hi = cfg_dict.get("radius", phantom.PhantomConfig().radius)
        lo = args.radius_min if args.radius_min is not None else lo
        hi = args.radius_max if args.radius_max is not None else hi
        cfg_dict["radius"] = (lo, hi)
    return phantom.PhantomConfig.from_dict(cfg_dict)


def cmd_synth(args) -> int:
    cfg = _phantom_config(args)
    train_path, val_path = phantom.make_dataset(cfg, args.count, args.split, args.out)
    with open(train_path) as fh:
        n_train = sum(1 for _ in fh) - 1
    with open(val_path) as fh:
        n_val = sum(1 for _ in fh) - 1
    print(f"wrote {args.count} phantoms to {args.out} (train {n_train}, val {n_val})")
    return 0


# -- train / predict / evaluate ------------------------------------------------


def _arch_config(args, file_cfg: dict) -> ArchConfig:
    cfg = dict(file_cfg)
    if args.variant is not None:
        cfg["variant"] = args.variant
    if args.encoding is not None:
        cfg["input_encoding"] = args.encoding
    if args.input_size is not None:
        cfg["input_size"] = args.input_size
    if args.image_channels is not None:
        cfg["image_channels"] = args.image_channels
    if args.features is not None:
        cfg["features_per_block"] = _parse_int_list(args.features, "--features")
    if args.fc is not None:
        cfg["fc_widths"] = _parse_int_list(args.fc, "--fc")
    if args.head_reads_ribs:
        cfg["head_reads_ribs"] = True
    if "features_per_block" in cfg and "n_blocks" not in cfg:
        cfg["n_blocks"] = len(cfg["features_per_block"])
    return ArchConfig.from_dict(cfg)


def _train_config(args, file_cfg: dict) -> TrainConfig:
    cfg = dict(file_cfg)
    for key, value in (
        ("optimizer", args.optimizer),
        ("learning_rate", args.lr),
        ("batch_size", args.batch_size),
        ("epochs", args.epochs),
        ("bn_momentum", args.bn_momentum),
        ("seed", args.seed),
        ("checkpoint_every", args.checkpoint_every),
    ):
        if value is not None:
            cfg[key] = value
    return TrainConfig.from_dict(cfg)


def cmd_train(args) -> int:
    file_cfg = _load_json_file(args.config) if args.config else {}
    arch = _arch_config(args, file_cfg.get("arch", {}))
    tcfg = _train_config(args, file_cfg.get("train", {}))

    train_rows = manifest.read_manifest(args.train)
    val_rows = manifest.read_manifest(args.val) if args.val else None
    train_ds = load_pairs(train_rows, arch, require_truth=True)
    val_ds = load_pairs(val_rows, arch, require_truth=True) if val_rows else None

    net = QANet(arch, seed=tcfg.seed)
    fit(net, train_ds, val_ds, tcfg, out_dir=args.out, log=print)
    print(f"saved model to {os.path.join(args.out, 'model.qant')}")
    return 0


def cmd_predict(args) -> int:
    net = load_checkpoint(args.checkpoint)
    rows = manifest.read_manifest(args.manifest)
    ds = load_pairs(rows, net.cfg, require_truth=False)
    preds = predict_dataset(net, ds)
    out_rows = [{"id": rid, "predicted_q": float(p)} for rid, p in zip(ds.ids, preds)]
    manifest.write_manifest(args.out, out_rows, ["id", "predicted_q"])
    print(f"wrote {len(out_rows)} predictions to {args.out}")
    return 0


def _evaluate(pred_rows, truth_rows, grid_points, out_dir):
    truth_by_id = {}
    for row in truth_rows:
        if row.true_q is None:
            raise ValueError(f"truth manifest row {row.id!r} has no true_q")
        truth_by_id[row.id] = row.true_q
    pred, truth, ids = [], [], []
    for row in pred_rows:
        if row.predicted_q is None:
            raise ValueError(f"prediction row {row.id!r} has no predicted_q")
        if row.id not in truth_by_id:
            raise ValueError(f"prediction id {row.id!r} not present in the truth manifest")
        ids.append(row.id)
        pred.append(row.predicted_q)
        truth.append(truth_by_id[row.id])
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    curve = hit_rate_curve(pred, truth, default_tolerance_grid(grid_points))

    os.makedirs(out_dir, exist_ok=True)
    manifest.write_manifest(
        os.path.join(out_dir, "hit_rate.csv"),
        [{"tolerance": float(t), "hit_rate": float(r)} for t, r in zip(curve.tolerances, curve.rates)],
        ["tolerance", "hit_rate"],
    )
    manifest.write_manifest(
        os.path.join(out_dir, "scatter.csv"),
        [
            {"id": rid, "true_q": float(t), "predicted_q": float(p)}
            for rid, t, p in zip(ids, truth, pred)
        ],
        ["id", "true_q", "predicted_q"],
    )
    errors = np.abs(pred - truth)
    idx_01 = int(np.argmin(np.abs(curve.tolerances - 0.1)))
    summary = {
        "n_pairs": len(ids),
        "auc": curve.auc,
        "mse": float(np.mean(errors**2)),
        "mae": float(np.mean(errors)),
        "hit_rate_at_0_10": float(curve.rates[idx_01]),
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def cmd_evaluate(args) -> int:
    pred_rows = manifest.read_manifest(args.predictions)
    truth_rows = manifest.read_manifest(args.truth)
    summary = _evaluate(pred_rows, truth_rows, args.grid_points, args.out)
    print(f"AUC {summary['auc']!r}")
    return 0


# -- cross-eval ----------------------------------------------------------------


def _method_map_path(row, path):
    if row.eval_seg is not None:
        return row.eval_seg
    if row.gt_seg is not None:
        return row.gt_seg
    raise ValueError(f"{path}: row {row.id!r} has neither eval_seg nor gt_seg")


def cmd_cross_eval(args) -> int:
    rows_a = manifest.read_manifest(args.manifest_a)
    rows_b = manifest.read_manifest(args.manifest_b)
    by_id_b = {row.id: row for row in rows_b}
    missing = [row.id for row in rows_a if row.id not in by_id_b]
    if missing:
        raise ValueError(f"ids missing from {args.manifest_b}: {missing[:5]}")
    if len(rows_b) != len(rows_a):
        extra = sorted(set(by_id_b) - {row.id for row in rows_a})
        raise ValueError(f"ids missing from {args.manifest_a}: {extra[:5]}")

    out_rows = []
    for row_a in rows_a:
        row_b = by_id_b[row_a.id]
        map_a = load_instance_map(_method_map_path(row_a, args.manifest_a))
        map_b = load_instance_map(_method_map_path(row_b, args.manifest_b))
        out_rows.append(
            {
                "id": row_a.id,
                "a_as_gt": measures.cross_method_score(map_a, map_b, args.measure),
                "b_as_gt": measures.cross_method_score(map_b, map_a, args.measure),
            }
        )
    manifest.write_manifest(args.out, out_rows, ["id", "a_as_gt", "b_as_gt"])
    mean_a = float(np.mean([r["a_as_gt"] for r in out_rows]))
    mean_b = float(np.mean([r["b_as_gt"] for r in out_rows]))
    print(f"mean_a_as_gt {mean_a!r}")
    print(f"mean_b_as_gt {mean_b!r}")
    return 0


# -- demo ----------------------------------------------------------------------


def _demo_dataset(out_dir, seed, count, per_gt, domain, measure, sample_amplitude, log):
    """Phantoms plus corrupted train/val pairs; shared by demo and ablation."""
    cfg = phantom.PhantomConfig(seed=seed)
    data_dir = os.path.join(out_dir, "phantoms")
    train_csv, val_csv = phantom.make_dataset(cfg, count, 0.7, data_dir)
    log(f"synthesized {count} phantoms")
    ct_path, ct_rows = _corrupt_manifest(
        manifest.read_manifest(train_csv),
        os.path.join(out_dir, "corrupted_train"),
        per_gt,
        corruption.derive_seed(seed, 101),
        domain,
        measure,
        sample_amplitude,
    )
    cv_path, cv_rows = _corrupt_manifest(
        manifest.read_manifest(val_csv),
        os.path.join(out_dir, "corrupted_val"),
        per_gt,
        corruption.derive_seed(seed, 102),
        domain,
        measure,
        sample_amplitude,
    )
    log(f"corrupted into {len(ct_rows)} train / {len(cv_rows)} val pairs")
    return ct_path, cv_path


def cmd_demo(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    train_csv, val_csv = _demo_dataset(
        args.out, args.seed, args.count, args.corruptions, args.domain, args.measure,
        args.sample_amplitude, print,
    )
    arch = ArchConfig()
    tcfg = TrainConfig(epochs=args.epochs, seed=corruption.derive_seed(args.seed, 103))
    train_ds = load_pairs(manifest.read_manifest(train_csv), arch, require_truth=True)
    val_ds = load_pairs(manifest.read_manifest(val_csv), arch, require_truth=True)
    net = QANet(arch, seed=tcfg.seed)
    model_dir = os.path.join(args.out, "model")
    fit(net, train_ds, val_ds, tcfg, out_dir=model_dir, log=print)

    preds = predict_dataset(net, val_ds)
    pred_path = os.path.join(args.out, "pred.csv")
    manifest.write_manifest(
        pred_path,
        [{"id": rid, "predicted_q": float(p)} for rid, p in zip(val_ds.ids, preds)],
        ["id", "predicted_q"],
    )
    summary = _evaluate(
        manifest.read_manifest(pred_path),
        manifest.read_manifest(val_csv),
        101,
        os.path.join(args.out, "eval"),
    )
    with open(os.path.join(args.out, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"MAE {summary['mae']!r}")
    print(f"hit@0.10 {summary['hit_rate_at_0_10']!r}")
    print(f"AUC {summary['auc']!r}")
    return 0


# -- ablation --------------------------------------------------------------------


def cmd_ablation(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    train_csv, val_csv = _demo_dataset(
        args.out, args.seed, args.count, args.corruptions, args.domain, args.measure,
        args.sample_amplitude, print,
    )
    base_arch = ArchConfig()
    train_rows = manifest.read_manifest(train_csv)
    val_rows = manifest.read_manifest(val_csv)
    train_ds = load_pairs(train_rows, base_arch, require_truth=True)
    val_ds = load_pairs(val_rows, base_arch, require_truth=True)

    rows = []
    for vi, variant in enumerate(VARIANTS):
        for ei, encoding in enumerate(ENCODINGS):
            for s in range(args.seeds):
                arch = ArchConfig(variant=variant, input_encoding=encoding)
                tseed = corruption.derive_seed(args.seed, vi, ei, s)
                tcfg = TrainConfig(epochs=args.epochs, seed=tseed)
                net = QANet(arch, seed=tseed)
                fit(net, train_ds, None, tcfg)
                pred = predict_dataset(net, val_ds)
                err = np.abs(pred - val_ds.q)
                rows.append(
                    {
                        "variant": variant,
                        "encoding": encoding,
                        "seed": s,
                        "val_mse": float(np.mean(err**2)),
                        "val_mae": float(np.mean(err)),
                        "val_auc": hit_rate_curve(pred, val_ds.q).auc,
                    }
                )
                print(
                    f"{variant}/{encoding} seed {s}: "
                    f"mae={rows[-1]['val_mae']:.4f} auc={rows[-1]['val_auc']:.4f}"
                )
    manifest.write_manifest(
        os.path.join(args.out, "ablation.csv"),
        rows,
        ["variant", "encoding", "seed", "val_mse", "val_mae", "val_auc"],
    )

    summary_rows = []
    for variant in VARIANTS:
        for encoding in ENCODINGS:
            group = [r for r in rows if r["variant"] == variant and r["encoding"] == encoding]
            aucs = np.array([r["val_auc"] for r in group])
            maes = np.array([r["val_mae"] for r in group])
            summary_rows.append(
                {
                    "variant": variant,
                    "encoding": encoding,
                    "mean_auc": float(aucs.mean()),
                    "std_auc": float(aucs.std(ddof=1)) if len(group) > 1 else 0.0,
                    "mean_mae": float(maes.mean()),
                }
            )
    summary_rows.sort(key=lambda r: r["mean_auc"], reverse=True)
    summary_path = os.path.join(args.out, "ablation_summary.csv")
    manifest.write_manifest(
        summary_path, summary_rows, ["variant", "encoding", "mean_auc", "std_auc", "mean_mae"]
    )
    print(f"{'variant':<10} {'encoding':<10} {'mean_auc':>9} {'std_auc':>9} {'mean_mae':>9}")
    for row in summary_rows:
        print(
            f"{row['variant']:<10} {row['encoding']:<10} "
            f"{row['mean_auc']:>9.4f} {row['std_auc']:>9.4f} {row['mean_mae']:>9.4f}"
        )
    print(f"wrote {summary_path}")
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qanet",
        description="Estimate instance segmentation quality without ground truth.",
    )
    from . import __version__

    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render synthetic phantoms plus train/val manifests")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--split", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", help="JSON file with phantom config fields")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--min-instances", type=int)
    p.add_argument("--max-instances", type=int)
    p.add_argument("--radius-min", type=float)
    p.add_argument("--radius-max", type=float)
    p.add_argument("--blur-sigma", type=float)
    p.add_argument("--noise-std", type=float)
    p.add_argument("--background-level", type=float)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("corrupt", help="corrupt ground-truth maps into scored pairs")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--per-gt", type=int, default=1, help="corruptions per ground-truth map")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--domain", choices=corruption.DOMAINS, default="cells")
    p.add_argument("--measure", choices=measures.MEASURES, default="seg")
    p.add_argument(
        "--sample-amplitude",
        action="store_true",
        help="draw the warp amplitude uniformly from [0, 512] instead of fixing it at 512, "
        "spreading true_q over the whole score range",
    )
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("score", help="score evaluated maps against ground truth")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--measure", choices=measures.MEASURES, default="seg")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("train", help="train a quality regressor on scored pairs")
    p.add_argument("--train", required=True)
    p.add_argument("--val")
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON file with 'arch' and 'train' sections")
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--encoding", choices=ENCODINGS)
    p.add_argument("--input-size", type=int)
    p.add_argument("--image-channels", type=int, choices=(1, 3))
    p.add_argument("--features", help="comma-separated features per block")
    p.add_argument("--fc", help="comma-separated hidden widths of the head")
    p.add_argument("--head-reads-ribs", action="store_true")
    p.add_argument("--optimizer", choices=("adam", "sgd"))
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--bn-momentum", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--checkpoint-every", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict quality for (image, seg) pairs")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="hit-rate curve and AUC of predictions vs truth")
    p.add_argument("--predictions", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--grid-points", type=int, default=101)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("cross-eval", help="score two methods against each other, no ground truth")
    p.add_argument("--manifest-a", required=True)
    p.add_argument("--manifest-b", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--measure", choices=measures.MEASURES, default="seg")
    p.set_defaults(func=cmd_cross_eval)

    p = sub.add_parser("demo", help="end-to-end run: synth, corrupt, train, evaluate")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=3000)
    p.add_argument("--corruptions", type=int, default=4)
    p.add_argument("--epochs", type=int, default=36)
    p.add_argument("--domain", choices=corruption.DOMAINS, default="cells")
    p.add_argument("--measure", choices=measures.MEASURES, default="seg")
    p.add_argument("--sample-amplitude", action="store_true",
                   help="draw the warp amplitude uniformly instead of fixing it at 512")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("ablation", help="variant x encoding sweep over multiple seeds")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--count", type=int, default=2000)
    p.add_argument("--corruptions", type=int, default=3)
    p.add_argument("--epochs", type=int, default=12)
    p.add_argument("--domain", choices=corruption.DOMAINS, default="cells")
    p.add_argument("--measure", choices=measures.MEASURES, default="seg")
    p.add_argument("--sample-amplitude", action="store_true",
                   help="draw the warp amplitude uniformly instead of fixing it at 512")
    p.set_defaults(func=cmd_ablation)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: internal: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
