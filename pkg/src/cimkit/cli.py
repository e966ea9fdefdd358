"""Command-line surface sequencing the analysis pipeline.

Every subcommand prints a JSON summary to stdout; commands that produce
data files take an --out base path. Outputs are byte-deterministic for a
fixed seed and flag set.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import connectivity, decode, fractal, io, oracle, synth, topology
from .cim import LagSet, best_lag
from .embedding import EmbeddingSpec, PointCloud, embed_multivariate
from .errors import CimkitError, ShapeError


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _emit(payload: dict, out: str | None = None) -> None:
    text = json.dumps(_jsonable(payload), sort_keys=True)
    print(text)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")


def _write_matrix(path, matrix, integer: bool = False) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in matrix:
            if integer:
                writer.writerow([str(int(v)) for v in row])
            else:
                writer.writerow(["%.17g" % v for v in row])


def _load_points(path: str) -> PointCloud:
    """Point cloud from an `embed` JSON file or a bare numeric CSV."""
    p = Path(path)
    if p.suffix == ".json":
        obj = json.loads(p.read_text(encoding="utf-8"))
        return PointCloud(np.asarray(obj["points"], dtype=np.float64))
    with open(p, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CimkitError(f"{path}: empty file")
    try:
        float(rows[0][0])
    except ValueError:
        rows = rows[1:]  # header row
    return PointCloud(np.asarray(rows, dtype=np.float64))


def _load_feature_table(path: str) -> decode.FeatureTable:
    """First column = class label, remaining columns = features (with header)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise CimkitError(f"{path}: need a header and at least one row")
    header = rows[0]
    labels = [r[0] for r in rows[1:]]
    values = np.asarray([r[1:] for r in rows[1:]], dtype=np.float64)
    return decode.FeatureTable(
        values=values, labels=np.asarray(labels), feature_ids=tuple(header[1:])
    )


def _prepare_recording(args) -> io.Recording:
    rec = io.load_recording(args.input)
    if getattr(args, "window", None):
        start, length = (int(t) for t in args.window.split(","))
        rec = io.slice_window(rec, io.WindowSpec(start=start, length=length))
    if not getattr(args, "no_zscore", False):
        rec = io.zscore(rec)
    return rec


def _noise_seeds(seed: int, count: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]


def cmd_simulate(args) -> None:
    params: dict = {}
    if args.system == "linear":
        x, y = synth.gen_linear_flow(args.n, a=args.a, seed=args.seed)
        channels, data = ("x", "y"), [x, y]
        params["a"] = args.a
    elif args.system == "ar":
        x, y = synth.gen_ar_driven(args.n, seed=args.seed)
        channels, data = ("x", "y"), [x, y]
    elif args.system == "henon":
        x, y = synth.gen_henon_coupled(
            args.n, coupling=args.coupling, seed=args.seed,
            y_lag2_variant=args.y_lag2,
        )
        channels, data = ("x", "y"), [x, y]
        params["coupling"] = args.coupling
        params["y_lag2_variant"] = args.y_lag2
    elif args.system == "sine":
        z = synth.gen_sine_recursive(args.n)
        channels, data = ("z",), [z]
    else:  # pragma: no cover - argparse restricts choices
        raise CimkitError(f"unknown system {args.system!r}")
    if args.snr_db is not None:
        seeds = _noise_seeds(args.seed, len(data))
        data = [synth.add_noise_snr(d, args.snr_db, s) for d, s in zip(data, seeds)]
        params["snr_db"] = args.snr_db
    rec = io.Recording(
        channels=channels, samples=np.asarray(data), sample_rate=args.sample_rate
    )
    base = Path(args.out)
    csv_path = base.with_suffix(".csv")
    io.save_recording(rec, csv_path)
    config = synth.SynthConfig(
        system=args.system, n=args.n, seed=args.seed, params=params
    ).to_json_dict()
    config["sample_rate"] = args.sample_rate
    sidecar = base.with_suffix(".json")
    sidecar.write_text(
        json.dumps(_jsonable(config), sort_keys=True) + "\n", encoding="utf-8"
    )
    _emit({"csv": str(csv_path), "sidecar": str(sidecar), **config})


def cmd_embed(args) -> None:
    rec = _prepare_recording(args)
    spec_text = args.spec
    if spec_text.startswith("@"):
        spec_text = Path(spec_text[1:]).read_text(encoding="utf-8")
    spec = EmbeddingSpec.from_json_dict(json.loads(spec_text))
    series = [rec.channel(sid) for sid in (spec.ids or rec.channels)]
    cloud = embed_multivariate(series, spec)
    _emit(
        {
            "ambient_dim": cloud.ambient_dim,
            "count": cloud.count,
            "points": cloud.points,
        },
        args.out,
    )


def cmd_dim(args) -> None:
    cloud = _load_points(args.input)
    if args.method == "corr":
        if args.radii_per_decade:
            lo, hi = fractal.default_radii(cloud, n_radii=2, seed=args.seed)
            n = max(5, int(np.ceil(np.log10(hi / lo) * args.radii_per_decade)) + 1)
            radii = np.geomspace(lo, hi, n)
        else:
            radii = None
        curve = fractal.correlation_integral(cloud, radii=radii, seed=args.seed)
        est = fractal.estimate_correlation_dimension(curve)
    else:
        est = fractal.box_counting_dimension(cloud)
    _emit(
        {
            "value": est.value,
            "fit_lo": est.fit_lo,
            "fit_hi": est.fit_hi,
            "r_squared": est.r_squared,
            "stderr": est.stderr,
            "method": est.method,
            "n_points": est.n_points,
            "suspect": est.suspect,
            "seed": args.seed,
        },
        args.out,
    )


def cmd_cim(args) -> None:
    rec = _prepare_recording(args)
    lags = LagSet.upto(args.max_lag, include_zero=args.include_zero_lag)
    res = best_lag(
        rec.channel(args.target),
        rec.channel(args.source),
        lags,
        target_id=args.target,
        source_id=args.source,
        seed=args.seed,
    )
    _emit(
        {
            "source": res.source,
            "target": res.target,
            "lag": res.lag,
            "dimension": res.dimension,
            "cim": res.cim,
            "diagnostics": {
                "fit_lo": res.estimate.fit_lo,
                "fit_hi": res.estimate.fit_hi,
                "r_squared": res.estimate.r_squared,
                "stderr": res.estimate.stderr,
                "n_points": res.estimate.n_points,
                "suspect": res.estimate.suspect,
            },
            "seed": args.seed,
        },
        args.out,
    )


def cmd_connmap(args) -> None:
    rec = _prepare_recording(args)
    lags = LagSet.upto(args.max_lag, include_zero=args.include_zero_lag)
    window = None
    if args.window:
        start, length = (int(t) for t in args.window.split(","))
        window = {"start": start, "length": length}
    cmap = connectivity.build_map(rec, lags, window=window, seed=args.seed)
    base = Path(args.out)
    a_path = base.parent / (base.name + "_A.csv")
    l_path = base.parent / (base.name + "_L.csv")
    _write_matrix(a_path, cmap.weights)
    _write_matrix(l_path, cmap.lags, integer=True)
    sidecar = {
        "window": window,
        "lag_set": list(lags.lags),
        "seed": args.seed,
        "channel_ids": list(cmap.channel_ids),
    }
    sidecar_path = base.with_suffix(".json")
    sidecar_path.write_text(
        json.dumps(_jsonable(sidecar), sort_keys=True) + "\n", encoding="utf-8"
    )
    _emit({"a_csv": str(a_path), "l_csv": str(l_path), **sidecar})


def cmd_topo(args) -> None:
    with open(args.input, newline="", encoding="utf-8") as fh:
        matrix = np.asarray(list(csv.reader(fh)), dtype=np.float64)
    if args.symmetrize == "max":
        matrix = np.maximum(matrix, matrix.T)
    elif args.symmetrize == "mean":
        matrix = (matrix + matrix.T) / 2.0
    elif not np.array_equal(matrix, matrix.T):
        raise ShapeError("adjacency is asymmetric; pass --symmetrize max|mean")
    np.fill_diagonal(matrix, 0.0)
    filt = topology.rank_filtration(matrix, descending=args.descending)
    barcode = topology.persistent_homology(filt, max_hom_dim=args.max_dim)
    base = Path(args.out)
    bc_path = base.parent / (base.name + "_barcode.csv")
    with open(bc_path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["homology_dim", "birth_index", "death_index"])
        for dim, birth, death in barcode.intervals:
            writer.writerow([dim, birth, -1 if death is None else death])
    trajectories = [
        topology.betti_trajectory(barcode, d) for d in range(args.max_dim + 1)
    ]
    tr_path = base.parent / (base.name + "_trajectories.csv")
    with open(tr_path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank"] + [f"beta{d}" for d in range(args.max_dim + 1)])
        for i in range(filt.n_edges + 1):
            writer.writerow([i] + [int(t.values[i]) for t in trajectories])
    _emit(
        {
            "barcode_csv": str(bc_path),
            "trajectories_csv": str(tr_path),
            "integrated_betti": {
                str(t.dim): t.integrated for t in trajectories
            },
            "n_nodes": filt.n_nodes,
            "n_edges": filt.n_edges,
        }
    )


def cmd_decode(args) -> None:
    train = _load_feature_table(args.train)
    test = _load_feature_table(args.test)
    selected = decode.select_features(train, args.screen_alpha)
    if len(selected) == 0:
        raise CimkitError(
            f"no features pass the {args.screen_alpha} screening level"
        )
    ids = tuple(train.feature_ids[i] for i in selected)
    train_sub = decode.FeatureTable(
        values=train.values[:, selected], labels=train.labels, feature_ids=ids
    )
    if tuple(test.feature_ids) != tuple(train.feature_ids):
        raise ShapeError("train and test feature columns differ")
    test_sub = decode.FeatureTable(
        values=test.values[:, selected], labels=test.labels, feature_ids=ids
    )
    path = decode.default_lambda_path(train_sub, args.alpha)
    lam_star, cv_curve = decode.cross_validate(
        train_sub, args.alpha, folds=args.folds, seed=args.seed, lambda_path=path
    )
    models = decode.fit_elasticnet_multinomial(train_sub, args.alpha, path)
    model = models[int(np.argmin(np.abs(path - lam_star)))]
    result = decode.predict_confusion(model, test_sub)
    _emit(
        {
            "lambda_star": lam_star,
            "selected_features": list(ids),
            "n_selected": len(ids),
            "confusion": {
                "classes": [str(c) for c in result.classes],
                "matrix": result.matrix,
            },
            "overall_accuracy": result.overall_accuracy,
            "per_class_accuracy": result.per_class_accuracy,
            "alpha": args.alpha,
            "folds": args.folds,
            "seed": args.seed,
            "metadata": {
                "standardized_features": True,
                "stratified_cv": True,
                "screen_alpha": args.screen_alpha,
            },
        },
        args.out,
    )


def cmd_oracle(args) -> None:
    rec = _prepare_recording(args)
    x = rec.channel(args.x)
    y = rec.channel(args.y)
    lag = args.lag
    if args.z is not None:
        z = rec.channel(args.z)
        n = len(x) - lag
        mi_xy, mi_xz = oracle.projected_mi(
            x[lag:], y[:n] if lag else y, z[:n] if lag else z, k=args.k
        )
        _emit(
            {
                "projected_mi_xy": mi_xy.value,
                "projected_mi_xz": mi_xz.value,
                "k": args.k,
                "n": mi_xy.n,
                "lag": lag,
                "jittered": mi_xy.jittered,
                "seed": 0,
            },
            args.out,
        )
    else:
        n = len(x) - lag
        est = oracle.ksg_mutual_information(x[lag:], y[:n] if lag else y, k=args.k)
        _emit(
            {
                "mi": est.value,
                "k": est.k,
                "n": est.n,
                "lag": lag,
                "jittered": est.jittered,
                "seed": 0,
            },
            args.out,
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cimkit",
        description="Directed interaction analysis of multichannel time series",
    )
    sub = parser.add_subparsers(
        dest="command",
        required=True,
        metavar="{simulate,embed,dim,cim,connmap,topo,decode}",
    )

    p = sub.add_parser("simulate", help="generate a benchmark recording")
    p.add_argument("--system", required=True, choices=["linear", "ar", "henon", "sine"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--a", type=float, default=0.5, help="linear flow gain")
    p.add_argument("--coupling", type=float, default=0.3, help="henon coupling C")
    p.add_argument("--y-lag2", action="store_true", help="use the y[i-2] henon variant")
    p.add_argument("--snr-db", type=float, default=None)
    p.add_argument("--sample-rate", type=float, default=1.0)
    p.add_argument("--out", required=True, help="base path for .csv/.json outputs")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("embed", help="delay-embed recording channels")
    p.add_argument("--input", required=True)
    p.add_argument("--spec", required=True, help='JSON or @file: {"series":[{"id":...,"lags":[...]}]}')
    p.add_argument("--no-zscore", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("dim", help="intrinsic dimension of a point cloud")
    p.add_argument("--input", required=True, help="embed JSON or numeric CSV of points")
    p.add_argument("--method", choices=["corr", "box"], default="corr")
    p.add_argument("--radii-per-decade", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("cim", help="directed interaction between two channels")
    p.add_argument("--input", required=True)
    p.add_argument("--source", required=True, help="channel the flow comes from")
    p.add_argument("--target", required=True, help="channel the flow goes into")
    p.add_argument("--max-lag", type=int, required=True)
    p.add_argument("--include-zero-lag", action="store_true")
    p.add_argument("--no-zscore", action="store_true")
    p.add_argument("--window", default=None, help="START,LEN in samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cim)

    p = sub.add_parser("connmap", help="all-pairs connectivity matrices")
    p.add_argument("--input", required=True)
    p.add_argument("--window", default=None, help="START,LEN in samples")
    p.add_argument("--max-lag", type=int, required=True)
    p.add_argument("--include-zero-lag", action="store_true")
    p.add_argument("--no-zscore", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="base path for _A.csv/_L.csv/.json")
    p.set_defaults(func=cmd_connmap)

    p = sub.add_parser("topo", help="persistence analysis of an adjacency CSV")
    p.add_argument("--input", required=True, help="square weight-matrix CSV")
    p.add_argument("--max-dim", type=int, default=1, help="max homology dimension")
    p.add_argument("--descending", action="store_true", help="largest weights enter first")
    p.add_argument("--symmetrize", choices=["max", "mean", "none"], default="max")
    p.add_argument("--out", required=True, help="base path for output CSVs")
    p.set_defaults(func=cmd_topo)

    p = sub.add_parser("decode", help="screen features and decode classes")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--alpha", type=float, required=True, help="elastic-net mixing")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--screen-alpha", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decode)

    # test-harness helper; not part of the documented surface
    p = sub.add_parser("oracle")
    p.add_argument("--input", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--z", default=None)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--lag", type=int, default=0)
    p.add_argument("--no-zscore", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CimkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
