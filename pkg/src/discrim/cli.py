"""Command line interface.

Exit codes: 0 on success, 1 for usage errors (bad flags, missing input
files), 2 for data errors. Outputs are written to a temporary file and
renamed into place, so a failed run leaves no partial output.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import corpusops, measures
from . import predict as P
from .textprofile import features as tp
from .textprofile import scorers

log = logging.getLogger("discrim")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


fmt = P.table.fmt


def _check_inputs(*paths):
    for p in paths:
        if p is not None and not Path(p).is_file():
            raise UsageError(f"input file not found: {p}")


# measure ---------------------------------------------------------------

def cmd_measure(args) -> int:
    _check_inputs(args.leaderboard)
    table = corpusops.read_leaderboard(args.leaderboard, args.upper_limit_default)
    if not table.rows:
        raise DataError(f"{args.leaderboard}: no score rows")
    lists, _ = table.performance_lists(top=args.top)
    if not lists:
        raise DataError("no dataset has at least 2 system scores")
    rows = [["dataset", "k", "lambda_var", "lambda_sva"]]
    for p in lists:
        r = measures.report(p)
        rows.append([r.dataset_id, r.k, fmt(r.lambda_var), fmt(r.lambda_sva)])
    write_atomic(args.out, _csv(rows))
    return EXIT_OK


# hitrate ---------------------------------------------------------------

def read_prediction_matrix(path) -> measures.PredictionMatrix:
    """Read ``sample_id,<system_id>...`` with 0/1 cells."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "sample_id" or len(header) < 3:
            raise DataError(f"{path}: header must be sample_id,<system>,<system>...")
        ids, cells = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} cells")
            if any(c.strip() not in ("0", "1") for c in row[1:]):
                raise DataError(f"{path}:{lineno}: cells must be 0 or 1")
            ids.append(row[0])
            cells.append([int(c) for c in row[1:]])
    if not ids:
        raise DataError(f"{path}: no samples")
    return measures.PredictionMatrix(path.stem, ids, header[1:], np.array(cells, dtype=np.uint8))


def cmd_hitrate(args) -> int:
    _check_inputs(*args.predictions)
    out = [["dataset", "k", "lambda_hit"]]
    pairs = [["dataset", "better", "worse", "p_hit"]]
    for path in args.predictions:
        m = read_prediction_matrix(path)
        pm = measures.pairwise_matrix(m, args.ratio, args.iterations, args.seed, args.tie_policy,
                                      replace=not args.without_replacement)
        out.append([m.dataset_id, m.k, fmt(float(np.mean([p for _, _, p in pm])))])
        pairs.extend([m.dataset_id, a, b, fmt(p)] for a, b, p in pm)
    pairs_path = args.pairs_out or str(Path(args.out).with_suffix("")) + ".pairs.csv"
    write_atomic(args.out, _csv(out))
    write_atomic(pairs_path, _csv(pairs))
    return EXIT_OK


# split -----------------------------------------------------------------

def cmd_split(args) -> int:
    _check_inputs(*args.datasets, args.wordlist)
    if args.feature and args.random_features:
        raise UsageError("use either --feature or --random-features")
    feats = args.feature or (corpusops.sample_features(args.random_features, args.seed)
                             if args.random_features else None)
    if not feats:
        raise UsageError("give at least one --feature or --random-features N")
    wordlist = tp.load_wordlist(args.wordlist) if args.wordlist else None
    outputs = {}
    manifest = [["child_id", "parent", "feature", "bin", "low_edge", "high_edge", "n_train", "n_test"]]
    out_dir = Path(args.out_dir)
    for path in args.datasets:
        d = tp.read_jsonl(path)
        for feat in feats:
            spec = corpusops.partition(d, feat, args.bins, wordlist)
            children = corpusops.children_of(d, spec, args.min_size)
            for c in children:
                outputs[out_dir / f"{c.dataset_id}.jsonl"] = tp.dumps_jsonl(c.samples)
            for row in corpusops.manifest_rows(spec, children):
                manifest.append([*row[:4], fmt(row[4]), fmt(row[5]), *row[6:]])
    for p, text in outputs.items():
        write_atomic(p, text)
    write_atomic(out_dir / "manifest.csv", _csv(manifest))
    log.info("wrote %d sub-datasets to %s", len(outputs), out_dir)
    return EXIT_OK


# profile ---------------------------------------------------------------

def _plugins(args) -> dict:
    out = {}
    for kind, path in (("perplexity", args.ppl_scores), ("grammar", args.gerr_scores),
                       ("language_id", args.lmix_scores)):
        if path:
            out[kind] = scorers.load_precomputed(path, kind)
    return out


def _dataset_paths(items) -> list:
    paths = []
    for item in items:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.jsonl")))
        else:
            paths.append(p)
    return paths


def cmd_profile(args) -> int:
    paths = _dataset_paths(args.datasets)
    if not paths:
        raise UsageError("no dataset files given")
    _check_inputs(*paths, args.wordlist, args.leaderboard, args.ppl_scores, args.gerr_scores, args.lmix_scores)
    wordlist = tp.load_wordlist(args.wordlist) if args.wordlist else tp.default_wordlist()
    plugins = _plugins(args)
    profiles = {}
    for path in paths:
        d = tp.read_jsonl(path)
        if d.dataset_id in profiles:
            raise DataError(f"duplicate dataset id {d.dataset_id!r}")
        profiles[d.dataset_id] = tp.profile(d, plugins, wordlist)
    if args.leaderboard:
        lb = corpusops.read_leaderboard(args.leaderboard, args.upper_limit_default)
        table, skipped = corpusops.assemble_table(profiles, lb, args.target)
        if len(table) == 0:
            raise DataError("no dataset has both a profile and at least 2 system scores")
        write_atomic(args.out, P.format_table(table))
        return EXIT_OK
    names = [f for f in tp.FEATURE_NAMES if any(f in v for v in profiles.values())]
    rows = [["dataset_id", *names]]
    rows.extend([did, *(fmt(v.get(f)) for f in names)] for did, v in profiles.items())
    write_atomic(args.out, _csv(rows))
    return EXIT_OK


# train / predict / evaluate --------------------------------------------

def cmd_train(args) -> int:
    _check_inputs(args.table)
    table = P.read_table(args.table, args.target)
    if args.holdout:
        train, test = corpusops.holdout_split(table, args.holdout, args.seed)
    else:
        train, test = table, None
    hyper = {"knn": {"k": args.k},
             "cart": {"max_depth": args.max_depth, "min_leaf": args.min_leaf},
             "gbdt": {"n_trees": args.n_trees, "learning_rate": args.learning_rate,
                      "max_depth": args.max_depth, "min_leaf": args.min_leaf}}[args.model]
    model = P.fit(args.model, train, **hyper)
    if test is not None:
        write_atomic(args.test_out or str(Path(args.out).with_suffix("")) + ".test.csv", P.format_table(test))
    write_atomic(args.out, model.dumps())
    return EXIT_OK


def read_features(path) -> tuple:
    """(ids, feature names, matrix) from a profile CSV or a training table."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "dataset_id":
            raise DataError(f"{path}: header must start with dataset_id")
        keep = [i for i, h in enumerate(header) if i > 0 and h not in ("lambda_var", "lambda_sva")]
        ids, X = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} cells")
            ids.append(row[0])
            X.append([P.table._parse_cell(row[i], f"{path}:{lineno}") for i in keep])
    return ids, [header[i] for i in keep], np.array(X, dtype=np.float64).reshape(len(ids), len(keep))


def cmd_predict(args) -> int:
    _check_inputs(args.model, args.features)
    model = P.load(args.model)
    ids, names, X = read_features(args.features)
    col = {n: i for i, n in enumerate(names)}
    Xm = np.column_stack([X[:, col[f]] if f in col else np.full(len(ids), math.nan)
                          for f in model.feature_names])
    preds = model.predict_matrix(Xm) if ids else []
    rows = [["dataset_id", "prediction"]]
    rows.extend([did, fmt(float(p))] for did, p in zip(ids, preds))
    write_atomic(args.out, _csv(rows))
    return EXIT_OK


def evaluate(model, table, group_sizes, group_count, seed, threshold) -> list:
    """``(metric, value)`` rows for a model on a held-out table."""
    preds = model.predict_table(table)
    gold = table.y
    rho, p = measures.spearman(preds, gold)
    rows = [("rmse", P.rmse(preds, gold)), ("spearman", rho), ("spearman_p", p)]
    for n in group_sizes:
        if n > len(table):
            log.warning("skipping group size %d: only %d rows", n, len(table))
            continue
        groups = corpusops.make_groups(table, n, group_count, seed)
        idx = [np.array(g.rows) for g in groups]
        rows.append((f"ndcg@{n}", float(np.mean([P.group_ndcg(gold[r], preds[r]) for r in idx]))))
        rows.append((f"map@{n}", P.mean_average_precision([(gold[r], preds[r], threshold) for r in idx])))
    return rows


def cmd_evaluate(args) -> int:
    _check_inputs(args.model, args.table)
    model = P.load(args.model)
    table = P.read_table(args.table, model.target_kind)
    if len(table) < 3:
        raise DataError("need at least 3 rows to evaluate")
    threshold = args.threshold_var if model.target_kind == "var" else args.threshold_sva
    sizes = [int(s) for s in args.group_sizes.split(",") if s.strip()]
    rows = [["metric", "value"]]
    rows.extend([m, fmt(float(v))] for m, v in evaluate(model, table, sizes, args.groups, args.seed, threshold))
    write_atomic(args.out, _csv(rows))
    return EXIT_OK


# report ----------------------------------------------------------------

def bar_data(names, values, log_scale: bool) -> list:
    """``(name, value, height, flagged)`` sorted by descending value, ties by name."""
    out = []
    for name, v in sorted(zip(names, values), key=lambda nv: (-nv[1], nv[0])):
        if log_scale:
            if v > 0:
                out.append((name, v, math.log10(v), False))
            else:
                log.warning("%s: value %s <= 0 has no logarithm; drawn as a flagged zero bar", name, fmt(v))
                out.append((name, v, 0.0, True))
        else:
            out.append((name, v, v, False))
    return out


def render_svg(bars, title: str) -> str:
    bw, gap, left, top, plot_h = 36, 14, 60, 40, 240
    width = left + len(bars) * (bw + gap) + gap
    height = top + plot_h + 110
    hi = max([0.0] + [b[2] for b in bars])
    lo = min([0.0] + [b[2] for b in bars])
    span = (hi - lo) or 1.0
    zero_y = top + plot_h * hi / span

    def y_of(v):
        return zero_y - plot_h * v / span

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<text x="{width / 2:.2f}" y="20" text-anchor="middle" font-size="13">{_esc(title)}</text>',
        f'<line x1="{left - 5}" y1="{zero_y:.2f}" x2="{width - gap / 2:.2f}" y2="{zero_y:.2f}" stroke="#333"/>',
    ]
    for i, (name, value, h, flagged) in enumerate(bars):
        x = left + gap + i * (bw + gap)
        y0, y1 = sorted((zero_y, y_of(h)))
        color = "#d62728" if flagged else ("#1f77b4" if h >= 0 else "#ff9896")
        parts.append(f'<rect x="{x}" y="{y0:.2f}" width="{bw}" height="{y1 - y0:.2f}" fill="{color}">'
                     f'<title>{_esc(name)}: {fmt(value)}</title></rect>')
        label = "n/a" if flagged else fmt(h)
        parts.append(f'<text x="{x + bw / 2:.2f}" y="{y0 - 4:.2f}" text-anchor="middle">{_esc(label)}</text>')
        ty = top + plot_h + 14
        parts.append(f'<text x="{x + bw / 2:.2f}" y="{ty}" text-anchor="end" '
                     f'transform="rotate(-45 {x + bw / 2:.2f} {ty})">{_esc(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _esc(s: str) -> str:
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def cmd_report(args) -> int:
    _check_inputs(args.measures)
    with open(args.measures, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "dataset" not in reader.fieldnames or args.column not in reader.fieldnames:
            raise DataError(f"{args.measures}: needs columns dataset and {args.column}")
        names, values = [], []
        for lineno, r in enumerate(reader, start=2):
            try:
                values.append(float(r[args.column]))
            except ValueError:
                raise DataError(f"{args.measures}:{lineno}: bad {args.column} value") from None
            names.append(r["dataset"])
    if not names:
        raise DataError(f"{args.measures}: no rows")
    bars = bar_data(names, values, args.log_scale)
    if args.format == "svg":
        title = f"log10({args.column})" if args.log_scale else args.column
        text = render_svg(bars, title)
    else:
        rows = [["dataset", args.column, "log10" if args.log_scale else "height", "flagged"]]
        rows.extend([n, fmt(v), fmt(h), int(f)] for n, v, h, f in bars)
        text = _csv(rows)
    write_atomic(args.out, text)
    return EXIT_OK


# parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="discrim", description="Benchmark dataset discrimination tools.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("measure", help="lambda_var / lambda_sva per dataset from a leaderboard CSV")
    p.add_argument("leaderboard", help="CSV: benchmark,dataset,system,score[,upper_limit]")
    p.add_argument("--upper-limit-default", type=float, default=100.0,
                   help="upper limit for rows without one (default: 100)")
    p.add_argument("--top", type=int, default=None, help="keep only the best K systems per dataset")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("hitrate", help="bootstrap hit rate from per-sample correctness files")
    p.add_argument("predictions", nargs="+", help="CSV: sample_id,<system>... with 0/1 cells")
    p.add_argument("--ratio", type=float, default=measures.DEFAULT_SUBSET_RATIO,
                   help="resample size as a fraction of the test set (default: 0.8)")
    p.add_argument("--iterations", type=int, default=measures.DEFAULT_ITERATIONS, help="default: 1000")
    p.add_argument("--seed", type=int, default=42, help="default: 42")
    p.add_argument("--tie-policy", choices=measures.TIE_POLICIES, default="zero",
                   help="credit for tied resamples: zero or half (default: zero)")
    p.add_argument("--without-replacement", action="store_true", help="draw subsets without replacement")
    p.add_argument("--out", required=True)
    p.add_argument("--pairs-out", help="pairwise P matrix (default: <out>.pairs.csv)")
    p.set_defaults(func=cmd_hitrate)

    p = sub.add_parser("split", help="split datasets into sub-datasets by per-sample feature bins")
    p.add_argument("datasets", nargs="+", help="JSON-lines datasets")
    p.add_argument("--feature", action="append", choices=corpusops.SPLIT_FEATURES,
                   help="feature to bin on (repeatable)")
    p.add_argument("--random-features", type=int, default=0, help="draw N features with --seed instead")
    p.add_argument("--bins", type=int, default=3, help="default: 3")
    p.add_argument("--min-size", type=int, default=corpusops.DEFAULT_MIN_SIZE,
                   help="drop bins with fewer samples in either split (default: 50)")
    p.add_argument("--wordlist", help="basic word list for --feature basic")
    p.add_argument("--seed", type=int, default=42, help="default: 42")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("profile", help="dataset feature vectors, optionally joined with leaderboard targets")
    p.add_argument("datasets", nargs="+", help="JSON-lines datasets or directories of them")
    p.add_argument("--wordlist", help="basic word list, one word per line (default: bundled list)")
    p.add_argument("--ppl-scores", help="precomputed perplexity CSV sample_id,value")
    p.add_argument("--gerr-scores", help="precomputed grammar CSV sample_id,errors,words")
    p.add_argument("--lmix-scores", help="precomputed language flags CSV sample_id,value")
    p.add_argument("--leaderboard", help="join with system scores and emit a training table")
    p.add_argument("--upper-limit-default", type=float, default=100.0)
    p.add_argument("--target", choices=P.TARGET_KINDS, default="var")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("train", help="fit a discrimination regressor")
    p.add_argument("table", help="training table CSV")
    p.add_argument("--model", choices=sorted(P.DEFAULTS), default="gbdt")
    p.add_argument("--target", choices=P.TARGET_KINDS, default="var")
    p.add_argument("--k", type=int, default=None, help="knn neighbours (default: 5)")
    p.add_argument("--max-depth", type=int, default=None, help="default: 6 for cart, 3 for gbdt")
    p.add_argument("--min-leaf", type=int, default=None, help="default: 2")
    p.add_argument("--n-trees", type=int, default=None, help="gbdt stages (default: 100)")
    p.add_argument("--learning-rate", type=float, default=None, help="gbdt shrinkage (default: 0.1)")
    p.add_argument("--holdout", type=int, default=0, help="hold out N random rows for testing")
    p.add_argument("--test-out", help="where held-out rows go (default: <out>.test.csv)")
    p.add_argument("--seed", type=int, default=42, help="default: 42")
    p.add_argument("--out", required=True, help="model file")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict discrimination for feature rows")
    p.add_argument("model")
    p.add_argument("features", help="profile CSV or training table")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="RMSE, Spearman, NDCG and MAP on a held-out table")
    p.add_argument("model")
    p.add_argument("table")
    p.add_argument("--group-sizes", default="5,7,9", help="ranking group sizes (default: 5,7,9)")
    p.add_argument("--groups", type=int, default=100, help="groups per size (default: 100)")
    p.add_argument("--threshold-var", type=float, default=P.MAP_THRESHOLDS["var"],
                   help="MAP relevance threshold for lambda_var (default: 3)")
    p.add_argument("--threshold-sva", type=float, default=P.MAP_THRESHOLDS["sva"],
                   help="MAP relevance threshold for lambda_sva (default: 28)")
    p.add_argument("--seed", type=int, default=42, help="default: 42")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="sorted bar chart data from a measure CSV")
    p.add_argument("measures")
    p.add_argument("--column", default="lambda_sva", help="default: lambda_sva")
    p.add_argument("--format", choices=("csv", "svg"), default="csv")
    p.add_argument("--log-scale", action="store_true", help="plot log10 of the values")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"discrim {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError, OSError) as exc:
        print(f"discrim {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
