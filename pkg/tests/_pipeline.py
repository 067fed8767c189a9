"""End-to-end CLI run over a synthetic corpus, shared by the CLI and acceptance tests."""
import csv
from pathlib import Path

from discrim import corpusops
from discrim.cli import main, read_features
from discrim.textprofile import dumps_jsonl

from _synth import board_leaderboard_csv, text_corpus

# knobs per parent dataset: (mean_len, richness, long_frac)
PARENTS = [
    (6, 1.0, 0.0), (9, 0.5, 0.1), (12, 0.8, 0.3), (15, 0.3, 0.0),
    (8, 0.6, 0.5), (18, 1.0, 0.2), (11, 0.4, 0.6), (14, 0.7, 0.1),
]


def run(argv) -> None:
    code = main([str(a) for a in argv])
    if code != 0:
        raise AssertionError(f"discrim {argv[0]} exited {code}")


def write_parents(root: Path, per_parent=250, seed=0) -> list:
    root.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, (mean_len, richness, long_frac) in enumerate(PARENTS):
        d = text_corpus(f"toy{i}", per_parent, seed=seed + i, mean_len=mean_len, richness=richness,
                        long_frac=long_frac, test_frac=0.4)
        p = root / f"toy{i}.jsonl"
        p.write_text(dumps_jsonl(d.samples), encoding="utf-8")
        paths.append(p)
    return paths


def write_prediction_files(root: Path) -> list:
    root.mkdir(parents=True, exist_ok=True)
    dom = root / "dominant.csv"
    dom.write_text("sample_id,strong,weak\n" + "".join(f"s{i},1,0\n" for i in range(12)))
    same = root / "identical.csv"
    same.write_text("sample_id,a,b,c\n" + "".join(f"s{i},{i % 2},{i % 2},{(i // 2) % 2}\n" for i in range(10)))
    return [dom, same]


def pipeline(root: Path, seed=42) -> dict:
    """Runs every subcommand; returns the output paths by name."""
    root = Path(root)
    parents = write_parents(root / "parents")
    out = {}
    out["split_dir"] = root / "subsets"
    run(["split", *parents, "--feature", "len", "--feature", "ttr", "--feature", "fre", "--bins", 3,
         "--min-size", 10, "--seed", seed, "--out-dir", out["split_dir"]])
    out["manifest"] = out["split_dir"] / "manifest.csv"

    # simulated system scores for every sub-dataset, driven by its profile
    out["features"] = root / "features.csv"
    run(["profile", out["split_dir"], "--out", out["features"]])
    ids, names, X = read_features(out["features"])
    profiles = {did: dict(zip(names, row)) for did, row in zip(ids, X)}
    lb = corpusops.simulate_leaderboard(profiles, k=4, seed=seed)
    out["leaderboard"] = root / "leaderboard.csv"
    out["leaderboard"].write_text(corpusops.format_leaderboard(lb), encoding="utf-8")

    out["table"] = root / "table.csv"
    run(["profile", out["split_dir"], "--leaderboard", out["leaderboard"], "--out", out["table"]])
    out["model"] = root / "model.json"
    out["test_table"] = root / "model.test.csv"
    run(["train", out["table"], "--model", "gbdt", "--holdout", 20, "--seed", seed, "--out", out["model"]])
    out["predictions"] = root / "predictions.csv"
    run(["predict", out["model"], out["test_table"], "--out", out["predictions"]])
    out["metrics"] = root / "metrics.csv"
    run(["evaluate", out["model"], out["test_table"], "--group-sizes", "5,7,9", "--groups", 50,
         "--seed", seed, "--out", out["metrics"]])

    out["measures"] = root / "measures.csv"
    board = root / "board.csv"
    board.write_text(board_leaderboard_csv(), encoding="utf-8")
    run(["measure", board, "--out", out["measures"]])
    out["report_csv"] = root / "report.csv"
    run(["report", out["measures"], "--out", out["report_csv"]])
    out["report_svg"] = root / "report.svg"
    run(["report", out["measures"], "--format", "svg", "--log-scale", "--out", out["report_svg"]])
    out["hitrate"] = root / "hit.csv"
    out["pairs"] = root / "hit.pairs.csv"
    run(["hitrate", *write_prediction_files(root / "preds"), "--iterations", 500, "--seed", seed,
         "--out", out["hitrate"]])
    return out


def read_csv(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def tree_bytes(root: Path) -> dict:
    """Relative path -> bytes for every output file under ``root``."""
    root = Path(root)
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}
