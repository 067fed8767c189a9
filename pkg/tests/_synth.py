"""Synthetic fixtures shared by the test modules."""
import numpy as np

from discrim.predict import TrainTable
from discrim.textprofile import TextDataset, TextSample

# published text-classification leaderboard: BERT, LSTMAtt, LSTM, CNN accuracies
# with the hit-rate, variance and scaled-variance values reported alongside
BOARD = {
    "SST1": ([54.12, 43.80, 47.60, 44.80], 0.88, 4.65, 243.56),
    "CR": ([91.75, 83.25, 82.50, 84.25], 0.91, 4.27, 62.17),
    "MR": ([85.55, 79.92, 79.80, 82.00], 0.86, 2.69, 48.83),
    "QC": ([97.19, 90.36, 89.96, 92.17], 0.92, 3.32, 25.18),
    "IMDB": ([93.34, 89.45, 89.65, 87.81], 0.87, 2.33, 23.18),
    "ADE": ([93.48, 92.90, 92.65, 89.54], 0.78, 1.77, 13.90),
    "ATIS": ([97.64, 97.42, 97.31, 94.62], 0.78, 1.42, 4.63),
    "Yelp": ([97.52, 96.60, 96.60, 95.46], 0.81, 0.84, 2.91),
    "DPedia": ([99.27, 99.01, 99.05, 98.75], 0.68, 0.22, 0.21),
}
BOARD_SYSTEMS = ["BERT", "LSTMAtt", "LSTM", "CNN"]

SIGNAL = ("tr_len", "tr_ttr", "tr_bal")
NOISE = ("noise_a", "noise_b", "noise_c")


def board_leaderboard_csv() -> str:
    lines = ["benchmark,dataset,system,score,upper_limit"]
    for ds, (scores, *_rest) in BOARD.items():
        for sys_id, s in zip(BOARD_SYSTEMS, scores):
            lines.append(f"textclf,{ds},{sys_id},{s},100")
    return "\n".join(lines) + "\n"


def regression_corpus(n=300, seed=0) -> TrainTable:
    """Rows with lambda = 2*len + 5*ttr - 3*bal + noise (sigma = 10% of the clean std)."""
    rng = np.random.default_rng(seed)
    length = rng.uniform(8, 12, n)
    ttr = rng.uniform(0.2, 1.0, n)
    bal = rng.uniform(-1.0, 0.0, n)
    noise = rng.uniform(0, 1, (n, 3))
    clean = 2 * length + 5 * ttr - 3 * bal
    y = clean + rng.normal(0, 0.1 * clean.std(), n)
    X = np.column_stack([length, ttr, bal, noise])
    return TrainTable(tuple(f"sub{i}" for i in range(n)), SIGNAL + NOISE, X, y, y, "var")


_CLASS_WORDS = {
    "sports": "game team score match player coach season goal win league".split(),
    "tech": "computer software chip network code data device phone cloud robot".split(),
    "food": "bread cheese soup recipe kitchen dinner sugar fruit cook spicy".split(),
}
_SHARED = ("the a is was very really quite this that with and of to in on it for new old good bad big "
           "small people year day time thing way world life").split()
_LONG = "extraordinarily unquestionably internationalization responsibility characteristically".split()


def text_corpus(dataset_id, n, seed, mean_len=10, richness=1.0, long_frac=0.0, test_frac=0.3) -> TextDataset:
    """Three-class synthetic corpus; knobs shift length, lexical richness and readability."""
    rng = np.random.default_rng(seed)
    labels = sorted(_CLASS_WORDS)
    samples = []
    for i in range(n):
        label = labels[i % 3]
        length = max(2, int(rng.poisson(mean_len)))
        pool = _CLASS_WORDS[label] + _SHARED
        k = max(2, int(len(pool) * richness))
        toks = [pool[j] for j in rng.integers(0, k, length)]
        if long_frac and rng.random() < long_frac:
            toks[rng.integers(0, length)] = _LONG[rng.integers(0, len(_LONG))]
        text = " ".join(toks).capitalize() + "."
        split = "test" if rng.random() < test_frac else "train"
        samples.append(TextSample(f"{dataset_id}-{i}", text, label, split))
    return TextDataset(dataset_id, samples)
