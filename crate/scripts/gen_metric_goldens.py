"""Reference metrics from scikit-learn for the evaluation tests.

Truth is binary (P/N); predictions are ternary (P/N/Z, Z = neutral).
Writes crates/core/tests/fixtures/metrics_sklearn.csv.
"""
import csv
import random
from pathlib import Path

from sklearn.metrics import accuracy_score, f1_score, matthews_corrcoef

OUT = Path(__file__).resolve().parent.parent / "crates/core/tests/fixtures/metrics_sklearn.csv"


def main() -> None:
    rng = random.Random(20240611)
    rows = []
    for case in range(60):
        n = rng.randint(1, 40)
        p_neutral = rng.choice([0.0, 0.1, 0.4, 0.9])
        truth = [rng.choice("PN") for _ in range(n)]
        pred = []
        for t in truth:
            r = rng.random()
            if r < p_neutral:
                pred.append("Z")
            elif r < p_neutral + (1 - p_neutral) * 0.7:
                pred.append(t)
            else:
                pred.append("N" if t == "P" else "P")
        f1 = f1_score(truth, pred, labels=["P", "N"], average=None, zero_division=0)
        rows.append(
            [
                case,
                "".join(truth),
                "".join(pred),
                repr(accuracy_score(truth, pred)),
                repr(float(f1[0])),
                repr(float(f1[1])),
                repr(float(matthews_corrcoef(truth, pred))),
            ]
        )
    with OUT.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["case", "truth", "predicted", "accuracy", "f1_positive", "f1_negative", "mcc"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
