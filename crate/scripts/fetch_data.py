#!/usr/bin/env python3
"""Fetch and normalize the five benchmark datasets into data/.

Every dataset is written as a headered comma-separated CSV with the label in
the last column, matching the manifests in data/. Sources are tried in
order: the canonical UCI repository first, then public mirrors. The mirrors
may order rows differently than UCI; the cross-validation splitter shuffles
per class with a fixed seed, so results stay reproducible either way.

Usage: python3 scripts/fetch_data.py [--data-dir data]
"""

import argparse
import csv
import gzip
import io
import os
import sys
import urllib.request

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"
PMLB = "https://raw.githubusercontent.com/EpistasisLab/pmlb/master/datasets"


def fetch(url: str) -> bytes:
    print(f"  fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read()


def try_sources(sources):
    last = None
    for label, fn in sources:
        try:
            return fn()
        except Exception as e:  # noqa: BLE001 - report and try the next source
            print(f"  {label} failed: {e}")
            last = e
    raise RuntimeError(f"all sources failed: {last}")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    print(f"  wrote {path} ({len(rows)} rows)")


def rows_from_csv_bytes(raw, delimiter=","):
    text = raw.decode("utf-8")
    return [r for r in csv.reader(io.StringIO(text), delimiter=delimiter) if r]


def pmlb_rows(name):
    raw = gzip.decompress(fetch(f"{PMLB}/{name}/{name}.tsv.gz"))
    rows = rows_from_csv_bytes(raw, delimiter="\t")
    return rows[0], rows[1:]  # header, data


def make_iris(data_dir):
    def from_uci():
        return rows_from_csv_bytes(fetch(f"{UCI}/iris/iris.data"))

    def from_mirror():
        return rows_from_csv_bytes(
            fetch("https://raw.githubusercontent.com/jbrownlee/Datasets/master/iris.csv")
        )

    rows = try_sources([("UCI", from_uci), ("github mirror", from_mirror)])
    assert len(rows) == 150, f"expected 150 iris rows, got {len(rows)}"
    header = ["sepal_length", "sepal_width", "petal_length", "petal_width", "species"]
    write_csv(os.path.join(data_dir, "iris.csv"), header, rows)


def make_wdbc(data_dir):
    names = [
        "radius", "texture", "perimeter", "area", "smoothness", "compactness",
        "concavity", "concave_points", "symmetry", "fractal_dimension",
    ]
    header = (
        [f"mean_{n}" for n in names]
        + [f"{n}_error" for n in names]
        + [f"worst_{n}" for n in names]
        + ["diagnosis"]
    )

    def from_uci():
        rows = rows_from_csv_bytes(fetch(f"{UCI}/breast-cancer-wisconsin/wdbc.data"))
        # columns: id, diagnosis, 30 features -> drop id, move label last
        return [r[2:] + [r[1]] for r in rows]

    def from_sklearn():
        from sklearn.datasets import load_breast_cancer

        bc = load_breast_cancer()
        label = {0: "M", 1: "B"}
        return [
            [repr(float(v)) for v in x] + [label[int(y)]]
            for x, y in zip(bc.data, bc.target)
        ]

    rows = try_sources([("UCI", from_uci), ("scikit-learn copy", from_sklearn)])
    assert len(rows) == 569, f"expected 569 wdbc rows, got {len(rows)}"
    write_csv(os.path.join(data_dir, "wdbc.csv"), header, rows)


def make_optdigits(data_dir):
    def from_uci():
        rows = []
        for part in ("optdigits.tra", "optdigits.tes"):
            rows.extend(rows_from_csv_bytes(fetch(f"{UCI}/optdigits/{part}")))
        return rows

    def from_pmlb():
        _, data = pmlb_rows("optdigits")
        return [[str(int(float(v))) for v in r] for r in data]

    rows = try_sources([("UCI", from_uci), ("PMLB mirror", from_pmlb)])
    assert len(rows) == 5620, f"expected 5620 optdigits rows, got {len(rows)}"
    header = [f"p{i:02d}" for i in range(64)] + ["digit"]
    write_csv(os.path.join(data_dir, "optdigits.csv"), header, rows)


def make_satellite(data_dir):
    def from_uci():
        rows = []
        for part in ("sat.trn", "sat.tst"):
            raw = fetch(f"{UCI}/statlog/satimage/{part}").decode("utf-8")
            rows.extend(line.split() for line in raw.splitlines() if line.strip())
        return rows

    def from_pmlb():
        _, data = pmlb_rows("satimage")
        return [[str(int(float(v))) for v in r] for r in data]

    rows = try_sources([("UCI", from_uci), ("PMLB mirror", from_pmlb)])
    assert len(rows) == 6435, f"expected 6435 satellite rows, got {len(rows)}"
    header = [f"b{i:02d}" for i in range(36)] + ["cover"]
    write_csv(os.path.join(data_dir, "satellite.csv"), header, rows)


def make_eeg(data_dir):
    header = [
        "AF3", "F7", "F3", "FC5", "T7", "P7", "O1", "O2",
        "P8", "T8", "FC6", "F4", "F8", "AF4", "eye_state",
    ]

    def from_uci():
        raw = fetch(f"{UCI}/00264/EEG%20Eye%20State.arff").decode("utf-8")
        rows = []
        in_data = False
        for line in raw.splitlines():
            line = line.strip()
            if not in_data:
                in_data = line.lower() == "@data"
                continue
            if line and not line.startswith("%"):
                rows.append(line.split(","))
        return rows

    def from_mirror():
        raw = fetch(
            "https://raw.githubusercontent.com/datasets/eeg-eye-state/main/data/eeg-eye-state.csv"
        )
        return rows_from_csv_bytes(raw)[1:]  # drop the mirror's header

    rows = try_sources([("UCI", from_uci), ("datahub mirror", from_mirror)])
    assert len(rows) == 14980, f"expected 14980 eeg rows, got {len(rows)}"
    write_csv(os.path.join(data_dir, "eeg_eye_state.csv"), header, rows)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default="data")
    parser.add_argument(
        "--only",
        choices=["iris", "wbc", "digits", "satellite", "eeg"],
        help="fetch a single dataset",
    )
    args = parser.parse_args()
    os.makedirs(args.data_dir, exist_ok=True)
    steps = {
        "iris": make_iris,
        "wbc": make_wdbc,
        "digits": make_optdigits,
        "satellite": make_satellite,
        "eeg": make_eeg,
    }
    selected = [args.only] if args.only else list(steps)
    for name in selected:
        print(f"{name}:")
        steps[name](args.data_dir)
    print("done")


if __name__ == "__main__":
    sys.exit(main())
