"""Writes the synthetic K = 10 instance files used by the example configs and the acceptance suite."""

import argparse
import json
from pathlib import Path

K = 10
PBM_CHI = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.25, 0.2]
DCM_V = [0.7, 0.65, 0.6, 0.55, 0.5, 0.45, 0.4, 0.35, 0.3, 0.25]


def cluster(top, start, n, step, tail):
    """Strong items, then n near-tied items spaced by `step`, then a weak tail."""
    return top + [round(start - step * i, 4) for i in range(n)] + tail


GRID = [
    ("cm-a", "cm", cluster([0.6], 0.3, 5, 0.02, [0.1, 0.08, 0.06, 0.04]), None, [2, 3, 4, 5, 6, 1, 7, 8, 9, 10]),
    ("cm-b", "cm", cluster([0.7, 0.65], 0.3, 5, 0.02, [0.1, 0.07, 0.04]), None, [3, 4, 5, 6, 7, 1, 2, 8, 9, 10]),
    ("cm-c", "cm", cluster([0.6], 0.25, 6, 0.015, [0.08, 0.05, 0.03]), None, [2, 3, 4, 5, 6, 7, 1, 8, 9, 10]),
    ("pbm-a", "pbm", cluster([0.9], 0.5, 5, 0.02, [0.2, 0.15, 0.1, 0.05]), PBM_CHI, [2, 3, 4, 5, 6, 1, 7, 8, 9, 10]),
    ("pbm-b", "pbm", cluster([0.9, 0.85], 0.45, 5, 0.02, [0.15, 0.1, 0.05]), PBM_CHI, [3, 4, 5, 6, 7, 1, 2, 8, 9, 10]),
    ("pbm-c", "pbm", cluster([0.8], 0.4, 6, 0.02, [0.15, 0.1, 0.05]), PBM_CHI, [2, 3, 4, 5, 6, 7, 1, 8, 9, 10]),
    ("pbm-d", "pbm", cluster([0.95], 0.6, 5, 0.025, [0.3, 0.2, 0.1, 0.05]), PBM_CHI, [2, 3, 4, 5, 6, 1, 8, 7, 10, 9]),
    ("dcm-a", "dcm", cluster([0.9], 0.5, 5, 0.02, [0.2, 0.15, 0.1, 0.05]), DCM_V, [2, 3, 4, 5, 6, 1, 7, 8, 9, 10]),
    ("dcm-b", "dcm", cluster([0.9, 0.85], 0.45, 5, 0.02, [0.15, 0.1, 0.05]), DCM_V, [3, 4, 5, 6, 7, 1, 2, 8, 9, 10]),
    ("dcm-c", "dcm", cluster([0.8], 0.4, 6, 0.02, [0.15, 0.1, 0.05]), DCM_V, [2, 3, 4, 5, 6, 7, 1, 8, 9, 10]),
]


def instance(id_, model, alpha, extra, initial, cutoff=5):
    assert len(alpha) == K and all(a > b for a, b in zip(alpha, alpha[1:])), id_
    doc = {"id": id_, "model": model, "K": K, "alpha": alpha}
    if model == "pbm":
        doc["chi"] = extra
    if model == "dcm":
        doc["v"] = extra
    doc["initial_list"] = initial
    doc["eval_cutoff"] = cutoff
    return doc


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "instances")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    docs = [instance(*row) for row in GRID]
    v0_alpha = [round(0.9 * 0.8**k, 4) for k in range(K)]
    v0_chi = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.45, 0.4, 0.35, 0.3]
    docs.append(instance("pbm-v0", "pbm", v0_alpha, v0_chi, list(range(1, K + 1)), cutoff=K))
    for doc in docs:
        (args.out / f"{doc['id']}.json").write_text(json.dumps(doc) + "\n")


if __name__ == "__main__":
    main()
