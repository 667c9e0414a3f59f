#!/usr/bin/env python3
"""Convert raw Planetoid files (ind.<name>.{x,y,tx,ty,allx,ally,graph,test.index})
into a dgc graph bundle.

    python3 tools/planetoid_to_bundle.py --raw path/to/planetoid/data --name cora --out data/cora

Uses the standard public split: the first len(y) nodes train, the next 500
validate, and the test.index nodes test. Duplicate edges and self-loops in the
raw adjacency dict are dropped. Citeseer's test nodes that have no features
get zero rows, as in the usual preprocessing.
"""

import argparse
import json
import pickle
import sys
from pathlib import Path

import numpy as np
import scipy.sparse as sp


def load_raw(raw: Path, name: str):
    objs = {}
    for key in ("x", "y", "tx", "ty", "allx", "ally", "graph"):
        with open(raw / f"ind.{name}.{key}", "rb") as f:
            objs[key] = pickle.load(f, encoding="latin1")
    test_idx = np.loadtxt(raw / f"ind.{name}.test.index", dtype=np.int64).reshape(-1)
    return objs, test_idx


def to_dense(m):
    return m.toarray() if sp.issparse(m) else np.asarray(m)


def convert(raw: Path, name: str, out: Path, row_normalize: bool) -> None:
    o, test_idx = load_raw(raw, name)
    allx, tx = to_dense(o["allx"]), to_dense(o["tx"])
    ally, ty = np.asarray(o["ally"]), np.asarray(o["ty"])
    y = np.asarray(o["y"])

    test_sorted = np.sort(test_idx)
    if name == "citeseer":
        span = test_sorted[-1] - test_sorted[0] + 1
        tx_full = np.zeros((span, tx.shape[1]), dtype=tx.dtype)
        tx_full[test_sorted - test_sorted[0], :] = tx
        ty_full = np.zeros((span, ty.shape[1]), dtype=ty.dtype)
        ty_full[test_sorted - test_sorted[0], :] = ty
        tx, ty = tx_full, ty_full

    features = np.vstack([allx, tx])
    onehot = np.vstack([ally, ty])
    features[test_idx, :] = features[test_sorted, :]
    onehot[test_idx, :] = onehot[test_sorted, :]
    labels = onehot.argmax(axis=1)
    n, d = features.shape

    edges = set()
    for src, nbrs in o["graph"].items():
        for dst in nbrs:
            if src == dst:
                continue
            a, b = (src, dst) if src < dst else (dst, src)
            if b >= n:
                sys.exit(f"edge ({a}, {b}) points past the {n} feature rows")
            edges.add((a, b))

    split = np.full(n, "", dtype=object)
    split[np.arange(len(y))] = "train"
    split[np.arange(len(y), len(y) + 500)] = "val"
    split[test_idx] = "test"

    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "features_format": "bin",
        "num_classes": int(onehot.shape[1]),
        "num_features": int(d),
        "num_nodes": int(n),
        "row_normalize": row_normalize,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    with open(out / "edges.tsv", "w", newline="\n") as f:
        for a, b in sorted(edges):
            f.write(f"{a}\t{b}\n")
    features.astype("<f4").tofile(out / "features.bin")
    with open(out / "labels.tsv", "w", newline="\n") as f:
        for i, c in enumerate(labels):
            f.write(f"{i}\t{c}\n")
    with open(out / "splits.tsv", "w", newline="\n") as f:
        for i, s in enumerate(split):
            if s:
                f.write(f"{i}\t{s}\n")

    counts = {s: int((split == s).sum()) for s in ("train", "val", "test")}
    print(f"{name}: n={n} d={d} classes={onehot.shape[1]} edges={len(edges)} splits={counts}")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawTextHelpFormatter)
    p.add_argument("--raw", type=Path, required=True, help="directory holding the ind.* files")
    p.add_argument("--name", required=True, choices=["cora", "citeseer", "pubmed"])
    p.add_argument("--out", type=Path, required=True, help="bundle directory to write")
    p.add_argument("--no-row-normalize", action="store_true",
                   help="store row_normalize=false in meta.json")
    a = p.parse_args()
    convert(a.raw, a.name, a.out, not a.no_row_normalize)


if __name__ == "__main__":
    main()
