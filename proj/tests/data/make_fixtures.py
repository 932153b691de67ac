"""Regenerates the pickle fixtures and their expected values.

Run from this directory: python3 make_fixtures.py
"""
import json
import pickle
import sys
from collections import defaultdict

import numpy as np
import scipy.sparse as sp


def write_planetoid(dirname, name, test_ids, protocol, n_allx=6, n_y=3, d=5, classes=3, seed=0):
    import os
    os.makedirs(dirname, exist_ok=True)
    rng = np.random.default_rng(seed)
    n_tx = len(test_ids)
    allx = sp.csr_matrix((rng.random((n_allx, d)) < 0.5).astype(np.float32) * rng.integers(1, 4, (n_allx, d)))
    tx = sp.csr_matrix((rng.random((n_tx, d)) < 0.5).astype(np.float32) * rng.integers(1, 4, (n_tx, d)))
    x = allx[:n_y]
    ally = np.eye(classes)[rng.integers(0, classes, n_allx)]
    ty = np.eye(classes)[rng.integers(0, classes, n_tx)]
    y = ally[:n_y]
    n = n_allx + (max(test_ids) - min(test_ids) + 1)
    graph = defaultdict(list)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.35:
                graph[i].append(j)
                graph[j].append(i)
    graph[0].append(0)  # a self-loop the converter must drop
    graph[1].append(2)  # a duplicate
    for key, obj in [("x", x), ("y", y), ("tx", tx), ("ty", ty), ("allx", allx), ("ally", ally), ("graph", graph)]:
        with open(f"{dirname}/ind.{name}.{key}", "wb") as f:
            pickle.dump(obj, f, protocol=protocol)
    with open(f"{dirname}/ind.{name}.test.index", "w") as f:
        f.write("\n".join(str(i) for i in test_ids) + "\n")

    # Reference loader: the widely used construction for these files.
    test_idx_reorder = list(test_ids)
    test_idx_range = np.sort(test_idx_reorder)
    full = range(min(test_idx_reorder), max(test_idx_reorder) + 1)
    tx_ext = sp.lil_matrix((len(full), d))
    tx_ext[test_idx_range - min(test_idx_range), :] = tx
    ty_ext = np.zeros((len(full), classes))
    ty_ext[test_idx_range - min(test_idx_range), :] = ty
    features = sp.vstack((allx, tx_ext)).tolil()
    features[test_idx_reorder, :] = features[test_idx_range, :]
    labels = np.vstack((ally, ty_ext))
    labels[test_idx_reorder, :] = labels[test_idx_range, :]
    edges = set()
    for u, nb in graph.items():
        for v in nb:
            if u != v:
                edges.add((u, v))
                edges.add((v, u))
    return {
        "N": int(n),
        "features": np.asarray(features.todense()).tolist(),
        "labels": labels.argmax(1).tolist(),
        "train": list(range(len(y))),
        "val": list(range(len(y), min(len(y) + 500, min(test_ids)))),
        "test": sorted(int(i) for i in test_ids),
        "stored_directed_edges": len(edges),
        "raw_edges": int(sum(len(v) for v in graph.values())),
    }


def main():
    expected = {}
    expected["toy"] = write_planetoid("planetoid_p2", "toy", [9, 6, 8, 7], protocol=2, seed=1)
    expected["gappy"] = write_planetoid("planetoid_gap", "gappy", [6, 9, 8], protocol=4, seed=2)

    values = {
        "f8": np.arange(12, dtype=np.float64).reshape(3, 4) / 7.0,
        "i8": np.array([[-3, 5], [7, -1]], dtype=np.int64),
        "f4": np.array([0.5, -1.25, 3.0], dtype=np.float32),
        "fortran": np.asfortranarray(np.arange(6, dtype=np.float64).reshape(2, 3)),
        "bigendian": np.array([1.5, -2.0], dtype=">f8"),
        "bool": np.array([True, False, True]),
    }
    arrays = {}
    for proto in (0, 2, 4, 5):
        for key, arr in values.items():
            fname = f"array_{key}_p{proto}.pkl"
            with open(fname, "wb") as f:
                pickle.dump(arr, f, protocol=proto)
            a = np.asarray(arr, dtype=np.float64)
            arrays[fname] = a.reshape(a.shape[0], -1).tolist() if a.ndim else [[float(a)]]
    m = sp.csr_matrix(np.array([[0, 2.5, 0], [1, 0, 0], [0, 0, -4]]))
    for proto in (2, 4):
        for fmt, mat in (("csr", m), ("csc", m.tocsc()), ("coo", m.tocoo())):
            fname = f"sparse_{fmt}_p{proto}.pkl"
            with open(fname, "wb") as f:
                pickle.dump(mat, f, protocol=proto)
            arrays[fname] = m.toarray().tolist()
    adj = {0: [1, 2], 3: [0]}
    with open("adjacency_dict_p0.pkl", "wb") as f:
        pickle.dump(adj, f, protocol=0)
    expected["arrays"] = arrays
    with open("expected.json", "w") as f:
        json.dump(expected, f, indent=1)
    print("numpy", np.__version__, "scipy", sp.__name__, file=sys.stderr)


if __name__ == "__main__":
    main()
