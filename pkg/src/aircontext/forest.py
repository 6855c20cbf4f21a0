"""Random forest classifier over flattened feature matrices.

Written directly on numpy so the on-disk model is a plain JSON tree dump and
training is reproducible bit-for-bit from a seed: bootstrap resample per
tree, sqrt(d) random feature candidates per split, Gini impurity, growth to
purity unless max_depth caps it. A class's predicted probability is the
fraction of trees voting for it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .fingerprint import FeatureMatrix
from .model import TrainingError

_LEAF = -1


@dataclass
class _Tree:
    feature: np.ndarray    # int32, _LEAF for leaves
    threshold: np.ndarray  # float64
    left: np.ndarray       # int32
    right: np.ndarray      # int32
    counts: list           # per-node class counts (lists; [] for internal nodes)
    vote: np.ndarray       # int32 class index voted at each node (argmax of counts)


def _grow(X: np.ndarray, y: np.ndarray, n_classes: int, k_features: int,
          max_depth: int | None, rng: np.random.Generator) -> _Tree:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    counts: list[list[int]] = []
    vote: list[int] = []

    def build(idx: np.ndarray, depth: int) -> int:
        node = len(feature)
        feature.append(_LEAF)
        threshold.append(0.0)
        left.append(_LEAF)
        right.append(_LEAF)
        cnt = np.bincount(y[idx], minlength=n_classes)
        counts.append([])
        vote.append(int(np.argmax(cnt)))  # ties resolve to the lowest class index

        n = idx.size
        if cnt.max() == n or n < 2 or (max_depth is not None and depth >= max_depth):
            counts[node] = cnt.tolist()
            return node

        # Features constant within the node (padding columns, mostly) don't
        # use up the candidate budget; keep drawing until k informative ones
        # were scored or the pool runs dry.
        pool = rng.permutation(X.shape[1])
        best_w = np.inf
        best_f = -1
        best_thr = 0.0
        yi = y[idx]
        scored = 0
        for f in pool:
            if scored >= k_features:
                break
            v = X[idx, f]
            order = np.argsort(v, kind="stable")
            vs = v[order]
            cut = np.nonzero(vs[:-1] < vs[1:])[0]
            if cut.size == 0:
                continue
            scored += 1
            onehot = np.zeros((n, n_classes), dtype=np.float64)
            onehot[np.arange(n), yi[order]] = 1.0
            cum = onehot.cumsum(axis=0)
            nl = (cut + 1).astype(np.float64)
            nr = n - nl
            lc = cum[cut]
            rc = cum[-1] - lc
            gini_l = 1.0 - (lc * lc).sum(axis=1) / (nl * nl)
            gini_r = 1.0 - (rc * rc).sum(axis=1) / (nr * nr)
            w = (nl * gini_l + nr * gini_r) / n
            i = int(np.argmin(w))
            if w[i] < best_w:
                best_w = float(w[i])
                best_f = int(f)
                best_thr = float((vs[cut[i]] + vs[cut[i] + 1]) / 2.0)
        if best_f < 0:
            counts[node] = cnt.tolist()  # every feature constant here
            return node

        mask = X[idx, best_f] <= best_thr
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = build(idx[mask], depth + 1)
        right[node] = build(idx[~mask], depth + 1)
        return node

    build(np.arange(X.shape[0]), 0)
    return _Tree(np.array(feature, dtype=np.int32), np.array(threshold, dtype=np.float64),
                 np.array(left, dtype=np.int32), np.array(right, dtype=np.int32),
                 counts, np.array(vote, dtype=np.int32))


class RandomForest:
    """Bagged decision trees; classes are event ids, inputs flat feature rows."""

    def __init__(self, trees: list[_Tree], classes: list[int], feature_dim: int,
                 n_trees: int, max_depth: int | None, seed: int):
        self.trees = trees
        self.classes = list(classes)
        self.feature_dim = feature_dim
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.seed = seed
        self._pack()

    def _pack(self) -> None:
        # One flat node arena across all trees for loop-free descent per level.
        offs = []
        total = 0
        for t in self.trees:
            offs.append(total)
            total += t.feature.size
        self._roots = np.array(offs, dtype=np.int64)
        self._feat = np.concatenate([t.feature for t in self.trees]).astype(np.int64)
        self._thr = np.concatenate([t.threshold for t in self.trees])
        self._left = np.concatenate([(t.left + o) for t, o in zip(self.trees, offs)]).astype(np.int64)
        self._right = np.concatenate([(t.right + o) for t, o in zip(self.trees, offs)]).astype(np.int64)
        self._vote = np.concatenate([t.vote for t in self.trees]).astype(np.int64)

    @classmethod
    def train(cls, samples: list[tuple[int, FeatureMatrix]], n_trees: int = 100,
              seed: int = 0, max_depth: int | None = None) -> "RandomForest":
        if not samples:
            raise TrainingError("empty sample set")
        classes = sorted({eid for eid, _ in samples})
        class_index = {c: i for i, c in enumerate(classes)}
        X = np.stack([fm.flat() for _, fm in samples])
        y = np.array([class_index[eid] for eid, _ in samples], dtype=np.int64)
        d = X.shape[1]
        k = max(1, int(round(math.sqrt(d))))
        master = np.random.default_rng(seed)
        tree_seeds = master.integers(0, 2**63 - 1, size=n_trees)
        trees = []
        for s in tree_seeds:
            trng = np.random.default_rng(int(s))
            boot = trng.integers(0, X.shape[0], size=X.shape[0])
            trees.append(_grow(X[boot], y[boot], len(classes), k, max_depth, trng))
        return cls(trees, classes, d, n_trees, max_depth, seed)

    def vote_fractions(self, x: np.ndarray) -> np.ndarray:
        """Fraction of trees voting each class, aligned with self.classes."""
        ptr = self._roots.copy()
        f = self._feat[ptr]
        alive = f >= 0
        while alive.any():
            cur = ptr[alive]
            fc = self._feat[cur]
            goleft = x[fc] <= self._thr[cur]
            ptr[alive] = np.where(goleft, self._left[cur], self._right[cur])
            f = self._feat[ptr]
            alive = f >= 0
        votes = self._vote[ptr]
        frac = np.bincount(votes, minlength=len(self.classes)).astype(np.float64)
        return frac / self.n_trees

    def predict_proba(self, fm: FeatureMatrix) -> dict[int, float]:
        frac = self.vote_fractions(fm.flat())
        return {c: float(frac[i]) for i, c in enumerate(self.classes)}

    def predict(self, fm: FeatureMatrix) -> int:
        frac = self.vote_fractions(fm.flat())
        return self.classes[int(np.argmax(frac))]

    # -- serialization ------------------------------------------------------

    def save(self, path: str) -> None:
        doc = {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "classes": self.classes,
            "feature_dim": self.feature_dim,
            "seed": self.seed,
            "trees": [{
                "feature": t.feature.tolist(),
                "threshold": t.threshold.tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "counts": t.counts,
            } for t in self.trees],
        }
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(doc, separators=(",", ":")) + "\n")

    @classmethod
    def load(cls, path: str) -> "RandomForest":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        trees = []
        for row in doc["trees"]:
            counts = row["counts"]
            vote = np.array([int(np.argmax(c)) if c else 0 for c in counts], dtype=np.int32)
            trees.append(_Tree(np.array(row["feature"], dtype=np.int32),
                               np.array(row["threshold"], dtype=np.float64),
                               np.array(row["left"], dtype=np.int32),
                               np.array(row["right"], dtype=np.int32),
                               counts, vote))
        return cls(trees, [int(c) for c in doc["classes"]], int(doc["feature_dim"]),
                   int(doc["n_trees"]), doc["max_depth"], int(doc["seed"]))
