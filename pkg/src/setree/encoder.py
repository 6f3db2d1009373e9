"""Deterministic forward pass over a coding tree, plus the loss heads.

The encoder takes one document vector, duplicates and projects it onto the
tree's leaves (one leaf per label), then runs one small MLP per level where
each node consumes the sum of its children's rows. A readout pools every
level and concatenates the pools; a sigmoid layer turns that into per-label
probabilities. Everything is a pure function of (tree, weights, input):
child rows are always gathered in ascending canonical order before summing,
so permuting children lists cannot change even the last bit of the output.

No training here. Losses (binary cross-entropy, recursive regularization
over classifier columns) are evaluated on supplied weights only. Losses use
natural log; graph entropies elsewhere use base 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tree import CodingTree

POOL_MODES = ("sum", "avg", "max")
NORM_MODES = ("off", "inference")


def _as_matrix(x, name):
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a matrix, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def _as_vector(x, name):
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


@dataclass
class MlpLayer:
    """One per-level update: affine -> normalization -> relu -> affine."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    scale: np.ndarray | None = None
    shift: np.ndarray | None = None


@dataclass
class TinWeights:
    """Every parameter of the forward pass, shape-checked on construction."""

    n_labels: int
    d_h: int
    d_v: int
    k: int
    w_d: np.ndarray  # (n_labels, 1)
    w_p: np.ndarray  # (d_h, d_v)
    b_h: np.ndarray  # (n_labels, d_v)
    mlps: list  # k MlpLayer entries, index i-1 serves level i
    w_c: np.ndarray  # (d_t, n_labels)
    b_c: np.ndarray  # (n_labels,)
    pool_mode: str = "sum"
    norm_mode: str = "off"

    def __post_init__(self):
        if self.n_labels < 1 or self.d_h < 1 or self.d_v < 1 or self.k < 1:
            raise ValueError("n_labels, d_h, d_v, k must all be positive")
        if self.pool_mode not in POOL_MODES:
            raise ValueError(f"pool_mode must be one of {POOL_MODES}")
        if self.norm_mode not in NORM_MODES:
            raise ValueError(f"norm_mode must be one of {NORM_MODES}")
        self.w_d = _as_matrix(self.w_d, "w_d")
        self.w_p = _as_matrix(self.w_p, "w_p")
        self.b_h = _as_matrix(self.b_h, "b_h")
        self.w_c = _as_matrix(self.w_c, "w_c")
        self.b_c = _as_vector(self.b_c, "b_c")
        if self.w_d.shape != (self.n_labels, 1):
            raise ValueError(f"w_d must be ({self.n_labels}, 1), got {self.w_d.shape}")
        if self.w_p.shape != (self.d_h, self.d_v):
            raise ValueError(f"w_p must be ({self.d_h}, {self.d_v}), got {self.w_p.shape}")
        if self.b_h.shape != (self.n_labels, self.d_v):
            raise ValueError(f"b_h must be ({self.n_labels}, {self.d_v}), got {self.b_h.shape}")
        if len(self.mlps) != self.k:
            raise ValueError(f"need {self.k} mlp layers, got {len(self.mlps)}")
        for i, m in enumerate(self.mlps, start=1):
            m.w1 = _as_matrix(m.w1, f"mlps[{i}].w1")
            m.w2 = _as_matrix(m.w2, f"mlps[{i}].w2")
            m.b1 = _as_vector(m.b1, f"mlps[{i}].b1")
            m.b2 = _as_vector(m.b2, f"mlps[{i}].b2")
            for name, mat in (("w1", m.w1), ("w2", m.w2)):
                if mat.shape != (self.d_v, self.d_v):
                    raise ValueError(
                        f"mlps[{i}].{name} must be ({self.d_v}, {self.d_v}), got {mat.shape}"
                    )
            for name, vec in (("b1", m.b1), ("b2", m.b2)):
                if vec.shape != (self.d_v,):
                    raise ValueError(f"mlps[{i}].{name} must have length {self.d_v}")
            if m.scale is not None:
                m.scale = _as_vector(m.scale, f"mlps[{i}].scale")
                if m.scale.shape != (self.d_v,):
                    raise ValueError(f"mlps[{i}].scale must have length {self.d_v}")
            if m.shift is not None:
                m.shift = _as_vector(m.shift, f"mlps[{i}].shift")
                if m.shift.shape != (self.d_v,):
                    raise ValueError(f"mlps[{i}].shift must have length {self.d_v}")
            if self.norm_mode == "inference" and (m.scale is None or m.shift is None):
                raise ValueError(f"norm_mode 'inference' needs scale and shift in mlps[{i}]")
        if self.w_c.shape != (self.d_t, self.n_labels):
            raise ValueError(f"w_c must be ({self.d_t}, {self.n_labels}), got {self.w_c.shape}")
        if self.b_c.shape != (self.n_labels,):
            raise ValueError(f"b_c must have length {self.n_labels}")

    @property
    def d_t(self) -> int:
        return (self.k + 1) * self.d_v


@dataclass
class LossConfig:
    """Loss knobs: regularizer strength, label hierarchy, probability clamp."""

    lam: float = 1e-6
    label_parents: list | None = None
    prob_clamp: float = 1e-12

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        if not (0.0 < self.prob_clamp < 0.5):
            raise ValueError("prob_clamp must lie in (0, 0.5)")
        if self.label_parents is not None:
            _check_forest(self.label_parents)


def _check_forest(parents) -> None:
    n = len(parents)
    for i, p in enumerate(parents):
        if p is not None and not (0 <= int(p) < n):
            raise ValueError(f"label {i} has out-of-range parent {p}")
    state = [0] * n  # 0 unseen, 1 on current path, 2 done
    for i in range(n):
        path = []
        j = i
        while j is not None and state[j] == 0:
            state[j] = 1
            path.append(j)
            p = parents[j]
            j = None if p is None else int(p)
        if j is not None and state[j] == 1:
            raise ValueError("label parent relation contains a cycle")
        for x in path:
            state[x] = 2


def duplicate_project(h, w: TinWeights) -> np.ndarray:
    """Spread one document vector over all labels: w_d @ h @ w_p + b_h."""
    arr = np.asarray(h, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.shape != (1, w.d_h):
        raise ValueError(f"input vector must be 1x{w.d_h}, got {arr.shape}")
    return w.w_d @ arr @ w.w_p + w.b_h


def tin_layer(tree: CodingTree, layer: int, x_prev, w: TinWeights) -> np.ndarray:
    """Embeddings for the nodes at ``layer`` from the level below.

    Each node's input is the sum of its children's rows, gathered in
    ascending row order regardless of how the children list happens to be
    ordered, then passed through that level's MLP.
    """
    levels = tree.levels()
    if not (1 <= layer < len(levels)):
        raise ValueError(f"layer must be in [1, {len(levels) - 1}], got {layer}")
    below = levels[layer - 1]
    here = levels[layer]
    x_prev = np.asarray(x_prev, dtype=np.float64)
    if x_prev.shape != (len(below), w.d_v):
        raise ValueError(
            f"x_prev must be ({len(below)}, {w.d_v}) for layer {layer}, got {x_prev.shape}"
        )
    pos = {nid: i for i, nid in enumerate(below)}
    summed = np.empty((len(here), w.d_v), dtype=np.float64)
    for row, nid in enumerate(here):
        try:
            idx = sorted(pos[c] for c in tree.nodes[nid].children)
        except KeyError as exc:
            raise ValueError(f"node {nid}: missing child embedding {exc}") from None
        summed[row] = x_prev[idx].sum(axis=0)
    mlp = w.mlps[layer - 1]
    z = summed @ mlp.w1 + mlp.b1
    if w.norm_mode == "inference":
        z = z * mlp.scale + mlp.shift
    z = np.maximum(z, 0.0)
    return z @ mlp.w2 + mlp.b2


def readout(all_layers, w: TinWeights) -> np.ndarray:
    """Pool each level matrix and concatenate, level 0 first: length d_t."""
    if len(all_layers) != w.k + 1:
        raise ValueError(f"need {w.k + 1} level matrices, got {len(all_layers)}")
    segments = []
    for i, mat in enumerate(all_layers):
        mat = np.asarray(mat, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[1] != w.d_v:
            raise ValueError(f"level {i} matrix must have {w.d_v} columns")
        if mat.shape[0] == 0:
            raise ValueError(f"level {i} is empty")
        if w.pool_mode == "sum":
            segments.append(mat.sum(axis=0))
        elif w.pool_mode == "avg":
            segments.append(mat.mean(axis=0))
        else:
            segments.append(mat.max(axis=0))
    return np.concatenate(segments)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def classify(h_t, w: TinWeights) -> np.ndarray:
    """Per-label probabilities: sigmoid(h_t @ w_c + b_c)."""
    arr = np.asarray(h_t, dtype=np.float64).reshape(-1)
    if arr.shape != (w.d_t,):
        raise ValueError(f"readout vector must have length {w.d_t}, got {arr.shape[0]}")
    return _sigmoid(arr @ w.w_c + w.b_c)


def bce_loss(p, y, cfg: LossConfig) -> float:
    """Mean binary cross-entropy with clamped probabilities, natural log."""
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if p.shape != y.shape:
        raise ValueError(f"length mismatch: {p.shape[0]} probabilities, {y.shape[0]} targets")
    if p.size == 0:
        raise ValueError("need at least one label")
    if ((p < 0) | (p > 1)).any():
        raise ValueError("probabilities must lie in [0, 1]")
    if ((y != 0) & (y != 1)).any():
        raise ValueError("targets must be a 0/1 bitmask")
    q = np.clip(p, cfg.prob_clamp, 1.0 - cfg.prob_clamp)
    return float(-np.mean(y * np.log(q) + (1.0 - y) * np.log1p(-q)))


def recursive_reg(w_c, cfg: LossConfig) -> float:
    """Sum over hierarchy edges of half the squared distance between the
    parent's and child's classifier columns."""
    if cfg.label_parents is None:
        raise ValueError("label_parents is not configured")
    w_c = _as_matrix(w_c, "w_c")
    parents = cfg.label_parents
    if len(parents) != w_c.shape[1]:
        raise ValueError(
            f"label_parents has {len(parents)} entries for {w_c.shape[1]} labels"
        )
    _check_forest(parents)
    total = 0.0
    for q, p in enumerate(parents):
        if p is None:
            continue
        diff = w_c[:, int(p)] - w_c[:, q]
        total += 0.5 * float(diff @ diff)
    return total


def total_loss(c: float, r: float, cfg: LossConfig) -> float:
    """Combined objective: classification loss plus lam times the regularizer."""
    return float(c) + cfg.lam * float(r)


def forward(tree: CodingTree, w: TinWeights, h):
    """Full pass: returns (readout vector of length d_t, label probabilities).

    The tree must be level-aligned with height exactly w.k and one leaf per
    label (leaf vertex ids 0..n_labels-1).
    """
    levels = tree.levels()
    if len(levels) - 1 != w.k:
        raise ValueError(f"tree height {len(levels) - 1} does not match declared k={w.k}")
    if len(levels[0]) != w.n_labels:
        raise ValueError(
            f"tree has {len(levels[0])} leaves but weights declare {w.n_labels} labels"
        )
    x = duplicate_project(h, w)
    mats = [x]
    for i in range(1, w.k + 1):
        x = tin_layer(tree, i, x, w)
        mats.append(x)
    h_t = readout(mats, w)
    return h_t, classify(h_t, w)


# ------------------------------------------------------------------ weights IO

def weights_to_json(w: TinWeights) -> dict:
    def arr(a):
        return a.tolist()

    return {
        "n_labels": w.n_labels,
        "d_h": w.d_h,
        "d_v": w.d_v,
        "k": w.k,
        "pool_mode": w.pool_mode,
        "norm_mode": w.norm_mode,
        "w_d": arr(w.w_d),
        "w_p": arr(w.w_p),
        "b_h": arr(w.b_h),
        "mlps": [
            {
                "w1": arr(m.w1),
                "b1": arr(m.b1),
                "w2": arr(m.w2),
                "b2": arr(m.b2),
                "scale": None if m.scale is None else arr(m.scale),
                "shift": None if m.shift is None else arr(m.shift),
            }
            for m in w.mlps
        ],
        "w_c": arr(w.w_c),
        "b_c": arr(w.b_c),
    }


def weights_from_json(doc: dict) -> TinWeights:
    """Parse and shape-check a weights document; missing fields are errors."""
    try:
        mlps = [
            MlpLayer(
                w1=m["w1"],
                b1=m["b1"],
                w2=m["w2"],
                b2=m["b2"],
                scale=m.get("scale"),
                shift=m.get("shift"),
            )
            for m in doc["mlps"]
        ]
        return TinWeights(
            n_labels=int(doc["n_labels"]),
            d_h=int(doc["d_h"]),
            d_v=int(doc["d_v"]),
            k=int(doc["k"]),
            w_d=doc["w_d"],
            w_p=doc["w_p"],
            b_h=doc["b_h"],
            mlps=mlps,
            w_c=doc["w_c"],
            b_c=doc["b_c"],
            pool_mode=doc.get("pool_mode", "sum"),
            norm_mode=doc.get("norm_mode", "off"),
        )
    except KeyError as exc:
        raise ValueError(f"weights document is missing field {exc}") from None
