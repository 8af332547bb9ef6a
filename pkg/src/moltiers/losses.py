"""Contrastive / distillation loss kernels with analytic gradients, plus the
embedding-distance correlation analysis.

All kernels operate on dense float64 row-major matrices and never normalize
inputs themselves; callers own normalization.  Pass ``check_normalized=True``
to assert unit rows (debug mode; finite-difference probes perturb rows off
the sphere, so checks stay off by default).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVariance, NotNormalized, ShapeMismatch


@dataclass(frozen=True)
class LossParams:
    temperature: float = 0.07
    bias: float = 0.0
    scale: float = 1.0
    alpha: float = 10.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("loss weights must be >= 0")


@dataclass(frozen=True)
class LinearMap:
    """Dense affine map x -> x @ weight.T + bias."""

    weight: np.ndarray  # (d_out, d_in)
    bias: np.ndarray    # (d_out,)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return x @ self.weight.T + self.bias

    @classmethod
    def zeros(cls, d_out: int, d_in: int) -> "LinearMap":
        return cls(np.zeros((d_out, d_in)), np.zeros(d_out))


def l2_normalize_rows(m: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValueError("cannot normalize a zero row")
    return m / norms


def _as_matrix(m, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeMismatch(f"{name} must be a non-empty 2-D matrix")
    return m


def _require_normalized(m: np.ndarray, name: str) -> None:
    norms = np.linalg.norm(m, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise NotNormalized(f"{name} rows are not unit-norm")


def _softplus(x: np.ndarray) -> np.ndarray:
    # log(1 + exp(x)) without overflow
    return np.log1p(np.exp(-np.abs(x))) + np.maximum(x, 0.0)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass(frozen=True)
class NtXentResult:
    loss: float
    grad_v1: np.ndarray
    grad_v2: np.ndarray


def nt_xent(
    v1,
    v2,
    temperature: float = 0.07,
    include_positive_in_denominator: bool = False,
    check_normalized: bool = False,
) -> NtXentResult:
    """Temperature-scaled contrastive loss between two view batches.

    The positive term exp(v1_i . v2_i / t) is divided by the sum over the
    *other* rows only, so the loss can go negative; set
    ``include_positive_in_denominator=True`` for the conventional variant.
    """
    v1 = _as_matrix(v1, "v1")
    v2 = _as_matrix(v2, "v2")
    if v1.shape != v2.shape:
        raise ShapeMismatch(f"shape mismatch {v1.shape} vs {v2.shape}")
    n = v1.shape[0]
    if n < 2:
        raise ShapeMismatch("need at least two rows")
    if check_normalized:
        _require_normalized(v1, "v1")
        _require_normalized(v2, "v2")
    sim = v1 @ v2.T / temperature
    if include_positive_in_denominator:
        masked = sim
    else:
        masked = sim.copy()
        np.fill_diagonal(masked, -np.inf)
    row_max = masked.max(axis=1, keepdims=True)
    exp = np.exp(masked - row_max)
    denom = exp.sum(axis=1)
    log_denom = row_max[:, 0] + np.log(denom)
    loss = float(np.sum(log_denom - np.diagonal(sim)))

    # softmax over the masked similarities; diagonal stays zero when excluded
    p = exp / denom[:, None]
    g = p.copy()
    idx = np.arange(n)
    g[idx, idx] -= 1.0
    g /= temperature
    return NtXentResult(loss, g @ v2, g.T @ v1)


@dataclass(frozen=True)
class SiglipResult:
    loss: float
    grad_v: np.ndarray
    grad_t: np.ndarray
    grad_scale: float
    grad_bias: float


def siglip_loss(
    v,
    t,
    scale: float = 1.0,
    bias: float = 0.0,
    signed_bias: bool = True,
    check_normalized: bool = False,
) -> SiglipResult:
    """Pairwise sigmoid contrastive loss with signed labels.

    Labels are +1 on the diagonal and -1 elsewhere; each pair contributes
    -log sigmoid(label * (scale * v_i.t_j) + label * bias) / N^2.  With
    ``signed_bias=False`` the bias is added unsigned.
    """
    v = _as_matrix(v, "v")
    t = _as_matrix(t, "t")
    if v.shape != t.shape:
        raise ShapeMismatch(f"shape mismatch {v.shape} vs {t.shape}")
    if check_normalized:
        _require_normalized(v, "v")
        _require_normalized(t, "t")
    n = v.shape[0]
    sim = v @ t.T
    labels = np.full((n, n), -1.0)
    np.fill_diagonal(labels, 1.0)
    if signed_bias:
        z = labels * (scale * sim) + labels * bias
    else:
        z = labels * (scale * sim) + bias
    inv_n2 = 1.0 / (n * n)
    loss = float(np.sum(_softplus(-z)) * inv_n2)

    dz = -_sigmoid(-z) * inv_n2          # d loss / d z
    w = dz * labels * scale              # d loss / d sim
    grad_scale = float(np.sum(dz * labels * sim))
    grad_bias = float(np.sum(dz * labels)) if signed_bias else float(np.sum(dz))
    return SiglipResult(loss, w @ t, w.T @ v, grad_scale, grad_bias)


@dataclass(frozen=True)
class HybridResult:
    loss: float
    siglip_term: float
    align_term: float
    target_term: float
    grad_v: np.ndarray
    grad_proj_weight: np.ndarray
    grad_proj_bias: np.ndarray
    grad_head_weight: np.ndarray
    grad_head_bias: np.ndarray


def hybrid_loss(
    v,
    g,
    proj: LinearMap,
    head: LinearMap,
    y,
    params: LossParams = LossParams(),
    check_normalized: bool = False,
) -> HybridResult:
    """Contrastive alignment to projected teacher rows plus two anchors.

    loss = siglip(v, normalize(proj(g))) + alpha * sum ||proj(g_i) - v_i||^2
           + beta * sum (head(v_i) - y_i)^2
    """
    v = _as_matrix(v, "v")
    g = _as_matrix(g, "g")
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    n, d = v.shape
    if g.shape[0] != n:
        raise ShapeMismatch("teacher batch size differs from student")
    if y.shape[0] != n:
        raise ShapeMismatch("target length differs from batch size")
    if proj.weight.shape != (d, g.shape[1]) or proj.bias.shape != (d,):
        raise ShapeMismatch("projection map has wrong shape")
    if head.weight.shape != (1, d) or head.bias.shape != (1,):
        raise ShapeMismatch("head map has wrong shape")
    if check_normalized:
        _require_normalized(v, "v")

    u = proj(g)                          # (n, d) unnormalised teacher rows
    norms = np.linalg.norm(u, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValueError("projected teacher row has zero norm")
    t = u / norms

    sig = siglip_loss(v, t, params.scale, params.bias)
    diff = u - v
    align = float(np.sum(diff * diff))
    pred = (v @ head.weight.T + head.bias)[:, 0]
    resid = pred - y
    target = float(np.sum(resid * resid))
    loss = sig.loss + params.alpha * align + params.beta * target

    # alignment and head terms
    grad_v = sig.grad_v - 2.0 * params.alpha * diff
    grad_v += 2.0 * params.beta * resid[:, None] * head.weight
    grad_head_w = (2.0 * params.beta * resid @ v).reshape(1, d)
    grad_head_b = np.array([2.0 * params.beta * float(resid.sum())])

    # chain the siglip gradient through row normalization of u
    gt = sig.grad_t
    gu = (gt - t * np.sum(gt * t, axis=1, keepdims=True)) / norms
    gu = gu + 2.0 * params.alpha * diff
    grad_proj_w = gu.T @ g
    grad_proj_b = gu.sum(axis=0)
    return HybridResult(
        loss, sig.loss, align, target,
        grad_v, grad_proj_w, grad_proj_b, grad_head_w, grad_head_b,
    )


def rank_average(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(np.sqrt(np.sum(xc * xc)))
    sy = float(np.sqrt(np.sum(yc * yc)))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateVariance("constant input to correlation")
    return float(np.dot(xc, yc) / (sx * sy))


def spearman(x: np.ndarray, y: np.ndarray) -> float:
    return pearson(rank_average(x), rank_average(y))


def pairwise_distance_correlation(
    a, b, n_pairs: int, seed: int = 0
) -> tuple[float, float]:
    """(Spearman rho, Pearson r) between matched pairwise distances.

    Samples ``n_pairs`` random index pairs (i != j) with a seeded generator,
    measures Euclidean distances in each embedding space, and correlates the
    two distance samples.
    """
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.shape[0] != b.shape[0]:
        raise ShapeMismatch("row counts differ")
    if a.shape[0] < 2:
        raise ShapeMismatch("need at least two rows")
    if n_pairs < 2:
        raise ValueError("n_pairs must be >= 2")
    rng = np.random.default_rng(seed)
    n = a.shape[0]
    left = rng.integers(0, n, size=n_pairs)
    right = rng.integers(0, n, size=n_pairs)
    clash = left == right
    while np.any(clash):
        right[clash] = rng.integers(0, n, size=int(clash.sum()))
        clash = left == right
    da = np.linalg.norm(a[left] - a[right], axis=1)
    db = np.linalg.norm(b[left] - b[right], axis=1)
    if np.ptp(da) == 0.0 or np.ptp(db) == 0.0:
        raise DegenerateVariance("all sampled distances are equal")
    return spearman(da, db), pearson(da, db)


def load_embeddings(path) -> np.ndarray:
    """Read a matrix from .npy or from text with an ``N d`` header line."""
    path = str(path)
    if path.endswith(".npy"):
        m = np.load(path)
        return _as_matrix(m, path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().replace(",", " ").split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected 'N d' header line")
        n, d = int(header[0]), int(header[1])
        data = np.loadtxt(fh, delimiter=None, ndmin=2)
    if data.shape != (n, d):
        raise ShapeMismatch(f"{path}: header says {(n, d)}, data is {data.shape}")
    return data


def save_embeddings(path, matrix: np.ndarray) -> None:
    matrix = _as_matrix(matrix, "matrix")
    path = str(path)
    if path.endswith(".npy"):
        np.save(path, matrix)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{matrix.shape[0]} {matrix.shape[1]}\n")
        for row in matrix:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")
