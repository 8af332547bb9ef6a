"""Self-checks for the loss kernels: gradient verification plus invariants.

Backs the ``loss-check`` CLI subcommand.  The test suite carries its own
independent finite-difference oracle; this module exists so deployments can
verify kernels in place.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .losses import (
    LinearMap,
    LossParams,
    hybrid_loss,
    l2_normalize_rows,
    nt_xent,
    pairwise_distance_correlation,
    siglip_loss,
)

EPS = 1e-5
TOL = 1e-5

N_CHOICES = (2, 4, 8)
D_CHOICES = (4, 8)


@dataclass
class CheckResult:
    name: str
    max_error: float
    passed: bool

    def line(self) -> str:
        mark = "ok " if self.passed else "FAIL"
        return f"[{mark}] {self.name}: max err {self.max_error:.3e}"


def central_difference(f: Callable[[np.ndarray], float], x: np.ndarray) -> np.ndarray:
    grad = np.zeros_like(x, dtype=np.float64)
    flat = grad.reshape(-1)
    base = x.copy().reshape(-1)
    for k in range(base.size):
        keep = base[k]
        base[k] = keep + EPS
        hi = f(base.reshape(x.shape))
        base[k] = keep - EPS
        lo = f(base.reshape(x.shape))
        base[k] = keep
        flat[k] = (hi - lo) / (2.0 * EPS)
    return grad


def rel_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(numeric)))
    return float(np.max(np.abs(analytic - numeric) / denom))


def _shapes(seed: int) -> tuple[int, int]:
    return N_CHOICES[seed % len(N_CHOICES)], D_CHOICES[seed % len(D_CHOICES)]


def check_nt_xent(seed: int) -> float:
    n, d = _shapes(seed)
    rng = np.random.default_rng(seed)
    v1 = l2_normalize_rows(rng.normal(size=(n, d)))
    v2 = l2_normalize_rows(rng.normal(size=(n, d)))
    res = nt_xent(v1, v2, 0.07)
    fd1 = central_difference(lambda m: nt_xent(m, v2, 0.07).loss, v1)
    fd2 = central_difference(lambda m: nt_xent(v1, m, 0.07).loss, v2)
    return max(rel_error(res.grad_v1, fd1), rel_error(res.grad_v2, fd2))


def check_siglip(seed: int) -> float:
    n, d = _shapes(seed)
    rng = np.random.default_rng(seed + 10_000)
    v = l2_normalize_rows(rng.normal(size=(n, d)))
    t = l2_normalize_rows(rng.normal(size=(n, d)))
    s = float(rng.uniform(0.5, 2.0))
    b = float(rng.normal())
    res = siglip_loss(v, t, s, b)
    errs = [
        rel_error(res.grad_v, central_difference(lambda m: siglip_loss(m, t, s, b).loss, v)),
        rel_error(res.grad_t, central_difference(lambda m: siglip_loss(v, m, s, b).loss, t)),
        rel_error(
            np.array([res.grad_scale]),
            central_difference(
                lambda m: siglip_loss(v, t, float(m[0]), b).loss, np.array([s])
            ),
        ),
        rel_error(
            np.array([res.grad_bias]),
            central_difference(
                lambda m: siglip_loss(v, t, s, float(m[0])).loss, np.array([b])
            ),
        ),
    ]
    return max(errs)


def check_hybrid(seed: int) -> float:
    n, d = _shapes(seed)
    dg = 2 * d
    rng = np.random.default_rng(seed + 20_000)
    v = l2_normalize_rows(rng.normal(size=(n, d)))
    g = rng.normal(size=(n, dg))
    proj = LinearMap(rng.normal(size=(d, dg)), rng.normal(size=d))
    head = LinearMap(rng.normal(size=(1, d)), rng.normal(size=1))
    y = rng.normal(size=n)
    params = LossParams(bias=float(rng.normal()), scale=float(rng.uniform(0.5, 2.0)))

    def loss(v=v, w=proj.weight, pb=proj.bias, hw=head.weight, hb=head.bias) -> float:
        return hybrid_loss(v, g, LinearMap(w, pb), LinearMap(hw, hb), y, params).loss

    res = hybrid_loss(v, g, proj, head, y, params)
    errs = [
        rel_error(res.grad_v, central_difference(lambda m: loss(v=m), v)),
        rel_error(res.grad_proj_weight,
                  central_difference(lambda m: loss(w=m), proj.weight)),
        rel_error(res.grad_proj_bias,
                  central_difference(lambda m: loss(pb=m), proj.bias)),
        rel_error(res.grad_head_weight,
                  central_difference(lambda m: loss(hw=m), head.weight)),
        rel_error(res.grad_head_bias,
                  central_difference(lambda m: loss(hb=m), head.bias)),
    ]
    return max(errs)


def run_gradient_suite(n_seeds: int = 100) -> list[CheckResult]:
    results = []
    for name, fn in (("nt_xent", check_nt_xent), ("siglip_loss", check_siglip),
                     ("hybrid_loss", check_hybrid)):
        worst = max(fn(seed) for seed in range(n_seeds))
        results.append(CheckResult(f"{name} gradients ({n_seeds} seeds)", worst,
                                   worst < TOL))
    return results


def run_property_suite() -> list[CheckResult]:
    rng = np.random.default_rng(12345)
    results = []

    # permutation equivariance of the sigmoid loss
    v = l2_normalize_rows(rng.normal(size=(6, 8)))
    t = l2_normalize_rows(rng.normal(size=(6, 8)))
    perm = rng.permutation(6)
    base = siglip_loss(v, t, 1.3, 0.2).loss
    permuted = siglip_loss(v[perm], t[perm], 1.3, 0.2).loss
    err = abs(base - permuted)
    results.append(CheckResult("siglip permutation invariance", err, err < 1e-12))

    # hybrid loss never drops below its contrastive term
    g = rng.normal(size=(6, 16))
    proj = LinearMap(rng.normal(size=(8, 16)), rng.normal(size=8))
    head = LinearMap(rng.normal(size=(1, 8)), rng.normal(size=1))
    y = rng.normal(size=6)
    res = hybrid_loss(v, g, proj, head, y, LossParams())
    gap = res.siglip_term - res.loss
    results.append(CheckResult("hybrid lower-bounded by siglip term", max(gap, 0.0),
                               gap <= 1e-12))

    # degenerate identity: proj(G)=V and head(v)=y kill the anchors
    ident = LinearMap(np.eye(8), np.zeros(8))
    y_exact = (v @ head.weight.T + head.bias)[:, 0]
    res2 = hybrid_loss(v, v, ident, head, y_exact, LossParams())
    ref = siglip_loss(v, v, 1.0, 0.0).loss
    err = abs(res2.loss - ref)
    results.append(CheckResult("hybrid degenerate identity", err, err < 1e-12))

    # correlation kernel invariants
    a = rng.normal(size=(40, 8))
    rho, r = pairwise_distance_correlation(a, a.copy(), 400, seed=1)
    err = max(abs(rho - 1.0), abs(r - 1.0))
    results.append(CheckResult("distance correlation, identical", err, err < 1e-12))

    q, _ = np.linalg.qr(rng.normal(size=(8, 8)))
    rho, r = pairwise_distance_correlation(a, a @ q, 400, seed=2)
    err = max(abs(rho - 1.0), abs(r - 1.0))
    results.append(CheckResult("distance correlation, rotated", err, err < 1e-9))

    rho1, _ = pairwise_distance_correlation(a, a * 3.7, 400, seed=3)
    results.append(CheckResult("spearman scale invariance", abs(rho1 - 1.0),
                               abs(rho1 - 1.0) < 1e-12))
    return results
