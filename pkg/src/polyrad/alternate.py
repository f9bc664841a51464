"""Rank-1 alternative networks built by keeping a single row of one layer.

``rank1_approx`` zeroes every row but the one with the largest L_q norm.
Swapping that matrix into layer ``r`` gives the alternative net, which
factors as a scalar-output head followed by a scalar-input tail.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .norms import as_exponent, as_matrix, matrix_norm_qp, max_row_index_lq, row_norms, vector_norm
from .polynet import PolyNet, ipow, check_feasibility, forward, forward_prefix, sample_inputs, _check_layer_index

__all__ = [
    "rank1_approx",
    "rank1_residual_closed_form",
    "build_alternative_net",
    "Decomposition",
    "decompose_at",
    "perturbation_lemma_bound",
    "SamplerConfig",
    "empirical_sup_gap",
]


def rank1_approx(W, q, p) -> tuple[np.ndarray, float]:
    """Keep only the largest-L_q row of ``W``; return it with ``||W - W~||_{q,p}``."""
    W = as_matrix(W)
    i = max_row_index_lq(W, q)
    Wt = np.zeros_like(W)
    Wt[i] = W[i]
    return Wt, matrix_norm_qp(W - Wt, q, p)


def rank1_residual_closed_form(W, q, p) -> float:
    """``(||W||_{q,p}^p - ||W||_{q,inf}^p)^(1/p)``; the second-largest row norm when ``p = inf``."""
    W = as_matrix(W)
    p = as_exponent(p)
    norms = row_norms(W, q)
    if p.is_inf:
        if len(norms) < 2:
            return 0.0
        return float(np.sort(norms)[-2])
    pf = float(p.fraction)
    full = matrix_norm_qp(W, q, p)
    top = float(norms.max())
    if full == 0:
        return 0.0
    # ratio form keeps both powers near 1
    diff = 1.0 - (top / full) ** pf
    return full * max(diff, 0.0) ** (1.0 / pf)


def build_alternative_net(net: PolyNet, r: int, q) -> PolyNet:
    """Copy of ``net`` with layer ``r`` replaced by its rank-1 row selection."""
    _check_layer_index(r, net.depth)
    Wt, _ = rank1_approx(net.weights[r - 1], q, 2)
    return net.replace_layer(r, Wt)


@dataclass(frozen=True)
class Decomposition:
    """``x -> tail(head(x))`` reproduces the alternative net at layer ``r``."""

    net: PolyNet
    r: int
    row_index: int
    row: np.ndarray
    row_norm: float
    degenerate: bool

    def head(self, x) -> np.ndarray | float:
        """Scalar ``(b / ||b||_q) . h_{r-1}(x)``; zero when the kept row vanishes."""
        x = np.asarray(x, dtype=float)
        if self.r == 1:
            h = x
        else:
            h = forward_prefix(self.net, self.r - 1, x)
        if self.degenerate:
            return np.zeros(h.shape[:-1]) if h.ndim > 1 else 0.0
        return h @ (self.row / self.row_norm)

    def tail(self, s) -> np.ndarray:
        """``W_d s(... s_r(||b||_q a s) ...)`` for scalar (or 1-D batch) ``s``."""
        s = np.asarray(s, dtype=float)
        single = s.ndim == 0
        S = np.atleast_1d(s)
        h_dim = self.net.weights[self.r - 1].shape[0]
        z = np.zeros((S.shape[0], h_dim))
        z[:, self.row_index] = self.row_norm * S
        ws = self.net.weights
        if self.r == self.net.depth:
            out = z
        else:
            h = ipow(z, self.net.k)
            for W in ws[self.r : -1]:
                h = ipow(h @ W.T, self.net.k)
            out = h @ ws[-1].T
        return out[0] if single else out

    def __call__(self, x):
        return self.tail(self.head(x))


def decompose_at(net: PolyNet, r: int, q) -> Decomposition:
    """Split the layer-``r`` alternative net into head and tail maps."""
    _check_layer_index(r, net.depth)
    W = net.weights[r - 1]
    i = max_row_index_lq(W, q)
    b = np.array(W[i], dtype=float)
    nb = float(vector_norm(b, q))
    return Decomposition(net, r, i, b, nb, nb == 0.0)


def perturbation_lemma_bound(net: PolyNet, r: int, B: float, q, p, denominator: str = "q_inf") -> float:
    """``B prod_j ||W_j||_{q,p} ||W_r - W~_r||_{q,p} / ||W_r||_{q,den}``.

    ``denominator="q_inf"`` is the displayed (weaker) form; ``"q_p"`` is the
    tighter intermediate one.  A zero layer gives zero.
    """
    _check_layer_index(r, net.depth)
    norms = net.layer_norms(q, p)
    W = net.weights[r - 1]
    _, resid = rank1_approx(W, q, p)
    if denominator == "q_inf":
        den = matrix_norm_qp(W, q, math.inf)
    elif denominator == "q_p":
        den = norms[r - 1]
    else:
        raise ValueError(f"unknown denominator {denominator!r}")
    if den == 0:
        return 0.0
    return float(B * np.prod(norms) * resid / den)


@dataclass(frozen=True)
class SamplerConfig:
    """Inputs for the sampled supremum; half of the points sit on the sphere."""

    B: float
    q: object
    n_samples: int = 10_000
    seed: int = 0
    boundary_prob: float = 0.5
    batch_size: int = 4096
    workers: int = 1


def _gap_batch(net, alt, p, cfg: SamplerConfig, n: int, seed_seq) -> tuple[float, np.ndarray]:
    X = sample_inputs(n, net.input_dim, p, cfg.B, np.random.default_rng(seed_seq), cfg.boundary_prob)
    diff = forward(net, X) - forward(alt, X)
    gaps = vector_norm(diff, p)
    i = int(np.argmax(gaps))
    return float(gaps[i]), X[i]


def empirical_sup_gap(net: PolyNet, alt: PolyNet, p, cfg: SamplerConfig) -> tuple[float, np.ndarray]:
    """Largest sampled ``||N(x) - N~(x)||_p`` over the L_p ball of radius ``B``.

    Both nets must pass the feasibility check.  Batches draw from
    independent child seeds and are reduced in batch order, so the result
    does not depend on ``workers``.
    """
    p = as_exponent(p)
    if net.dims != alt.dims or net.k != alt.k:
        raise ValueError("net and alt must share architecture and degree")
    differing = [i for i, (a, b) in enumerate(zip(net.weights, alt.weights)) if not np.array_equal(a, b)]
    if len(differing) > 1:
        raise ValueError(f"nets differ in {len(differing)} layers; expected at most one")
    for name, candidate in (("net", net), ("alt", alt)):
        if not check_feasibility(candidate, cfg.B, cfg.q, p).passed:
            raise ValueError(f"{name} violates the layer-wise feasibility condition")
    sizes = [cfg.batch_size] * (cfg.n_samples // cfg.batch_size)
    if cfg.n_samples % cfg.batch_size:
        sizes.append(cfg.n_samples % cfg.batch_size)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    jobs = list(zip(sizes, seeds))
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(lambda job: _gap_batch(net, alt, p, cfg, *job), jobs))
    else:
        results = [_gap_batch(net, alt, p, cfg, *job) for job in jobs]
    best = max(range(len(results)), key=lambda i: results[i][0])
    return results[best]
