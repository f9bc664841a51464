"""Monte Carlo estimates of empirical Rademacher complexity.

For each sampled sign vector ``eps`` the inner problem

    sup  (1/m) sum_i eps_i N(x_i)   over  ||W_j||_{q,p} <= M(j)

is attacked by multi-restart ascent with radial retraction onto the budget
balls.  Any feasible point is a lower bound on the supremum, so the
estimate is one-sided: it can only undershoot the true complexity.

Two oracles keep the optimizer honest: the closed form for one linear
layer and an exhaustive grid for classes with at most three weights.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .norms import dual_exponent, holder_extremal, matrix_norm_qp, row_norms, vector_norm
from .polynet import ClassSpec, PolyNet, ipow

__all__ = [
    "OptimizerConfig",
    "EstimateResult",
    "BruteForceResult",
    "net_gradient",
    "batched_objective",
    "maximize_signs",
    "estimate",
    "draw_signs",
    "one_layer_closed_form",
    "brute_force_sup",
]


@dataclass(frozen=True)
class OptimizerConfig:
    steps: int = 500
    step_size: float = 0.05
    restarts: int = 8
    seed: int = 0
    grow: float = 2.0
    shrink: float = 0.5

    def __post_init__(self):
        if self.steps < 1 or self.restarts < 1:
            raise ValueError("steps and restarts must be >= 1")
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if not (self.grow >= 1.0 and 0 < self.shrink < 1):
            raise ValueError("need grow >= 1 and 0 < shrink < 1")


@dataclass
class EstimateResult:
    per_draw_sup: np.ndarray
    mean: float
    stderr: float
    draws: int
    signs: np.ndarray
    restarts: int
    iterations: int
    trace: np.ndarray = field(repr=False, default=None)
    notes: list = field(default_factory=list)

    @property
    def lower_estimate(self) -> float:
        """``mean - 3 stderr``, the value compared against upper bounds."""
        return self.mean - 3.0 * self.stderr


@dataclass
class BruteForceResult:
    value: float
    weights: list
    cell_bound: float
    n_candidates: int


# -- batched forward / reverse pass ------------------------------------------------


def _flush(a, tiny=1e-100):
    # keeps powers of vanishing units out of the (very slow) subnormal range
    return np.where(np.abs(a) < tiny, 0.0, a)


def _forward_backward(weights, X, signs, k, need_grad=True):
    """Objective ``(1/m) sum_i eps_i N(x_i)`` for a stack of ``S`` nets.

    ``weights[j]`` has shape ``(S, h_j, n_j)``, ``X`` is ``(m, n_0)`` and
    ``signs`` is ``(S, m)`` or ``(m,)``.  Returns ``f`` of shape ``(S,)`` and,
    if requested, the per-layer gradients with the shapes of ``weights``.
    """
    m = X.shape[0]
    d = len(weights)
    acts = [X]
    pres = []
    h = X
    for j, W in enumerate(weights):
        z = np.matmul(h, np.swapaxes(W, -1, -2))  # (S, m, h_j)
        if j < d - 1:
            z = _flush(z, 10.0 ** (-250.0 / k))
        pres.append(z)
        h = ipow(z, k) if j < d - 1 else z
        acts.append(h)
    out = h[..., 0]  # (S, m)
    eps = np.asarray(signs, dtype=float)
    f = np.sum(out * eps, axis=-1) / m
    if not need_grad:
        return f, None
    delta = np.broadcast_to(eps / m, out.shape)[..., None]  # d f / d z_d
    grads = [None] * d
    for j in range(d - 1, -1, -1):
        a_prev = acts[j]
        grads[j] = np.matmul(np.swapaxes(delta, -1, -2), a_prev)
        if j > 0:
            back = np.matmul(delta, weights[j])  # d f / d a_{j}
            z = pres[j - 1]
            delta = _flush(back * (k * ipow(z, k - 1)))
    return f, grads


def batched_objective(weights, X, signs, k) -> np.ndarray:
    f, _ = _forward_backward(weights, np.asarray(X, dtype=float), signs, k, need_grad=False)
    return f


def net_gradient(net: PolyNet, x) -> list:
    """Gradients of the scalar output ``N(x)`` with respect to every weight matrix."""
    if net.dims[-1] != 1:
        raise ValueError(f"net_gradient needs a scalar-output net, output width is {net.dims[-1]}")
    x = np.asarray(x, dtype=float)
    if x.shape != (net.input_dim,):
        raise ValueError(f"input must have shape ({net.input_dim},), got {x.shape}")
    weights = [W[None] for W in net.weights]
    _, grads = _forward_backward(weights, x[None, :], np.ones((1, 1)), net.k)
    return [g[0] for g in grads]


# -- ascent -----------------------------------------------------------------------


def _steepest_direction(G, q, p):
    """Unit-``||.||_{q,p}`` direction maximising ``<G, D>`` for each stacked matrix."""
    qd = dual_exponent(q)
    rows = row_norms(G, qd)  # (S, h)
    t = holder_extremal(rows, p)
    u = holder_extremal(G, q)
    return t[..., None] * u


def _retract(W, budget, q, p):
    if budget == 0:
        return np.zeros_like(W)
    nrm = matrix_norm_qp(W, q, p)
    nrm = np.atleast_1d(nrm)
    scale = np.where(nrm > budget, budget / np.where(nrm > 0, nrm, 1.0), 1.0)
    W = W * scale[:, None, None]
    # flush entries far below the budget: they cannot move the objective and
    # subnormal arithmetic is orders of magnitude slower
    return np.where(np.abs(W) < 1e-60 * budget, 0.0, W)


def _init_weights(rngs, spec: ClassSpec, restarts: int):
    """Gaussian restarts rescaled onto each budget sphere; ``rngs`` yields one stream per draw."""
    layers = [[] for _ in range(spec.depth)]
    for rng in rngs:
        for _ in range(restarts):
            for j in range(spec.depth):
                W = rng.standard_normal((spec.dims[j + 1], spec.dims[j]))
                nrm = matrix_norm_qp(W, spec.q, spec.p)
                layers[j].append(W * (spec.budgets[j] / nrm) if nrm > 0 else W * 0.0)
    return [np.stack(ws) for ws in layers]


def _ascend(spec: ClassSpec, X, signs, weights, opt: OptimizerConfig):
    """Accept-if-better ascent on ``|f|`` with per-run adaptive step sizes.

    Steps move along the dual-norm steepest direction of each layer, scaled by
    that layer's budget; candidates are pulled back by radial rescaling.
    Returns the final weights, their objective values and the mean trace.
    """
    k, q, p = spec.k, spec.q, spec.p
    f, grads = _forward_backward(weights, X, signs, k)
    obj = np.abs(f)
    S = obj.shape[0]
    eta = np.full(S, opt.step_size)
    trace = np.empty(opt.steps + 1)
    trace[0] = obj.mean()
    for t in range(opt.steps):
        sgn = np.sign(f)[:, None, None]
        cand = []
        for j, (W, G) in enumerate(zip(weights, grads)):
            D = _steepest_direction(sgn * G, q, p)
            step = (eta * spec.budgets[j])[:, None, None]
            cand.append(_retract(W + step * D, spec.budgets[j], q, p))
        f_c, grads_c = _forward_backward(cand, X, signs, k)
        obj_c = np.abs(f_c)
        acc = obj_c > obj
        a3 = acc[:, None, None]
        weights = [np.where(a3, Wc, W) for Wc, W in zip(cand, weights)]
        grads = [np.where(a3, Gc, G) for Gc, G in zip(grads_c, grads)]
        f = np.where(acc, f_c, f)
        obj = np.where(acc, obj_c, obj)
        # relative steps below 1e-14 only move weights at rounding level
        eta = np.clip(np.where(acc, eta * opt.grow, eta * opt.shrink), 1e-14, 1e12)
        trace[t + 1] = obj.mean()
    return weights, obj, trace


def maximize_signs(spec: ClassSpec, xs, signs, opt: OptimizerConfig, rngs=None):
    """Best ``|objective|`` found for each row of ``signs`` (shape ``(D, m)``).

    ``rngs`` supplies one generator per row for the restart initialisations;
    by default row ``i`` uses the stream seeded by ``(opt.seed, i)``.
    Returns ``(values, best_weights, trace)``.
    """
    X = np.asarray(xs, dtype=float)
    signs = np.atleast_2d(np.asarray(signs, dtype=float))
    D = signs.shape[0]
    if rngs is None:
        rngs = [_draw_rng(opt.seed, i) for i in range(D)]
    R = opt.restarts
    weights = _init_weights(rngs, spec, R)
    rep_signs = np.repeat(signs, R, axis=0)
    weights, obj, trace = _ascend(spec, X, rep_signs, weights, opt)
    obj = obj.reshape(D, R)
    best = np.argmax(obj, axis=1)
    values = np.maximum(obj[np.arange(D), best], 0.0)
    flat = np.arange(D) * R + best
    best_weights = [W[flat] for W in weights]
    return values, best_weights, trace


def _draw_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def draw_signs(rng: np.random.Generator, m: int) -> np.ndarray:
    return rng.choice(np.array([-1.0, 1.0]), size=m)


def _validate(spec: ClassSpec, X: np.ndarray, require_canonical: bool):
    if X.ndim != 2 or X.shape[1] != spec.dims[0]:
        raise ValueError(f"inputs of shape {X.shape} do not match input dimension {spec.dims[0]}")
    if spec.dims[-1] != 1:
        raise ValueError("the estimator needs a scalar-output class (last dim 1)")
    norms = vector_norm(X, spec.p)
    if np.any(norms > spec.B * (1 + 1e-12)):
        raise ValueError(f"inputs leave the L_{spec.p} ball of radius {spec.B}")
    # one linear layer has no activation to keep in the contraction domain
    if require_canonical and spec.depth > 1 and not spec.is_canonical:
        raise ValueError(
            "the estimator targets the canonical class: " + "; ".join(spec.canonical_violations())
        )


def estimate(
    spec: ClassSpec,
    xs,
    draws: int = 200,
    opt: OptimizerConfig | None = None,
    chunk: int = 64,
    workers: int = 1,
    require_canonical: bool = True,
) -> EstimateResult:
    """Monte Carlo lower estimate of the empirical Rademacher complexity.

    Draw ``i`` uses its own generator seeded by ``(opt.seed, i)`` for both its
    sign vector and its restarts, so results do not depend on ``chunk`` or
    ``workers``.
    """
    opt = opt or OptimizerConfig()
    if draws < 1:
        raise ValueError("draws must be >= 1")
    X = np.asarray(xs, dtype=float)
    _validate(spec, X, require_canonical)
    m = X.shape[0]

    rngs = [_draw_rng(opt.seed, i) for i in range(draws)]
    signs = np.stack([draw_signs(rng, m) for rng in rngs])

    def run(lo):
        hi = min(lo + chunk, draws)
        vals, _, trace = maximize_signs(spec, X, signs[lo:hi], opt, rngs[lo:hi])
        return vals, trace * (hi - lo)

    starts = list(range(0, draws, chunk))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(lo) for lo in starts]
    sups = np.concatenate([v for v, _ in parts])
    trace = sum(t for _, t in parts) / draws
    mean = float(sups.mean())
    stderr = float(sups.std(ddof=1) / math.sqrt(draws)) if draws > 1 else 0.0
    notes = []
    if spec.q == 1 and spec.p.is_inf:
        notes.append(
            "q=1, p=inf: the contraction step assumes a 1-Lipschitz positive-homogeneous "
            "activation, which z^k is only on the feasible domain"
        )
    return EstimateResult(sups, mean, stderr, draws, signs, opt.restarts, opt.steps, trace, notes)


def one_layer_closed_form(xs, eps, M: float, p) -> float:
    """``(M/m) ||sum_i eps_i x_i||_p``: the exact supremum for one linear layer."""
    X = np.atleast_2d(np.asarray(xs, dtype=float))
    eps = np.asarray(eps, dtype=float)
    if eps.shape != (X.shape[0],):
        raise ValueError("need one sign per input point")
    v = eps @ X
    return float(M * vector_norm(v, p) / X.shape[0])


# -- grid oracle ------------------------------------------------------------------


class _LayerGrid:
    """Enumerates candidate matrices for one layer of a tiny class.

    A single weight uses ``linspace(-M, M, G)`` directly.  Larger layers use
    the feasible points of the box grid plus every nonzero box point pushed
    radially onto the budget sphere.
    """

    def __init__(self, shape, budget, q, p, G):
        self.shape = shape
        self.budget = budget
        self.q, self.p = q, p
        self.size = shape[0] * shape[1]
        self.axis = np.linspace(-budget, budget, G)
        self.G = G
        self.box = G**self.size
        self.count = G if self.size == 1 else 2 * self.box
        self.spacing = 2.0 * budget / (G - 1)

    def take(self, idx):
        if self.size == 1:
            W = self.axis[idx].reshape(-1, 1, 1)
            return W, np.ones(len(idx), dtype=bool)
        projected = idx >= self.box
        coords = np.stack(np.unravel_index(idx % self.box, (self.G,) * self.size), axis=-1)
        W = self.axis[coords].reshape((-1,) + self.shape)
        nrm = np.atleast_1d(matrix_norm_qp(W, self.q, self.p))
        valid = np.where(projected, nrm > 0, nrm <= self.budget * (1 + 1e-12))
        scale = np.where(projected & (nrm > 0), self.budget / np.where(nrm > 0, nrm, 1.0), 1.0)
        return W * scale[:, None, None], valid


def brute_force_sup(spec: ClassSpec, eps, xs, grid_points: int = 201, chunk: int = 1 << 17) -> BruteForceResult:
    """Exhaustive grid maximum of ``(1/m) sum_i eps_i N(x_i)`` for classes with at most 3 weights.

    Every grid candidate is feasible, so the value never exceeds the true
    supremum.  ``cell_bound`` estimates the grid's shortfall from the gradient
    at the best candidate times half a cell diagonal.
    """
    n_weights = sum(spec.dims[j] * spec.dims[j + 1] for j in range(spec.depth))
    if n_weights > 3:
        raise ValueError(f"class has {n_weights} weights; the grid oracle handles at most 3")
    if grid_points < 101:
        raise ValueError("grid_points must be >= 101")
    if spec.dims[-1] != 1:
        raise ValueError("the grid oracle needs a scalar-output class")
    X = np.atleast_2d(np.asarray(xs, dtype=float))
    eps = np.asarray(eps, dtype=float)
    grids = [
        _LayerGrid((spec.dims[j + 1], spec.dims[j]), spec.budgets[j], spec.q, spec.p, grid_points)
        for j in range(spec.depth)
    ]
    counts = [g.count for g in grids]
    total = int(np.prod(counts))
    best_val, best_w = -math.inf, None
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total))
        parts = np.unravel_index(idx, counts)
        weights, valid = [], np.ones(len(idx), dtype=bool)
        for g, part in zip(grids, parts):
            W, ok = g.take(part)
            weights.append(W)
            valid &= ok
        f = batched_objective(weights, X, eps, spec.k)
        f = np.where(valid, f, -math.inf)
        i = int(np.argmax(f))
        if f[i] > best_val:
            best_val = float(f[i])
            best_w = [W[i].copy() for W in weights]
    _, grads = _forward_backward([W[None] for W in best_w], X, eps, spec.k)
    gnorm = math.sqrt(sum(float(np.sum(g**2)) for g in grads))
    half_diag = 0.5 * math.sqrt(sum(g.size * g.spacing**2 for g in grids))
    return BruteForceResult(best_val, best_w, gnorm * half_diag, total)
