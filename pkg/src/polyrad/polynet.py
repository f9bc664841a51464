"""Polynomial networks ``x -> W_d s(W_{d-1} ... s(W_1 x))`` with ``s(z) = z**k``.

The activation follows every layer except the last.  This module holds the
network and hypothesis-class containers, evaluation, norm-radius
propagation, the layer-wise feasibility check and seeded samplers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .norms import Exponent, as_exponent, as_matrix, dual_exponent, matrix_norm_qp, vector_norm

__all__ = [
    "PolyNet",
    "ClassSpec",
    "LayerCheck",
    "FeasibilityReport",
    "constraint_threshold",
    "forward",
    "forward_prefix",
    "forward_suffix",
    "forward_trace",
    "propagate_norm_bound",
    "check_feasibility",
    "sample_feasible_net",
    "sample_inputs",
]


def constraint_threshold(k: int) -> float:
    """Largest ``|z|`` with ``k |z|^(k-1) <= 1``, i.e. ``(1/k)^(1/(k-1))``."""
    if int(k) != k or k < 2:
        raise ValueError(f"degree k must be an integer >= 2, got {k!r}")
    k = int(k)
    if k == 2:
        return 0.5
    return (1.0 / k) ** (1.0 / (k - 1))


def ipow(z: np.ndarray, k: int) -> np.ndarray:
    """``z**k`` for integer ``k >= 1`` by repeated squaring.

    ``np.power`` falls back to libm ``pow`` for odd exponents, which is
    several times slower on small magnitudes.
    """
    result = None
    base = z
    while k:
        if k & 1:
            result = base if result is None else result * base
        k >>= 1
        if k:
            base = base * base
    return result


def _readonly(W) -> np.ndarray:
    W = np.array(as_matrix(W), dtype=float, copy=True)
    W.setflags(write=False)
    return W


@dataclass(frozen=True)
class PolyNet:
    """Ordered weight matrices plus the integer activation degree."""

    weights: tuple
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise ValueError(f"degree k must be an integer >= 2, got {self.k!r}")
        ws = tuple(_readonly(W) for W in self.weights)
        if not ws:
            raise ValueError("a network needs at least one layer")
        for i in range(len(ws) - 1):
            if ws[i].shape[0] != ws[i + 1].shape[1]:
                raise ValueError(
                    f"layer {i + 1} has {ws[i].shape[0]} rows but layer {i + 2} "
                    f"expects {ws[i + 1].shape[1]} inputs"
                )
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "k", int(self.k))

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def dims(self) -> tuple:
        return (self.weights[0].shape[1],) + tuple(W.shape[0] for W in self.weights)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[1]

    def replace_layer(self, r: int, W) -> "PolyNet":
        """Copy with layer ``r`` (1-based) swapped for ``W``."""
        _check_layer_index(r, self.depth)
        ws = list(self.weights)
        ws[r - 1] = W
        return PolyNet(tuple(ws), self.k)

    def layer_norms(self, q, p) -> np.ndarray:
        return np.array([matrix_norm_qp(W, q, p) for W in self.weights])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyNet):
            return NotImplemented
        return (
            self.k == other.k
            and self.depth == other.depth
            and all(
                a.shape == b.shape and np.array_equal(a, b)
                for a, b in zip(self.weights, other.weights)
            )
        )

    __hash__ = None


@dataclass(frozen=True)
class ClassSpec:
    """Norm-constrained class of depth-``d`` polynomial networks.

    ``dims`` lists layer sizes ``(n_0, n_1, ..., n_d)``; ``budgets`` holds
    ``M(1..d)``.  ``q`` and ``p`` must be dual.  ``gamma`` is the optional
    lower bound on ``prod_j ||W_j||_{q,inf}``.
    """

    dims: tuple
    k: int
    q: Exponent
    p: Exponent
    B: float
    budgets: tuple
    gamma: float | None = None

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if len(dims) < 2 or min(dims) < 1:
            raise ValueError(f"dims must list at least two positive sizes, got {self.dims!r}")
        if int(self.k) != self.k or self.k < 2:
            raise ValueError(f"degree k must be an integer >= 2, got {self.k!r}")
        q, p = as_exponent(self.q), as_exponent(self.p)
        if dual_exponent(p) != q:
            raise ValueError(f"q={q} and p={p} are not dual exponents")
        if not (self.B >= 0 and np.isfinite(self.B)):
            raise ValueError(f"input radius B must be finite and >= 0, got {self.B!r}")
        budgets = tuple(float(m) for m in self.budgets)
        if len(budgets) != len(dims) - 1:
            raise ValueError(f"need {len(dims) - 1} budgets, got {len(budgets)}")
        if any(not (m >= 0 and np.isfinite(m)) for m in budgets):
            raise ValueError("budgets must be finite and nonnegative")
        if self.gamma is not None:
            if not self.gamma > 0:
                raise ValueError(f"Gamma must be positive, got {self.gamma!r}")
            if self.gamma > float(np.prod(budgets)) * (1 + 1e-12):
                raise ValueError(
                    f"Gamma={self.gamma} exceeds the budget product {float(np.prod(budgets))}"
                )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "B", float(self.B))
        object.__setattr__(self, "budgets", budgets)

    @property
    def depth(self) -> int:
        return len(self.dims) - 1

    @property
    def budget_product(self) -> float:
        return float(np.prod(self.budgets))

    @classmethod
    def canonical(cls, dims, k, q, p, B, gamma=None) -> "ClassSpec":
        """Budgets at the canonical limits: ``M(1) = 1/(2B)``, ``M(j) = 2^(k-1)``."""
        d = len(dims) - 1
        budgets = (1.0 / (2.0 * B),) + (2.0 ** (k - 1),) * (d - 1)
        return cls(tuple(dims), k, q, p, B, budgets, gamma)

    def canonical_violations(self) -> list:
        """Human-readable reasons this spec is not canonical (empty if it is)."""
        out = []
        if self.B <= 0:
            out.append("input radius B must be positive")
        elif self.budgets[0] > 1.0 / (2.0 * self.B) * (1 + 1e-12):
            out.append(f"M(1)={self.budgets[0]} exceeds 1/(2B)={1.0 / (2.0 * self.B)}")
        cap = 2.0 ** (self.k - 1)
        for j, m in enumerate(self.budgets[1:], start=2):
            if m > cap * (1 + 1e-12):
                out.append(f"M({j})={m} exceeds 2^(k-1)={cap}")
        return out

    @property
    def is_canonical(self) -> bool:
        return not self.canonical_violations()

    def with_budgets(self, budgets) -> "ClassSpec":
        return ClassSpec(self.dims, self.k, self.q, self.p, self.B, tuple(budgets), self.gamma)


@dataclass(frozen=True)
class LayerCheck:
    layer: int
    radius_in: float
    layer_norm: float
    product: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class FeasibilityReport:
    layers: tuple
    canonical_first: bool
    canonical_rest: bool
    threshold: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.layers)

    @property
    def canonical(self) -> bool:
        return self.canonical_first and self.canonical_rest


def _check_layer_index(r: int, d: int) -> None:
    if int(r) != r or not 1 <= r <= d:
        raise IndexError(f"layer index must lie in 1..{d}, got {r!r}")


def _as_inputs(net: PolyNet, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.ndim != 2 or X.shape[1] != net.input_dim:
        raise ValueError(f"input dimension {x.shape} does not match network input {net.input_dim}")
    return X, single


def forward(net: PolyNet, x) -> np.ndarray:
    """Network output for ``x`` of shape ``(n,)`` or a batch ``(N, n)``."""
    X, single = _as_inputs(net, x)
    h = X
    for W in net.weights[:-1]:
        h = ipow(h @ W.T, net.k)
    out = h @ net.weights[-1].T
    return out[0] if single else out


def forward_prefix(net: PolyNet, r: int, x) -> np.ndarray:
    """Post-activation state after layer ``r``; the activation is applied even at ``r = d``."""
    _check_layer_index(r, net.depth)
    X, single = _as_inputs(net, x)
    h = X
    for W in net.weights[:r]:
        h = ipow(h @ W.T, net.k)
    return h[0] if single else h


def forward_suffix(net: PolyNet, r: int, h) -> np.ndarray:
    """Evaluate layers ``r+1..d`` on a post-activation state of layer ``r``.

    ``r = 0`` evaluates the whole network; ``r = d`` is only meaningful for
    states that skipped the final activation, so it returns ``h`` unchanged.
    """
    if int(r) != r or not 0 <= r <= net.depth:
        raise IndexError(f"split index must lie in 0..{net.depth}, got {r!r}")
    h = np.asarray(h, dtype=float)
    single = h.ndim == 1
    H = h[None, :] if single else h
    rest = net.weights[r:]
    for W in rest[:-1]:
        H = ipow(H @ W.T, net.k)
    if rest:
        H = H @ rest[-1].T
    return H[0] if single else H


def forward_trace(net: PolyNet, X) -> tuple[list, list]:
    """Pre-activations ``z_1..z_d`` and layer outputs ``h_1..h_d`` for a batch.

    ``h_d`` equals ``z_d`` since the last layer is linear.
    """
    X, _ = _as_inputs(net, X)
    pre, post = [], []
    h = X
    for i, W in enumerate(net.weights):
        z = h @ W.T
        pre.append(z)
        h = ipow(z, net.k) if i < net.depth - 1 else z
        post.append(h)
    return pre, post


def propagate_norm_bound(net_or_norms, B: float, q=None, p=None, k: int | None = None) -> np.ndarray:
    """Certified radii ``B_0..B_d`` of the layer outputs over ``||x||_p <= B``.

    Accepts a :class:`PolyNet` (with ``q``, ``p``), a :class:`ClassSpec`
    (budgets are used as the layer norms), or a plain sequence of layer
    norms together with ``k``.
    """
    if isinstance(net_or_norms, PolyNet):
        if q is None or p is None:
            raise ValueError("q and p are required to propagate through a PolyNet")
        norms = net_or_norms.layer_norms(q, p)
        k = net_or_norms.k
    elif isinstance(net_or_norms, ClassSpec):
        norms = np.asarray(net_or_norms.budgets)
        k = net_or_norms.k
    else:
        norms = np.asarray(net_or_norms, dtype=float)
        if k is None:
            raise ValueError("k is required when passing raw layer norms")
    if B < 0:
        raise ValueError("radius must be nonnegative")
    radii = [float(B)]
    d = len(norms)
    for i, nrm in enumerate(norms):
        prod = radii[-1] * float(nrm)
        radii.append(prod ** k if i < d - 1 else prod)
    return np.array(radii)


def check_feasibility(net: PolyNet, B: float, q, p) -> FeasibilityReport:
    """Layer-wise check ``B_{i-1} ||W_i||_{q,p} <= (1/k)^(1/(k-1))``.

    Comparisons carry a 1e-12 relative slack so nets rescaled exactly onto
    the canonical budgets pass despite last-bit rounding.
    """
    q, p = as_exponent(q), as_exponent(p)
    norms = net.layer_norms(q, p)
    radii = propagate_norm_bound(norms, B, k=net.k)
    thr = constraint_threshold(net.k)
    checks = []
    for i, nrm in enumerate(norms):
        prod = radii[i] * nrm
        checks.append(
            LayerCheck(i + 1, float(radii[i]), float(nrm), float(prod), thr, bool(prod <= thr * (1 + 1e-12)))
        )
    first = bool(B == 0 or norms[0] <= 1.0 / (2.0 * B) * (1 + 1e-12))
    cap = 2.0 ** (net.k - 1)
    rest = bool(all(n <= cap * (1 + 1e-12) for n in norms[1:]))
    return FeasibilityReport(tuple(checks), first, rest, thr)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_feasible_net(spec: ClassSpec, norm_fraction: float = 1.0, seed=None) -> PolyNet:
    """Gaussian weights rescaled so that ``||W_j||_{q,p} = norm_fraction * M(j)``."""
    if not 0 < norm_fraction <= 1:
        raise ValueError(f"norm_fraction must lie in (0, 1], got {norm_fraction!r}")
    if not spec.is_canonical:
        raise ValueError("spec is not canonical: " + "; ".join(spec.canonical_violations()))
    rng = _rng(seed)
    weights = []
    for j in range(spec.depth):
        W = rng.standard_normal((spec.dims[j + 1], spec.dims[j]))
        nrm = matrix_norm_qp(W, spec.q, spec.p)
        if nrm == 0:
            raise ValueError("degenerate draw: zero weight matrix")
        weights.append(W * (norm_fraction * spec.budgets[j] / nrm))
    return PolyNet(tuple(weights), spec.k)


def _unit_sphere_directions(rng, m: int, n: int, p: Exponent) -> np.ndarray:
    if p.is_inf:
        g = rng.uniform(-1.0, 1.0, size=(m, n))
        return g / np.abs(g).max(axis=1, keepdims=True)
    pf = float(p.fraction)
    # generalized Gaussian: |g|^p ~ Gamma(1/p), uniform signs
    mag = rng.gamma(1.0 / pf, 1.0, size=(m, n)) ** (1.0 / pf)
    g = mag * rng.choice([-1.0, 1.0], size=(m, n))
    return g / vector_norm(g, p)[:, None]


def sample_inputs(m: int, n: int, p, B: float, seed=None, boundary_prob: float = 0.0) -> np.ndarray:
    """``m`` points in the L_p ball of radius ``B`` in ``R^n``, shape ``(m, n)``.

    Directions are uniform on the L_p sphere; radii are ``B u^(1/n)``.  With
    ``boundary_prob > 0`` that fraction of points is pushed to radius ``B``.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    if B < 0:
        raise ValueError("radius must be nonnegative")
    p = as_exponent(p)
    rng = _rng(seed)
    dirs = _unit_sphere_directions(rng, m, n, p)
    radius = B * rng.uniform(size=m) ** (1.0 / n)
    if boundary_prob > 0:
        on_sphere = rng.uniform(size=m) < boundary_prob
        radius = np.where(on_sphere, B, radius)
    X = dirs * radius[:, None]
    if B == 0:
        return np.zeros((m, n))
    # pull last-bit overshoots back inside the ball
    nrm = vector_norm(X, p)
    over = nrm > B
    X[over] *= (B / nrm[over])[:, None]
    # the rescale itself can land one ulp outside; shrink until it does not
    nrm = vector_norm(X, p)
    while np.any(nrm > B):
        over = nrm > B
        X[over] *= 1.0 - 2.0**-52
        nrm = vector_norm(X, p)
    return X
