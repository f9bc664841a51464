"""Closed-form Rademacher-complexity bounds for polynomial networks.

Every bound returns a :class:`BoundReport` (or a float for the small
helpers) carrying the inputs and the universal constant ``c`` it was
evaluated with.  Logarithms are natural.  ``p = inf`` is handled through
explicit limit branches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .norms import Exponent, as_exponent, matrix_norm_qp, vector_norm
from .polynet import PolyNet, constraint_threshold

__all__ = [
    "BoundReport",
    "INEQUALITY_A_THRESHOLD",
    "constraint_threshold",
    "logbar",
    "depth_dependent_bound",
    "depth_independent_bound",
    "depth_independent_crossover",
    "perturbation_bound",
    "min_ratio_bound",
    "composition_bound",
    "r_dependent_bound",
    "prior_bound_exponential",
    "prior_bound_spectral",
    "gamma_of_net",
]

# positive root of exp(z) - 1 = 2 z; below it exp(z) - 1 <= 2 z
INEQUALITY_A_THRESHOLD = brentq(lambda z: math.expm1(z) - 2.0 * z, 0.5, 2.0, xtol=1e-15)


@dataclass
class BoundReport:
    name: str
    value: float
    inputs: dict
    constant_c: float = 1.0
    flags: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "inputs": _jsonable(self.inputs),
            "constant_c": self.constant_c,
            "validity_flags": _jsonable(self.flags),
            "details": _jsonable(self.details),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Exponent):
        return str(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    return obj


# products of the same norms computed in a different order can differ by ulps
_GAMMA_RTOL = 1e-12


def _check_gamma(Mprod: float, Gamma: float) -> float:
    """Validate ``0 < Gamma <= Mprod`` and clamp rounding-level excess to ``Mprod``."""
    if not Gamma > 0:
        raise ValueError("Gamma must be positive")
    if Gamma > Mprod * (1 + _GAMMA_RTOL):
        raise ValueError(f"Gamma={Gamma} exceeds Mprod={Mprod}")
    return min(Gamma, Mprod)


def logbar(z: float) -> float:
    """``max(1, ln z)``."""
    if z <= 0:
        raise ValueError(f"logbar needs a positive argument, got {z!r}")
    return max(1.0, math.log(z))


def _power_root(x: float, p: Exponent) -> float:
    """``x^(1/p)`` for ``x >= 0``, with the ``p = inf`` limit (1 if x > 0 else 0)."""
    if x < 0:
        raise ValueError("root of a negative number")
    if p.is_inf:
        return 1.0 if x > 0 else 0.0
    return x ** (1.0 / float(p.fraction))


def depth_dependent_bound(budgets: Sequence[float], xs, p, d: int | None = None, m: int | None = None) -> BoundReport:
    """Depth-dependent bound ``(prod M / m)(sqrt(2 d ln 2) sqrt(sum ||x_i||_p^2) + (sum ||x_i||_p^p)^(1/p))``.

    For ``p = inf`` the second term is ``max_i ||x_i||_inf``.
    """
    p = as_exponent(p)
    X = np.atleast_2d(np.asarray(xs, dtype=float))
    if X.size == 0:
        raise ValueError("depth_dependent_bound needs at least one input point")
    budgets = np.asarray(budgets, dtype=float)
    d = len(budgets) if d is None else int(d)
    m = X.shape[0] if m is None else int(m)
    if m != X.shape[0]:
        raise ValueError(f"m={m} does not match the {X.shape[0]} supplied inputs")
    mprod = float(np.prod(budgets))
    r = vector_norm(X, p)
    sq = math.sqrt(float(np.sum(r**2)))
    if p.is_inf:
        lp = float(np.max(r))
    else:
        lp = float(vector_norm(r, p))
    value = mprod / m * (math.sqrt(2.0 * d * math.log(2.0)) * sq + lp)
    return BoundReport(
        "depth_dependent",
        value,
        {"budgets": budgets.tolist(), "Mprod": mprod, "p": p, "d": d, "m": m},
        flags={"nonnegative": value >= 0},
        details={"sum_sq_norms_sqrt": sq, "lp_of_norms": lp},
    )


def _independent_branches(B, Mprod, Gamma, gamma_loss, m, d):
    term_free = logbar(m) ** 0.75 * math.sqrt(logbar(Mprod / Gamma)) / m**0.25
    term_sqrt = math.sqrt(d / m)
    return term_free, term_sqrt


def depth_independent_bound(
    B: float, Mprod: float, Gamma: float, gamma_loss: float, m: int, d: int, c: float = 1.0
) -> BoundReport:
    """``c (B M / gamma) min(logbar(m)^(3/4) sqrt(logbar(M/Gamma)) / m^(1/4), sqrt(d/m))``."""
    Gamma = _check_gamma(Mprod, Gamma)
    if m <= 1:
        raise ValueError("m must exceed 1")
    term_free, term_sqrt = _independent_branches(B, Mprod, Gamma, gamma_loss, m, d)
    scale = c * B * Mprod / gamma_loss
    branch = "depth_free" if term_free < term_sqrt else "sqrt_d_over_m"
    value = scale * min(term_free, term_sqrt)
    return BoundReport(
        "depth_independent",
        value,
        {"B": B, "Mprod": Mprod, "Gamma": Gamma, "gamma": gamma_loss, "m": m, "d": d},
        c,
        flags={"gamma_at_least_one": Gamma >= 1},
        details={
            "branch": branch,
            "depth_free_term": scale * term_free,
            "sqrt_d_over_m_term": scale * term_sqrt,
        },
    )


def depth_independent_crossover(Mprod: float, Gamma: float, m: int) -> float:
    """Real depth where ``sqrt(d/m)`` meets the depth-free branch."""
    term_free = logbar(m) ** 0.75 * math.sqrt(logbar(Mprod / Gamma)) / m**0.25
    return m * term_free**2


def perturbation_bound(
    B: float,
    prod_qp: float,
    p,
    Mprod: float,
    Gamma: float,
    r: int,
    mode: str = "paper",
) -> BoundReport:
    """Bound on ``sup_x ||N(x) - N~(x)||_p`` after a rank-1 swap.

    ``mode="paper"`` gives ``B P (2 p ln(M/Gamma) / r)^(1/p)``;
    ``mode="exact"`` gives ``B P ((M/Gamma)^(p/r) - 1)^(1/p)``.  The
    ``inequality_a_domain`` flag records whether
    ``z = (p/r) ln(M/Gamma)`` is small enough for ``e^z - 1 <= 2z``.
    """
    p = as_exponent(p)
    Gamma = _check_gamma(Mprod, Gamma)
    if int(r) != r or r < 1:
        raise ValueError("r must be a positive integer")
    if mode not in ("paper", "exact"):
        raise ValueError(f"unknown mode {mode!r}")
    log_ratio = math.log(Mprod / Gamma)
    if p.is_inf:
        z = math.inf if log_ratio > 0 else 0.0
        if mode == "paper":
            factor = 1.0 if log_ratio > 0 else 0.0
        else:
            # ((M/G)^(p/r) - 1)^(1/p) -> (M/G)^(1/r)
            factor = math.exp(log_ratio / r) if log_ratio > 0 else 0.0
    else:
        pf = float(p.fraction)
        z = pf / r * log_ratio
        if mode == "paper":
            factor = (2.0 * z) ** (1.0 / pf)
        else:
            factor = math.expm1(z) ** (1.0 / pf)
    value = B * prod_qp * factor
    in_domain = bool(z <= INEQUALITY_A_THRESHOLD)
    return BoundReport(
        f"perturbation_{mode}",
        value,
        {"B": B, "prod_qp": prod_qp, "p": p, "Mprod": Mprod, "Gamma": Gamma, "r": r, "mode": mode},
        flags={"inequality_a_domain": in_domain, "exact_le_log_form_expected": in_domain},
        details={"z": z, "factor": factor},
    )


def min_ratio_bound(Mprod: float, Gamma: float, r: int) -> float:
    """``(M/Gamma)^(1/r)``."""
    Gamma = _check_gamma(Mprod, Gamma)
    if r < 1:
        raise ValueError("r must be >= 1")
    if Mprod == Gamma:
        return 1.0
    return (Mprod / Gamma) ** (1.0 / r)


def composition_bound(L: float, R: float, m: int, rad_H: float, c: float = 1.0) -> BoundReport:
    """``c L (R / sqrt(m) + ln(m)^(3/2) rad_H)``."""
    if m < 1:
        raise ValueError("m must be positive")
    value = c * L * (R / math.sqrt(m) + math.log(m) ** 1.5 * rad_H)
    return BoundReport("composition", value, {"L": L, "R": R, "m": m, "rad_H": rad_H}, c)


def r_dependent_bound(
    B: float,
    budgets: Sequence[float],
    Gamma: float,
    gamma_loss: float,
    m: int,
    rad_prefix: Sequence[float],
    p,
    c: float = 1.0,
) -> BoundReport:
    """Minimum over ``r`` of the three-term bound, with the per-``r`` table.

    Term order per row: prefix complexity normalised by ``B prod_{j<=r} M(j)``,
    ``(ln(prod M / Gamma) / r)^(1/p)`` and ``(1 + sqrt(ln r)) / sqrt(m)``.
    """
    p = as_exponent(p)
    budgets = [float(b) for b in budgets]
    d = len(budgets)
    if len(rad_prefix) != d:
        raise ValueError(f"rad_prefix has {len(rad_prefix)} entries, expected {d}")
    mprod = float(np.prod(budgets))
    Gamma = _check_gamma(mprod, Gamma)
    scale = c * B * mprod / gamma_loss
    log_ratio = math.log(mprod / Gamma)
    rows = []
    for r in range(1, d + 1):
        rad = float(rad_prefix[r - 1])
        denom = B * float(np.prod(budgets[:r]))
        if rad == 0:
            t1 = 0.0
        elif denom == 0:
            t1 = math.inf
        else:
            t1 = math.log(m) ** 1.5 * rad / denom
        t2 = _power_root(log_ratio / r, p)
        t3 = (1.0 + math.sqrt(math.log(r))) / math.sqrt(m)
        rows.append({"r": r, "prefix_term": t1, "ratio_term": t2, "sample_term": t3, "value": scale * (t1 + t2 + t3)})
    best = min(rows, key=lambda row: row["value"])
    return BoundReport(
        "r_dependent",
        best["value"],
        {"B": B, "budgets": budgets, "Gamma": Gamma, "gamma": gamma_loss, "m": m, "rad_prefix": list(rad_prefix), "p": p},
        c,
        flags={"gamma_at_least_one": Gamma >= 1},
        details={"best_r": best["r"], "table": rows},
    )


def prior_bound_exponential(B: float, budgets_F: Sequence[float], d: int, m: int) -> float:
    """``B 2^d prod M_F(j) / sqrt(m)``."""
    return B * 2.0**d * float(np.prod(budgets_F)) / math.sqrt(m)


def prior_bound_spectral(B: float, spectral_norms: Sequence[float], d: int, m: int) -> float:
    """``B prod ||W_j|| sqrt(d^3 / m)``."""
    return B * float(np.prod(spectral_norms)) * math.sqrt(d**3 / m)


def gamma_of_net(net: PolyNet, q) -> float:
    """``prod_j ||W_j||_{q,inf}``."""
    return float(np.prod([matrix_norm_qp(W, q, math.inf) for W in net.weights]))
