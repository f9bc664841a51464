"""Extended-exponent norm algebra and dense matrix/vector helpers.

Exponents live in ``[1, inf]`` and are stored as exact fractions so that the
dual map ``p -> p / (p - 1)`` is an involution without floating drift.  The
infinite exponent is a symbolic flag; it never reaches ``**``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

import numpy as np

__all__ = [
    "Exponent",
    "as_exponent",
    "dual_exponent",
    "vector_norm",
    "row_norms",
    "matrix_norm_qp",
    "max_row_index_lq",
    "holder_extremal",
    "as_matrix",
    "as_vector",
]

ExponentLike = Union["Exponent", int, float, str, Fraction]


class Exponent:
    """An extended real in ``[1, inf]``.

    Finite values are held as :class:`fractions.Fraction`; ``inf`` is held as
    ``None`` internally.  Instances are immutable and hashable.
    """

    __slots__ = ("_frac", "_float")

    def __init__(self, value: ExponentLike):
        if isinstance(value, Exponent):
            frac = value._frac
        elif isinstance(value, str):
            if value.strip().lower() in ("inf", "infinity", "+inf"):
                frac = None
            else:
                frac = Fraction(value.strip())
        elif isinstance(value, float) and math.isinf(value):
            if value < 0:
                raise ValueError("exponent must be >= 1")
            frac = None
        elif isinstance(value, (int, float, Fraction, np.integer, np.floating)):
            if isinstance(value, (float, np.floating)) and math.isnan(value):
                raise ValueError("exponent must be >= 1, got nan")
            frac = Fraction(value) if not isinstance(value, np.floating) else Fraction(float(value))
        else:
            raise TypeError(f"cannot interpret {value!r} as an exponent")
        if frac is not None and frac < 1:
            raise ValueError(f"exponent must be >= 1, got {value!r}")
        object.__setattr__(self, "_frac", frac)
        # cached for the hot norm loops; Fraction comparisons are slow
        object.__setattr__(self, "_float", math.inf if frac is None else float(frac))

    def __setattr__(self, name, value):
        raise AttributeError("Exponent is immutable")

    @property
    def is_inf(self) -> bool:
        return self._frac is None

    @property
    def fraction(self) -> Fraction | None:
        return self._frac

    def __float__(self) -> float:
        return self._float

    def __eq__(self, other) -> bool:
        if not isinstance(other, Exponent):
            try:
                other = Exponent(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self._frac == other._frac

    def __hash__(self) -> int:
        return hash(("Exponent", self._frac))

    def __repr__(self) -> str:
        if self._frac is None:
            return "Exponent(inf)"
        if self._frac.denominator == 1:
            return f"Exponent({self._frac.numerator})"
        return f"Exponent({float(self._frac)!r})"

    def __str__(self) -> str:
        return "inf" if self._frac is None else repr(float(self._frac))

    def dual(self) -> "Exponent":
        return dual_exponent(self)


_CACHE: dict = {}


def as_exponent(p: ExponentLike) -> Exponent:
    if isinstance(p, Exponent):
        return p
    try:
        return _CACHE[p]
    except (KeyError, TypeError):
        e = Exponent(p)
    if isinstance(p, (int, float)) and len(_CACHE) < 1024:
        _CACHE[p] = e
    return e


def dual_exponent(p: ExponentLike) -> Exponent:
    """Return ``q`` with ``1/p + 1/q = 1`` (``1 <-> inf``)."""
    p = as_exponent(p)
    if p.is_inf:
        return Exponent(1)
    if p.fraction == 1:
        return Exponent(math.inf)
    f = p.fraction
    return Exponent(f / (f - 1))


def _lp_reduce(a: np.ndarray, p: Exponent, axis: int) -> np.ndarray:
    """L_p norm of a nonnegative array along ``axis``."""
    pf = p._float
    if pf == math.inf:
        return a.max(axis=axis)
    if pf == 1.0:
        return a.sum(axis=axis)
    # scale by the max to keep a**p representable; all-zero slices divide by 1
    scale = a.max(axis=axis, keepdims=True)
    scale[scale == 0] = 1.0
    if pf == 2.0:
        out = np.sqrt(np.square(a / scale).sum(axis=axis))
    else:
        out = np.power(np.power(a / scale, pf).sum(axis=axis), 1.0 / pf)
    return out * scale.squeeze(axis)


def vector_norm(x, p: ExponentLike) -> float | np.ndarray:
    """L_p norm over the last axis; a 1-D input returns a float."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] == 0:
        raise ValueError("vector_norm needs a nonempty vector")
    out = _lp_reduce(np.abs(x), as_exponent(p), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def row_norms(W, q: ExponentLike) -> np.ndarray:
    """L_q norm of every row; works on stacks ``(..., h, n)``."""
    W = np.asarray(W, dtype=float)
    return _lp_reduce(np.abs(W), as_exponent(q), axis=-1)


def matrix_norm_qp(W, q: ExponentLike, p: ExponentLike) -> float | np.ndarray:
    """Mixed norm ``||W||_{q,p}``: L_q over each row, then L_p over rows.

    Accepts a single matrix or a stack ``(..., h, n)``.
    """
    W = np.asarray(W, dtype=float)
    if W.ndim < 2:
        raise ValueError("matrix_norm_qp needs at least a 2-D array")
    out = _lp_reduce(row_norms(W, q), as_exponent(p), axis=-1)
    # nan/inf entries always surface in the reduced value
    if np.ndim(out) == 0:
        out = float(out)
        if not math.isfinite(out):
            raise ValueError("matrix entries must be finite")
    elif not np.isfinite(out).all():
        raise ValueError("matrix entries must be finite")
    return out


def max_row_index_lq(W, q: ExponentLike) -> int:
    """Index of the row with the largest L_q norm (lowest index on ties)."""
    norms = row_norms(as_matrix(W), q)
    # np.argmax returns the first maximal entry
    return int(np.argmax(norms))


def holder_extremal(v, p: ExponentLike) -> np.ndarray:
    """Unit-L_p vector ``u`` maximising ``<v, u>``; the maximum is ``||v||_{p*}``.

    Operates on the last axis, so stacks of vectors are fine.  Zero inputs map
    to zero.
    """
    v = np.asarray(v, dtype=float)
    p = as_exponent(p)
    a = np.abs(v)
    if p.is_inf:
        return np.sign(v)
    if p.fraction == 1:
        idx = np.argmax(a, axis=-1)
        u = np.zeros_like(v)
        np.put_along_axis(u, idx[..., None], 1.0, axis=-1)
        picked = np.take_along_axis(v, idx[..., None], axis=-1)
        return u * np.sign(picked)
    pd = dual_exponent(p)
    e = float(pd.fraction) - 1.0
    dn = _lp_reduce(a, pd, axis=-1)[..., None]
    safe = np.where(dn > 0, dn, 1.0)
    return np.sign(v) * np.power(a / safe, e)


def as_matrix(W) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] < 1 or W.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {W.shape}")
    if not np.isfinite(W).all():
        raise ValueError("matrix entries must be finite")
    return W


def as_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 1:
        raise ValueError(f"expected a nonempty 1-D vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector entries must be finite")
    return x
