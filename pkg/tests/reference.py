"""Independent pure-Python oracles used to cross-check the numpy code paths.

Nothing here imports the package under test.  Loops are explicit and
exponents are plain floats, so agreement with the vectorised code is a
genuine second opinion.
"""

import math

# 40-digit Decimal evaluations, frozen
SQRT_2LN2_PLUS_1 = 2.177410022515474691
TWO_SQRT_2LN2 = 2.354820045030949382
LN16_POW_075_HALF = 1.074321070617289703
FIFTH_ROOT_5 = 1.379729661461214832
INV_SQRT_E = 0.6065306597126334236
THRESHOLD_K3 = 0.5773502691896257645
THRESHOLD_K32 = 0.8942249331776563822
THRESHOLD_K64 = 0.9361177424536048882
EXPM1_EQ_2Z_ROOT = 1.256431208626169677


def lp(values, p):
    if not values:
        return 0.0
    top = max(abs(v) for v in values)
    if p == math.inf or top == 0.0:
        return top
    total = 0.0
    for v in values:
        total += (abs(v) / top) ** p
    return top * total ** (1.0 / p)


def mixed_norm(W, q, p):
    """Row-wise L_q, then L_p across rows; double loop."""
    rows = []
    for i in range(len(W)):
        acc = []
        for j in range(len(W[i])):
            acc.append(W[i][j])
        rows.append(lp(acc, q))
    return lp(rows, p)


def polynet_forward(weights, x, k):
    h = list(x)
    for layer, W in enumerate(weights):
        z = [sum(W[i][j] * h[j] for j in range(len(h))) for i in range(len(W))]
        h = z if layer == len(weights) - 1 else [v**k for v in z]
    return h


def second_largest(values):
    s = sorted(values)
    return s[-2] if len(s) > 1 else 0.0
