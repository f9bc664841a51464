# %% [markdown]
# # Mixed matrix norms and the rank-1 row selection
#
# `||W||_{q,p}` takes the L_q norm of every row and then the L_p norm of the
# resulting vector. Keeping only the largest row gives a rank-1 matrix whose
# residual has a closed form.

# %%
import math

import numpy as np

from polyrad import matrix_norm_qp, row_norms
from polyrad.alternate import rank1_approx, rank1_residual_closed_form

W = np.array([[3.0, 0.0, 1.0], [0.5, -2.0, 0.0], [1.0, 1.0, 1.0]])
grid = (1, 1.5, 2, 3, math.inf)

# %% [markdown]
# The table is non-increasing along each row (larger outer exponent) and
# non-increasing down each column (larger inner exponent).

# %%
print("q \\ p " + "".join(f"{str(p):>9}" for p in grid))
for q in grid:
    print(f"{str(q):>6}" + "".join(f"{matrix_norm_qp(W, q, p):9.4f}" for p in grid))

# %% [markdown]
# Row selection: the kept row is the one with the largest L_q norm, and the
# residual matches `(||W||^p - ||W||_{q,inf}^p)^{1/p}`.

# %%
for q, p in [(2, 2), (1, 3), (3, 1.5), (2, math.inf)]:
    Wt, res = rank1_approx(W, q, p)
    kept = int(np.flatnonzero(Wt.any(axis=1))[0])
    print(f"q={q} p={p}: kept row {kept}, row norms {np.round(row_norms(W, q), 4)}, "
          f"residual {res:.6f}, closed form {rank1_residual_closed_form(W, q, p):.6f}")
