# %% [markdown]
# # Feasible polynomial networks
#
# With activation `z^k`, a layer maps the radius-`R` ball into itself as long
# as `R * ||W||` stays under `(1/k)^{1/(k-1)}`. The canonical budgets
# `M(1) = 1/(2B)` and `M(j) = 2^{k-1}` keep every hidden radius at 1/2.

# %%
import numpy as np

from polyrad import ClassSpec, check_feasibility, constraint_threshold, forward, sample_feasible_net, sample_inputs

for k in range(2, 11):
    print(f"k={k:2d}  threshold {constraint_threshold(k):.6f}")

# %% [markdown]
# Sample a net on the budget boundary and check every layer.

# %%
spec = ClassSpec.canonical((4, 6, 6, 5, 1), k=3, q=2, p=2, B=1.5)
net = sample_feasible_net(spec, 1.0, seed=0)
report = check_feasibility(net, spec.B, spec.q, spec.p)
for layer in report.layers:
    print(layer)

# %% [markdown]
# Sampled inputs never leave the ball, and outputs stay bounded.

# %%
X = sample_inputs(5000, 4, 2, spec.B, seed=1, boundary_prob=0.5)
out = forward(net, X)
print("max ||x||_2 =", np.linalg.norm(X, axis=1).max(), " max |N(x)| =", np.abs(out).max())
