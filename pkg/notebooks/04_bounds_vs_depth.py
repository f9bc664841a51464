# %% [markdown]
# # Depth-dependent and depth-independent bounds
#
# With the budget product fixed, the depth-dependent bound grows like
# `sqrt(d)`. The depth-independent bound is the smaller of `sqrt(d/m)` and a
# depth-free term, so it stops growing once depth passes the crossover.

# %%
from polyrad.bounds import depth_independent_crossover
from polyrad.cli import RunConfig, sweep_rows

cfg = RunConfig(dims=[2, 2, 1], sweep_d=[1, 2, 4, 8, 16, 24, 26, 32, 48, 64], sweep_k=[2], sweep_m=[16],
                sweep_Mprod=4.0, Gamma=1.0)
print(f"{'d':>3} {'depth-dep':>10} {'depth-indep':>12} branch")
for row in sweep_rows(cfg):
    print(f"{row['d']:3d} {row['depth_dep_bound']:10.4f} {row['depth_indep_bound']:12.4f} {row['branch']}")
print("analytic crossover d* =", depth_independent_crossover(4.0, 1.0, 16))

# %% [markdown]
# Letting depth scale as `m^{1/3}` makes the spectral-norm style prior bound
# flat in `m`.

# %%
flat = RunConfig(d_rule="cube_root", sweep_k=[2], sweep_m=[8, 64, 343, 1000], sweep_Mprod=2.0, Gamma=1.0)
for row in sweep_rows(flat):
    print(f"m={row['m']:5d} d_eff={row['d_eff']:6.2f} prior_spectral={row['prior_spectral']:.6f}")
