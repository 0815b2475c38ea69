# %% [markdown]
# # Floral organ network: scores and fixed points
#
# The bundled 13-gene Boolean network (see the header of
# `data/athaliana13.grn` for its provenance) analysed under the hierarchy
# stored as the `pi_star` ordering.

# %%
from padicgrn import builtin_dataset, build_transition_map, stability_scores
from padicgrn.fixed_points import fixed_point_report
from padicgrn.stability import expanding_set

net = builtin_dataset("athaliana13")
f = build_transition_map(net)
pi_star = net.ordering_indices(net.orderings["pi_star"])
print(" ".join(net.orderings["pi_star"]))

# %%
s = stability_scores(f, pi_star)
print("mu_E, mu_A, mu_I =", s.as_tuple())
for n, (E, I, A) in enumerate(s.per_level, start=1):
    print(f"n={n:2d}  E={E:5d}  I={I:5d}  A={A:5d}  contribution={E * 2 ** (13 - n)}")

# %% [markdown]
# Expanding balls on the first levels of the tree.

# %%
for n in (2, 3, 4):
    print(n, sorted(expanding_set(f, pi_star, n)))

# %%
for r in fixed_point_report(f, pi_star, net.labels):
    print(f"{r.encoded:5d}  B(1/16, {r.ball_chain[3]:2d})  {r.sequence}  {r.label}")

# %% [markdown]
# The same network in its declaration (source) order scores much worse.

# %%
src = net.ordering_indices(net.orderings["source"])
print("source order mu_E =", stability_scores(f, src).mu_E)
