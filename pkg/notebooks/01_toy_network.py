# %% [markdown]
# # A four-gene toy network
#
# Sixteen configurations of four Boolean genes, encoded as integers with the
# first gene as the least significant bit. We look at the radius of the image
# of every ball in the 2-adic tree.

# %%
from padicgrn import builtin_dataset, build_transition_map, stability_scores
from padicgrn.stability import level_stats
from padicgrn.fixed_points import find_fixed_points

net = builtin_dataset("toy4")
f = build_transition_map(net)
print(list(f.images))

# %% [markdown]
# Ball radii level by level. `M` is the common prefix length of the images,
# so `t = 2**-M`.

# %%
for n in range(4):
    row = ", ".join(f"t[{b.m}]={b.t}" for b in level_stats(f, None, n))
    print(f"level {n}: {row}")

# %%
s = stability_scores(f)
print("scores", s.as_tuple(), "per level", s.per_level)
print("fixed points", sorted(find_fixed_points(f)))

# %% [markdown]
# Every ball contracts, so the whole expanding score is zero and the total
# mass `3 * 16 = 48` sits in the contracting class.
