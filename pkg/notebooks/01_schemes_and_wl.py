# %% [markdown]
# # Schemes, WL closure and point extensions
#
# The pair coloring of a permutation group, and how far the WL refinement gets
# from just a few relations.

# %%
import numpy as np

from twoclosure import (
    BinaryRelation,
    dihedral,
    intersection_numbers,
    is_complete,
    point_extension,
    regular_points,
    scheme_of_group,
    verify_coherent,
    wl_closure,
)

# %% [markdown]
# ## The pentagon
# D5 has three 2-orbits: the diagonal, the pentagon edges and the pentagram edges.

# %%
X = scheme_of_group(dihedral(5))
print(X.colors)
print("rank", X.rank, "sizes", X.sizes.tolist())
print(verify_coherent(X))

# %%
T = intersection_numbers(X)
edge = int(X.colors[0, 1])
# two adjacent points have no common neighbour
print(T.get((edge, edge, edge), 0))

# %% [markdown]
# ## WL from the cycle alone
# Feeding just the 5-cycle edge set gives back the same partition.

# %%
C5 = BinaryRelation(5, [(i, (i + s) % 5) for i in range(5) for s in (1, 4)])
W = wl_closure([C5])
print(W.same_partition(X), W.rank)

# %% [markdown]
# A directed cycle is functional, so its closure is semiregular: every point is regular.

# %%
arrow = BinaryRelation(7, [(i, (i + 1) % 7) for i in range(7)])
Z = wl_closure([arrow])
print(Z.rank, sorted(regular_points(Z)))

# %% [markdown]
# ## Point extensions
# Fixing one pentagon vertex still leaves a reflection; fixing two neighbours kills it.

# %%
E1 = point_extension(X, [0])
E2 = point_extension(X, [0, 1])
print("one point:", E1.rank, "fibers", [sorted(f) for f in E1.fibers()])
print("two points complete:", is_complete(E2))

# %% [markdown]
# ## Random input
# Anything goes in; a coherent configuration comes out.

# %%
rng = np.random.default_rng(0)
n = 12
pairs = [tuple(p) for p in rng.integers(0, n, size=(20, 2)).tolist()]
R = wl_closure([BinaryRelation(n, pairs)])
print(R.rank, verify_coherent(R).ok)
