"""Sample random edge environments and look at their weights.

Every edge of the square lattice carries a uniform variate derived from a
counter-based hash of (seed, edge), so environments are reproducible, lazily
evaluated, and cheap to query at any coordinate. Weights come from plugging
the uniform into a chosen inverse CDF; an edge is "open" when its weight is
zero, which happens with probability exactly 1/2 for every supported
distribution.
"""

from critfpp.environment import Environment, WeightDistribution
from critfpp.lattice import EAST, NORTH, Edge, Vertex

env = Environment(seed=42)
e = Edge(Vertex(0, 0), EAST)
print(f"uniform({e}) = {env.uniform(e):.6f}")
print(f"open?         {env.is_open(e)}")
print(f"weight        {env.weight(e)}")

# the same seed always reproduces the same environment
assert Environment(42).uniform(e) == env.uniform(e)

# other weight laws share the coupling: the open edges are identical
for spec in ("bernoulli", "gap:alpha=2", "power-law:alpha=3", "stretched:alpha=0.5"):
    dist = WeightDistribution.parse(spec)
    env_d = Environment(42, distribution=dist)
    print(f"{spec:22s} weight(e) = {env_d.weight(e):.6f}  open = {env_d.is_open(e)}")

# vectorized grids: shape (2, ny, nx), direction EAST=0 / NORTH=1
og = env.open_grid(-2, -2, 5, 5)
print("open fraction in a 5x5 window:", og.mean())
print("east edge statuses, row y=0:", og[EAST, 2].astype(int))
print("north edge statuses, row y=0:", og[NORTH, 2].astype(int))
