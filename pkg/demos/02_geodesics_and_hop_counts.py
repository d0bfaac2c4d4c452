"""Passage times and minimal-hop geodesics.

At criticality half the edges cost nothing, so geodesics are long lazy walks
through open clusters and the passage time T counts how many closed
bottlenecks they must pay for. Among all time-minimizing paths we always
report one with the fewest lattice steps; that hop count N_R is the quantity
whose growth rate the scaling experiment measures.
"""

from critfpp.environment import Environment
from critfpp.lattice import Box, Vertex
from critfpp.shortest_path import fast_boundary_TN, passage_time

env = Environment(seed=7)
A = [Vertex(0, 0)]

for R in (4, 8, 16, 32):
    T, path, N = passage_time(env, A, Box(R).boundary())
    print(f"R={R:3d}  T={T:4.0f}  N={N:4d}  (path touches {len(path.vertices)} vertices)")

# the composite-weight dijkstra gives the same (T, N) much faster when only
# the numbers are needed
for R in (4, 8, 16, 32):
    T, N = fast_boundary_TN(env, R)
    print(f"R={R:3d}  fast (T, N) = ({T:.0f}, {N})")

# point-to-point works too; the search window grows until it is provably exact
res = passage_time(env, [Vertex(0, 0)], [Vertex(20, 5)])
print(f"0 -> (20,5): T={res.T:.0f}, N={res.N}")
