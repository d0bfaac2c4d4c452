"""Near-critical crossings, correlation length, and the scaling product.

All estimators share one environment coupling: raising p only opens more
edges, so estimated crossing probabilities are exactly monotone in p at fixed
seed, with no Monte Carlo noise in the comparison. The correlation length
L(p) is the scale where crossings become near-certain, and Kesten's scaling
relation predicts L^2 * pi_4(1, L) * (p - 1/2) stays of order one.
"""

from critfpp.nearcritical import (
    CrossingQuery,
    correlation_length_hat,
    kesten_product,
    p_R_hat,
    sigma_hat,
)

print("crossing probability of a 16 x 16 square, shared environments:")
for p in (0.50, 0.55, 0.60, 0.70, 0.80):
    r = sigma_hat(CrossingQuery(16, 16, p), samples=5000, seed=1)
    print(f"  p={p:.2f}  sigma = {r.p_hat:.4f} +- {r.stderr:.4f}")

print("correlation length (smallest R whose square crosses with prob >= 0.98):")
for p in (0.55, 0.60, 0.65, 0.75):
    L = correlation_length_hat(p, samples=2000, seed=0)
    print(f"  p={p:.2f}  L = {L}")

print("inverse view: the p that makes the R-square cross:")
for R in (2, 4, 8, 16):
    print(f"  R={R:2d}  p_R = {p_R_hat(R, samples=2000, seed=0):.4f}")

print("Kesten product L^2 * pi_4(1, L) * (p - 1/2):")
for p in (0.55, 0.60, 0.65):
    k = kesten_product(p, samples=2000, seed=0)
    print(f"  p={p:.2f}  L={k.L_hat:3d}  pi4={k.pi4_hat:.4f}  product={k.product:.3f}")
