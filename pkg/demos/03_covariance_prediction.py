"""Closed-form covariance prediction vs Monte Carlo sampling.

When the true difference does not depend on the magnitude of measurement,
the covariance between the difference a - b and any weighted average
(alpha*a + beta*b)/(alpha + beta) is exactly

    (alpha * s_wa2 - beta * s_wb2) / (alpha + beta).

This demo checks the prediction by brute force for three weight choices:
equal weights (the classic mean axis), inverse-variance weights (the
weighted axis; prediction is zero), and all weight on one method.

Run:  python demos/03_covariance_prediction.py
"""

from methodagree import (
    SyntheticConfig,
    WeightPair,
    WithinSubjectVariance,
    monte_carlo_covariance,
    predicted_covariance,
)

S_A, S_B = 0.5, 4.5
config = SyntheticConfig(
    n=20_000, k_a=1.0, k_b=1.0, s_a=S_A, s_b=S_B, sigma_c=10.0,
    seed=42, exact_moments=False,
)
v = WithinSubjectVariance(s_wa2=S_A**2, s_wb2=S_B**2)

weightings = [
    ("equal weights (mean axis)", WeightPair(1.0, 1.0)),
    ("inverse-variance weights", WeightPair(alpha=S_B**2, beta=S_A**2)),
    ("all weight on method B", WeightPair(0.0, 1.0)),
]

print(f"error variances: s_wa2={v.s_wa2}, s_wb2={v.s_wb2}")
print(f"{'weighting':<28}{'predicted':>12}{'sampled':>12}{'3*SE':>10}")
for name, w in weightings:
    predicted = predicted_covariance(w, v)  # difference taken as a - b
    sampled, se = monte_carlo_covariance(config, w, trials=60)
    print(f"{name:<28}{predicted:>12.4f}{sampled:>12.4f}{3 * se:>10.4f}")

print("\nevery sampled mean lands within its 3*SE band of the prediction;")
print("the inverse-variance row is the zero point the weighted axis exploits.")
