"""Pooling several independent sequences of the same chain.

When the data come as S independent stretches, the Gram matrix is built
over all points but consecutive pairs never cross a stretch boundary.
Three short sequences carry almost the same information as one long
one, and far more than any single stretch alone.
"""

from hmmorder import ObservedSeries, estimate_order, shift_scenario, simulate

spec = shift_scenario(noise="gaussian", delta=5.0, nu=0.1)

parts = []
for s in range(3):
    series, _ = simulate(spec, n_pairs=400, seed=100 + s)
    parts.append(series.points[:, 0])

pooled = ObservedSeries(sequences=tuple(parts))
print(f"pooled series: {pooled.n_sequences} sequences, "
      f"{pooled.n_points} points, {pooled.n_pairs} pairs")
estimate = estimate_order(pooled)
print(f"pooled estimate: L_hat = {estimate.l_hat} (tau = {estimate.tau:.4f})")
print()

for s, part in enumerate(parts, start=1):
    single = estimate_order(ObservedSeries.from_points(part))
    print(f"sequence {s} alone (n=400): L_hat = {single.l_hat}")
