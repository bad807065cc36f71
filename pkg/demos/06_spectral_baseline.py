"""The competing spectral estimator and where it struggles.

The baseline projects consecutive pairs on a trigonometric basis and
counts significant singular values of the resulting moment matrix,
with significance judged against a line fitted through the smallest
singular values.  Its answer depends on the basis size M and the
regression count M_reg; the operator method has no such knobs.
"""

from hmmorder import (
    SpectralConfig,
    estimate_order,
    paper_scenarios,
    simulate,
    spectral_order,
)

spec = paper_scenarios()["beta3"]
series, _ = simulate(spec, n_pairs=2000, seed=31)

operator = estimate_order(series)
print(f"operator method: L_hat = {operator.l_hat}")
print()
print(" M   M_reg   spectral L_hat")
for m in (20, 40, 60):
    for m_reg in (5, m // 2, m - 5):
        result = spectral_order(series, SpectralConfig(n_basis=m, n_reg=m_reg))
        print(f"{m:3d}  {m_reg:5d}   {result.l_hat}")

print()
result = spectral_order(series, SpectralConfig(n_basis=20, n_reg=5))
print("with M=20, M_reg=5 the five leading singular values and the")
print("fitted significance line:")
for j in range(5):
    print(
        f"  sigma_{j + 1} = {result.sigma[j]:8.5f}   1.5*fit = "
        f"{1.5 * result.fitted[j]:8.5f}   significant: {bool(result.significant[j])}"
    )
