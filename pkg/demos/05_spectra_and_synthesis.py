"""Reading interference orders off Fourier spectra, and writing them back.

Expanding each outcome's table over the rotated product basis turns
"which box subsets does this distribution couple" into "which spectral
lines survive".  The algebraic order is the weight of the heaviest
surviving line.  Running the transform backwards synthesizes random
tables of any prescribed order, which is how the analysis layer is
exercised without any quantum machinery.
"""

import numpy as np

from paritygames import games
from paritygames.games import (
    algebraic_order,
    all_inputs,
    delta_distribution,
    fourier_spectrum,
    product_distribution,
    synthesize_order_n_distribution,
)

print(__doc__)

print("--- the spectrum of a perfect two-box parity decoder ---")
decoder = delta_distribution(2, 2)
spectrum = fourier_spectrum(decoder)
print("weight string -> coefficient magnitude for outcome b=0:")
for i, digits in enumerate(all_inputs(2, 2)):
    mag = abs(spectrum.coefficients[i, 0])
    print(f"  nu={tuple(int(v) for v in digits)}: {mag:.4f}")
print(f"algebraic order: {algebraic_order(decoder)}")

print()
print("--- synthesizing tables of prescribed order ---")
for n in range(4):
    dist, exact = synthesize_order_n_distribution(3, 2, n, seed=11 + n)
    print(f"target order {n}: measured order {algebraic_order(dist)}"
          f"{' (weight-n line present)' if exact else ''}")

print()
print("--- order is additive over disjoint boxes ---")
a, _ = synthesize_order_n_distribution(2, 3, 1, seed=21)
b, _ = synthesize_order_n_distribution(2, 3, 2, seed=22)
joint = product_distribution(a, b)
print(f"order {algebraic_order(a)} table x order {algebraic_order(b)} table "
      f"-> composed order {algebraic_order(joint)} on four boxes")

print()
print("spectral weight profile of the composition (max |coefficient| per")
print("number of coupled boxes):")
spectrum = fourier_spectrum(joint)
weights = spectrum.weights()
magnitudes = np.abs(spectrum.coefficients).max(axis=1)
for w in range(5):
    peak = magnitudes[weights == w].max()
    print(f"  {w} boxes coupled: {peak:.3e}")
