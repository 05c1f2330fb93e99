"""Why one particle stops at second order, and k particles at order 2k.

Whatever boxes do to a single system, the evolved density operator is a
sum of blocks that each touch at most two box inputs; averaging over
inputs of equal modulo then yields the same state for every target value
as soon as three or more boxes carry weight, so no measurement can beat
guessing.  Removing path coherence (the classical restriction) halves
the cap to one input per block.  With k systems and fully correlated
joint operations the same argument stops at 2k inputs.

This script checks all of that numerically on random channels: the
spectral lines that should be exact zeros sit at machine precision.
"""

import numpy as np

from paritygames import games, quantum
from paritygames.numkit import DitString
from paritygames.strategies import pretty_good_measurement

print(__doc__)
rng = np.random.default_rng(2024)


def pgm_distribution(prep, program, m, d):
    nu = DitString.ones(m, d)
    family = [quantum.modulo_average_state(prep, program, nu, s)
              for s in range(d)]
    povm = pretty_good_measurement(family, [1.0 / d] * d)
    return quantum.run_experiment(prep, program, povm, d, m)


def heaviest_dual(dist, weight):
    worst = 0.0
    rows = games.all_inputs(dist.m, dist.d)
    for i in np.flatnonzero(np.count_nonzero(rows, axis=1) == weight):
        digits = tuple(int(v) for v in rows[i])
        for b in range(dist.d):
            worst = max(worst, abs(games.dual_term(dist, digits, b)))
    return worst


print("--- one quantum particle, three boxes ---")
for d in (2, 3):
    h = quantum.PathedHilbert(1, 3, (2,))
    prep = quantum.random_density_state(h, rng)
    program = quantum.random_box_program(3, d, 2, rng)
    dist = pgm_distribution(prep, program, 3, d)
    nu = DitString.ones(3, d)
    collapse = quantum.average_state_collapse_check(prep, program, nu, 3, d)
    print(f"d={d}: weight-3 dual magnitude = {heaviest_dual(dist, 3):.2e}, "
          f"modulo-averaged states identical: {collapse}")

print()
print("--- the same particle, spatial coherence erased ---")
h = quantum.PathedHilbert(1, 2, (2,))
prep = quantum.classical_dephase(quantum.random_density_state(h, rng))
program = quantum.random_box_program(2, 2, 2, rng)
dist = pgm_distribution(prep, program, 2, 2)
print(f"weight-2 dual magnitude = {heaviest_dual(dist, 2):.2e} "
      f"(a classical particle cannot even win the two-box game)")
print(f"algebraic order of the dephased run: {games.algebraic_order(dist)}")

print()
print("--- two particles, five boxes, correlated internal operations ---")
h = quantum.PathedHilbert(2, 5, (2, 2))
prep = quantum.random_density_state(h, rng)
program = quantum.random_joint_program(5, 2, 2, (2, 2), rng)
g = rng.normal(size=(h.dim, h.dim)) + 1j * rng.normal(size=(h.dim, h.dim))
_, vecs = np.linalg.eigh((g + g.conj().T) / 2)
p0 = vecs[:, :h.dim // 2] @ vecs[:, :h.dim // 2].conj().T
povm = quantum.Povm((p0, np.eye(h.dim) - p0))
dist = quantum.run_experiment(prep, program, povm, 2, 5)
print(f"weight-5 dual magnitude = {heaviest_dual(dist, 5):.2e}")
print(f"algebraic order detected: {games.algebraic_order(dist)} (cap is 4)")
