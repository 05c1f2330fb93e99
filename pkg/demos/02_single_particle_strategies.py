"""One quantum particle through two boxes: phases and pretty-good guesses.

A single particle in an even superposition of two paths picks up a
relative phase that encodes the weighted modulo of the two box inputs.
For bits the two reachable states are orthogonal and Bob decodes the
parity outright; for d-ary inputs the d reachable states overlap, and
measuring with the pretty-good measurement of that family still lifts
the win rate to 2/d, i.e. 1/d above guessing.
"""

import numpy as np

from paritygames import games, quantum
from paritygames.games import GameSpec
from paritygames.numkit import DitString
from paritygames.strategies import binary_phase_strategy, dary_phase_strategy

print(__doc__)

print("--- binary inputs ---")
strategy = binary_phase_strategy()
print("preparation (even superposition of both paths):")
print(strategy.prep.rho)
dist = strategy.distribution()
print("conditional table (perfect parity decoding):")
print(dist.table)
value = games.interference_term(dist, GameSpec.unit(2, 2))
print(f"interference = {value:+.12f} (the binary maximum)")

print()
print("--- d-ary inputs ---")
for d in (3, 5, 7):
    nu = DitString.ones(2, d)
    dist = dary_phase_strategy(d, nu).distribution()
    value = games.interference_term(dist, GameSpec(2, d, nu))
    print(f"d={d}: interference = {value:.12f} = 1/{d}")

print()
print("the d=3 mechanics, step by step:")
d = 3
nu = DitString.ones(2, d)
strategy = dary_phase_strategy(d, nu)
print("modulo-averaged states received by Bob (one per target value):")
family = [quantum.modulo_average_state(strategy.prep, strategy.program, nu, s)
          for s in range(d)]
for s, state in enumerate(family):
    overlaps = [np.trace(state.rho @ other.rho).real for other in family]
    print(f"  target {s}: overlaps with family = "
          + ", ".join(f"{v:.3f}" for v in overlaps))
print("the pretty-good measurement is this family rescaled by 2/d, so the")
print("success probability per class is 2/d:")
dist = strategy.distribution()
targets = games.modulo_targets(2, d, nu)
print(f"  P(correct | each input) = "
      f"{dist.table[np.arange(d**2), targets].round(6)}")
