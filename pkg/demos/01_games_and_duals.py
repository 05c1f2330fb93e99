"""A first tour of parity/modulo games at the level of probability tables.

The referee hides one dit per box; Bob must output a weighted sum of the
hidden inputs modulo a prime d.  Everything observable about a strategy
is its conditional table P(b | x), and this script walks through the
quantities the toolkit extracts from such a table: win probability,
interference term, dual (Fourier) terms, the output-vs-modulo marginal,
and the equivalence between the game and dual formulations.
"""

import numpy as np

from paritygames import games
from paritygames.games import GameSpec, delta_distribution, uniform_distribution
from paritygames.numkit import DitString

print(__doc__)

m, d = 2, 2
spec = GameSpec.unit(m, d)

print("--- random guessing ---")
uniform = uniform_distribution(m, d)
print(f"win probability : {games.win_probability(uniform, spec):.4f}")
print(f"interference    : {games.interference_term(uniform, spec):+.4f}")

print()
print("--- a perfect parity decoder ---")
decoder = delta_distribution(m, d)
print("table rows are inputs (first box varies fastest), columns outputs:")
print(decoder.table)
print(f"win probability : {games.win_probability(decoder, spec):.4f}")
print(f"interference    : {games.interference_term(decoder, spec):+.4f}")

print()
print("the dual terms weight each row with a root-of-unity phase;")
print("for the decoder they are +1/2 and -1/2:")
nu = DitString.ones(m, d)
for b in range(d):
    value = games.dual_term(decoder, nu, b)
    print(f"  dual(nu=11, b={b}) = {value.real:+.4f}{value.imag:+.4f}j")

print()
print("the output-vs-modulo marginal condenses the table to d x d;")
print("a perfect decoder becomes the identity, guessing becomes flat:")
print(games.modulo_marginal_matrix(decoder, nu))
print(games.modulo_marginal_matrix(uniform, nu))

print()
print("--- the game/dual equivalence ---")
print("for any table, the game terms vanish for every output relabeling")
print("exactly when all dual terms vanish; the pair of booleans below")
print("reports (game side vanishes, dual side vanishes):")
for name, dist in [("uniform", uniform), ("decoder", decoder)]:
    print(f"  {name:8s}: {games.game_dual_equivalence(dist, nu)}")

rng = np.random.default_rng(1)
random_dist = games.random_distribution(3, 3, rng)
print(f"  random  : "
      f"{games.game_dual_equivalence(random_dist, DitString.ones(3, 3))}")
