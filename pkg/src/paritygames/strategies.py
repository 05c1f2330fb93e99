"""Explicit winning strategies, composition, and the particle witness.

The constructors here package a preparation, a box program and a
measurement into runnable strategies: the two-box phase strategies (one
quantum system, maximal for binary inputs, 1/d above baseline for d-ary
inputs via a pretty-good measurement), the classical counting strategy
(one marked particle per box), and modulo composition of independent
strategies on disjoint box sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import games, quantum
from .numkit import DitString, dagger, digits_of

ZERO_WEIGHT_MARGIN = 0.02


@dataclass(frozen=True)
class Strategy:
    """One transmission through the boxes plus Bob's measurement."""

    d: int
    m: int
    k: int
    prep: quantum.DensityState
    program: quantum.BoxProgram
    povm: quantum.Povm
    box_set: tuple[int, ...]

    def __post_init__(self):
        if len(self.povm) != self.d:
            raise ValueError("strategy measurement must have d effects")

    def distribution(self) -> games.ConditionalDistribution:
        return quantum.run_experiment(self.prep, self.program, self.povm,
                                      self.d, self.m)


@dataclass(frozen=True)
class CountingStrategy:
    """Several independently sent systems; Bob adds their outcomes mod d.

    Each part is a complete single-system strategy over the same m boxes;
    the final output is the modulo sum of the parts' outputs, so the
    joint table is the shared-input convolution of the parts' tables.
    """

    d: int
    m: int
    k: int
    parts: tuple[Strategy, ...]

    def distribution(self) -> games.ConditionalDistribution:
        dist = self.parts[0].distribution()
        for part in self.parts[1:]:
            dist = games.product_distribution(dist, part.distribution(),
                                              mode="shared")
        return dist


@dataclass(frozen=True)
class WitnessResult:
    """Interference order found in a table and the implied particle count."""

    detected_order: int
    particle_lower_bound: int
    per_subset_evidence: dict = field(default_factory=dict)


def binary_phase_strategy() -> Strategy:
    """Two boxes, binary inputs, one particle in even superposition.

    Each box shifts its branch by pi per input bit; the received state is
    one of two orthogonal superpositions, so measuring in that basis
    decodes the parity deterministically.
    """
    prep = quantum.path_superposition_state(2)
    program = quantum.phase_program(2, 2, [[0, 1], [0, 1]])
    plus = np.full((2, 2), 0.5, dtype=complex)
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)
    povm = quantum.Povm((plus, minus))
    return Strategy(2, 2, 1, prep, program, povm, (0, 1))


def dary_phase_strategy(d: int, nu: DitString) -> Strategy:
    """Two boxes, d-ary inputs, phases plus a pretty-good measurement.

    The first box rotates its branch by ``omega**(-nu[0] x)``, the second
    by ``omega**(+nu[1] x)``, so up to a global phase the received state
    only depends on the weighted modulo.  Bob measures with the PGM of
    the strategy's own modulo-averaged family, which here is the family
    itself rescaled by 2/d.
    """
    if len(nu) != 2 or nu.d != d:
        raise ValueError("need a length-2 weight string over Z_d")
    if any(v == 0 for v in nu.digits):
        raise ValueError("phase strategy weights must be nonzero")
    prep = quantum.path_superposition_state(2)
    exps = [[(-nu.digits[0] * x) % d for x in range(d)],
            [(+nu.digits[1] * x) % d for x in range(d)]]
    program = quantum.phase_program(2, d, exps)
    family = [quantum.modulo_average_state(prep, program, nu, s)
              for s in range(d)]
    povm = pretty_good_measurement(family, [1.0 / d] * d)
    return Strategy(d, 2, 1, prep, program, povm, (0, 1))


def pretty_good_measurement(states, weights, fold_into: int = 0
                            ) -> quantum.Povm:
    """POVM with effects ``rhobar^-1/2 (w_s rho_s) rhobar^-1/2``.

    ``rhobar`` is the weighted average state; the inverse square root is
    taken on its support.  Whatever identity remains on the orthogonal
    complement is a discard effect, folded into effect ``fold_into`` so
    the POVM keeps exactly one effect per hypothesis.
    """
    mats = [s.rho if isinstance(s, quantum.DensityState) else np.asarray(s)
            for s in states]
    weights = [float(w) for w in weights]
    if len(mats) != len(weights):
        raise ValueError("one weight per state required")
    n = mats[0].shape[0]
    if any(m.shape != (n, n) for m in mats):
        raise ValueError("states of mismatched dimension")
    average = sum(w * m for w, m in zip(weights, mats))
    evals, vecs = np.linalg.eigh((average + dagger(average)) / 2)
    cutoff = 1e-12 * max(float(evals.max()), 1.0)
    inv_sqrt = vecs @ np.diag(
        [1.0 / math.sqrt(e) if e > cutoff else 0.0 for e in evals]) @ dagger(vecs)
    support = vecs @ np.diag([1.0 if e > cutoff else 0.0
                              for e in evals]) @ dagger(vecs)
    effects = [inv_sqrt @ (w * m) @ inv_sqrt for w, m in zip(weights, mats)]
    discard = np.eye(n) - support
    effects[int(fold_into)] = effects[int(fold_into)] + discard
    effects = [(e + dagger(e)) / 2 for e in effects]
    return quantum.Povm(tuple(effects))


def _mark_reader_povm(m: int, d: int, box: int, weight: int) -> quantum.Povm:
    """Read the internal mark and output ``weight * mark mod d``."""
    groups = [[] for _ in range(d)]
    for path in range(m):
        for mark in range(d):
            groups[(weight * mark) % d].append(path * d + mark)
    return quantum.computational_povm(m * d, groups)


def _idle_povm(m: int, d: int) -> quantum.Povm:
    """Always output zero (the particle contributes nothing)."""
    groups = [list(range(m * d))] + [[] for _ in range(d - 1)]
    return quantum.computational_povm(m * d, groups)


def _uniform_guess_povm(m: int, d: int) -> quantum.Povm:
    return quantum.Povm(tuple(np.eye(m * d, dtype=complex) / d
                              for _ in range(d)))


def classical_counting_strategy(k: int, m: int, d: int,
                                nu: DitString | None = None
                                ) -> CountingStrategy:
    """One classical particle per box, each picking up its box's input.

    Every particle travels on a definite path (no spatial coherence) and
    the boxes stamp their input onto its d-level internal mark; for
    ``d = 2`` the mark reads as open/block with an explicit absorbed
    flag.  With at least one particle per box Bob recovers every input
    and wins outright; with fewer particles than boxes he cannot beat a
    random guess, and these parts simply guess uniformly, giving the
    exactly uniform table.
    """
    if k < 1 or m < 1:
        raise ValueError("need at least one particle and one box")
    if nu is None:
        nu = DitString.ones(m, d)
    ws = digits_of(nu, d)
    if len(ws) != m:
        raise ValueError("weight string length does not match box count")
    program = quantum.mark_program(m, d)
    parts = []
    for p in range(k):
        box = p % m
        prep = quantum.definite_path_state(m, box, internal_dim=d)
        if m > k:
            povm = _uniform_guess_povm(m, d)
        elif p < m:
            povm = _mark_reader_povm(m, d, box, ws[box])
        else:
            povm = _idle_povm(m, d)
        parts.append(Strategy(d, m, 1, prep, program, povm, (box,)))
    return CountingStrategy(d, m, k, tuple(parts))


def compose_modulo_strategies(a: games.ConditionalDistribution,
                              b: games.ConditionalDistribution,
                              box_set_a=None, box_set_b=None
                              ) -> games.ConditionalDistribution:
    """Run two strategies on disjoint box sets, output the modulo sum.

    Takes the strategies' result tables; the composed table covers the
    union of the box sets with the first strategy's boxes first.
    """
    if box_set_a is not None and box_set_b is not None:
        overlap = set(box_set_a) & set(box_set_b)
        if overlap:
            raise ValueError(f"box sets overlap: {sorted(overlap)}")
    return games.product_distribution(a, b, mode="disjoint")


def additivity_lower_bound(q_a, q_b, d: int):
    """Composed interference floor ``qa qb + (1-qa)(1-qb)/(d-1) - 1/d``.

    Zero at ``q_a = q_b = 1/d`` and strictly increasing in either win
    probability above that point.  Fraction inputs are computed exactly
    (the zero at the baseline is then exact rather than roundoff-sized).
    """
    if not (0 <= q_a <= 1 and 0 <= q_b <= 1):
        raise ValueError("win probabilities must lie in [0, 1]")
    if isinstance(q_a, Fraction) and isinstance(q_b, Fraction):
        baseline = Fraction(1, d)
    else:
        baseline = 1.0 / d
    return q_a * q_b + (1 - q_a) * (1 - q_b) / (d - 1) - baseline


def particle_number_witness(dist: games.ConditionalDistribution,
                            tol: float = games.ORDER_TOL) -> WitnessResult:
    """Lower bound the number of quantum systems behind a table.

    Scans all dual terms; the largest box subset carrying one above
    ``tol`` sets the detected interference order n, and no fewer than
    ``ceil(n / 2)`` quantum systems can produce order n.  Evidence is
    reported per box subset so the carrying sub-games can be audited.
    """
    spectrum = games.fourier_spectrum(dist)
    scale = dist.d ** (dist.m / 2)
    magnitudes = np.abs(spectrum.coefficients).max(axis=1) / scale
    strings = games.all_inputs(dist.m, dist.d)
    evidence: dict[tuple[int, ...], float] = {}
    detected = 0
    for i in range(1, dist.d**dist.m):
        support = tuple(int(j) for j in np.flatnonzero(strings[i]))
        mag = float(magnitudes[i])
        evidence[support] = max(mag, evidence.get(support, 0.0))
        if mag > tol:
            detected = max(detected, len(support))
    return WitnessResult(detected, math.ceil(detected / 2), evidence)


def noisy_modulo_decoder(m: int, d: int, rng, nu: DitString | None = None,
                         per_input: bool = True
                         ) -> games.ConditionalDistribution:
    """Decoder that errs uniformly: correct modulo with probability q,
    otherwise any wrong outcome with equal probability.

    ``q`` is drawn above the random-guess baseline, per input row when
    ``per_input`` is set, else once for the whole table.
    """
    if nu is None:
        nu = DitString.ones(m, d)
    targets = games.modulo_targets(m, d, digits_of(nu, d))
    rows = d**m
    if per_input:
        q = rng.uniform(1.0 / d + ZERO_WEIGHT_MARGIN, 1.0, size=rows)
    else:
        q = np.full(rows, rng.uniform(1.0 / d + ZERO_WEIGHT_MARGIN, 1.0))
    table = np.repeat(((1.0 - q) / (d - 1))[:, None], d, axis=1)
    table[np.arange(rows), targets] = q
    return games.ConditionalDistribution(m, d, table)


@dataclass(frozen=True)
class AdditivityPair:
    """Two independent strategies plus the weight strings they play."""

    dist_a: games.ConditionalDistribution
    dist_b: games.ConditionalDistribution
    nu_a: DitString
    nu_b: DitString

    def composed_weights(self) -> DitString:
        return DitString(self.nu_a.d, self.nu_a.digits + self.nu_b.digits)


def random_additivity_pair(d: int, rng, boxes_per_side: int = 2,
                           per_input: bool = True) -> AdditivityPair:
    """Draw a random strategy pair for the composition bound sweep.

    The bound is tight exactly when wrong outcomes are spread evenly, and
    it fails for adversarially skewed error profiles, so the sweep stays
    inside its domain: pairs of uniform-error decoders (any d, where the
    bound holds with equality) and identical pairs of two-box phase/PGM
    strategies (d >= 3, symmetric profiles, strict inequality for d = 5).
    ``per_input`` passes through to :func:`noisy_modulo_decoder`.

    Each side's win probability is measured against its own weight
    string; the composed table plays the concatenated weights.
    """
    kinds = ["uniform_error"]
    if d >= 3:
        kinds.append("pgm_identical")
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "pgm_identical":
        nu = DitString(d, tuple(int(v) for v in rng.integers(1, d, size=2)))
        dist = dary_phase_strategy(d, nu).distribution()
        return AdditivityPair(dist, dist, nu, nu)
    nu_a = DitString(d, tuple(int(v)
                              for v in rng.integers(1, d, size=boxes_per_side)))
    nu_b = DitString(d, tuple(int(v)
                              for v in rng.integers(1, d, size=boxes_per_side)))
    a = noisy_modulo_decoder(boxes_per_side, d, rng, nu=nu_a,
                             per_input=per_input)
    b = noisy_modulo_decoder(boxes_per_side, d, rng, nu=nu_b,
                             per_input=per_input)
    return AdditivityPair(a, b, nu_a, nu_b)
