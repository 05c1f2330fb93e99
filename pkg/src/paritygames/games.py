"""Exact analysis of parity/modulo games over full input enumeration.

A game instance asks Bob to output a weighted sum modulo a prime ``d`` of
the ``m`` box inputs.  The universal interchange object is the exact
conditional table ``P(b | x_1 ... x_m)``; everything here (win
probabilities, interference terms, their Fourier duals, algebraic order)
is computed by enumerating all ``d**m`` inputs.

Input strings are indexed little-endian in the first box: flat index
``i`` encodes ``x_j = (i // d**j) % d`` for ``j = 0..m-1``.  The same
layout indexes weight strings in Fourier spectra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .numkit import DitString, Permutation, digits_of, is_prime

# Zero threshold separating exact-zero Fourier coefficients from roundoff
# when deciding interference orders (true zeros stay below ~1e-13 here).
ORDER_TOL = 1e-8

# Enumerating all d! output relabelings is capped at d = 7 (5040 of them);
# beyond that the dual side of the equivalence is the cheap route anyway.
MAX_PERMUTATION_D = 7


@dataclass(frozen=True)
class GameSpec:
    """One game instance: m boxes, prime modulus d, weights, relabeling.

    ``nu`` must have all digits in ``{1, ..., d-1}``; a zero weight would
    let Bob ignore a box.  ``f`` relabels Bob's output (identity when
    omitted).  ``k`` records the declared resource count for bookkeeping.
    """

    m: int
    d: int
    nu: DitString
    f: Permutation | None = None
    k: int = 1

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need at least one box")
        if not is_prime(self.d):
            raise ValueError(f"modulus d={self.d} is not prime")
        if self.nu.d != self.d or len(self.nu) != self.m:
            raise ValueError("weight string does not match (m, d)")
        if any(v == 0 for v in self.nu.digits):
            raise ValueError("game weights must be nonzero")
        if self.f is not None and self.f.d != self.d:
            raise ValueError("relabeling acts on the wrong number of outputs")

    @classmethod
    def unit(cls, m: int, d: int, k: int = 1) -> "GameSpec":
        """The plain modulo game: all weights 1, no relabeling."""
        return cls(m, d, DitString.ones(m, d), None, k)


@dataclass(frozen=True, eq=False)
class ConditionalDistribution:
    """Exact table ``P(b | x)`` for all b in Z_d and all x in Z_d^m.

    ``table`` has shape ``(d**m, d)``: row = input index (little-endian in
    the first box), column = Bob's output.
    """

    m: int
    d: int
    table: np.ndarray

    def __post_init__(self):
        if not is_prime(self.d):
            raise ValueError(f"modulus d={self.d} is not prime")
        table = np.asarray(self.table, dtype=float)
        if table.shape != (self.d**self.m, self.d):
            raise ValueError(
                f"table shape {table.shape} != ({self.d**self.m}, {self.d})")
        if table.min() < -1e-12 or table.max() > 1 + 1e-12:
            raise ValueError("probabilities outside [0, 1]")
        rows = table.sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > 1e-10:
            raise ValueError("rows do not sum to one")
        object.__setattr__(self, "table", table)


def all_inputs(m: int, d: int) -> np.ndarray:
    """All input strings as an ``(d**m, m)`` int array, first box fastest."""
    idx = np.arange(d**m)
    return (idx[:, None] // d ** np.arange(m)) % d


def input_index(x, d: int) -> int:
    """Flat row index of one input string (inverse of :func:`all_inputs`)."""
    xs = digits_of(x, d)
    return int(sum(v * d**j for j, v in enumerate(xs)))


def modulo_targets(m: int, d: int, nu) -> np.ndarray:
    """Weighted modulo of every input string, aligned with table rows."""
    ws = np.asarray(digits_of(nu, d))
    return (all_inputs(m, d) @ ws) % d


def uniform_distribution(m: int, d: int) -> ConditionalDistribution:
    return ConditionalDistribution(m, d, np.full((d**m, d), 1.0 / d))


def random_distribution(m: int, d: int, rng) -> ConditionalDistribution:
    """Row-normalized random table (generic: all duals typically nonzero)."""
    table = rng.random((d**m, d)) + 1e-3
    table /= table.sum(axis=1, keepdims=True)
    return ConditionalDistribution(m, d, table)


def delta_distribution(m: int, d: int, nu=None) -> ConditionalDistribution:
    """The exact decoder ``P(b|x) = 1 iff b = weighted modulo of x``."""
    if nu is None:
        nu = DitString.ones(m, d)
    table = np.zeros((d**m, d))
    table[np.arange(d**m), modulo_targets(m, d, nu)] = 1.0
    return ConditionalDistribution(m, d, table)


def relabel_outputs(dist: ConditionalDistribution,
                    f: Permutation) -> ConditionalDistribution:
    """The distribution after Bob relabels his output ``b -> f(b)``."""
    if f.d != dist.d:
        raise ValueError("relabeling size does not match output alphabet")
    table = np.empty_like(dist.table)
    for b in range(dist.d):
        table[:, f(b)] = dist.table[:, b]
    return ConditionalDistribution(dist.m, dist.d, table)


def win_probability(dist: ConditionalDistribution, spec: GameSpec) -> float:
    """Average probability that Bob outputs the (relabeled) weighted modulo."""
    if (dist.m, dist.d) != (spec.m, spec.d):
        raise ValueError("distribution and game dimensions do not match")
    targets = modulo_targets(spec.m, spec.d, spec.nu)
    if spec.f is not None:
        targets = np.asarray([spec.f(int(s)) for s in targets])
    return float(dist.table[np.arange(dist.table.shape[0]), targets].mean())


def interference_term(dist: ConditionalDistribution, spec: GameSpec) -> float:
    """Win probability minus the random-guess baseline 1/d.

    Lies in ``[-1/d, 1 - 1/d]``; zero for any strategy that ignores at
    least one weighted box.
    """
    return win_probability(dist, spec) - 1.0 / spec.d


def dual_term(dist: ConditionalDistribution, nu, b: int,
              alpha: int = 1) -> complex:
    """Fourier-weighted average ``(1/d^m) sum_x omega^(alpha nu.x) P(b|x)``.

    ``alpha`` ranges over ``{1, ..., d-1}``; the degenerate exponent
    ``alpha = 0`` is rejected.  Vanishing of all dual terms of a weight
    string (for every b and alpha) is equivalent to the vanishing of the
    corresponding game terms under every relabeling.
    """
    d = dist.d
    alpha = int(alpha)
    if not 1 <= alpha < d:
        raise ValueError(f"alpha must lie in 1..{d - 1}, got {alpha}")
    if not 0 <= int(b) < d:
        raise ValueError(f"outcome {b} outside alphabet")
    ws = digits_of(nu, d)
    if len(ws) != dist.m:
        raise ValueError("weight string length does not match box count")
    s = modulo_targets(dist.m, d, ws)
    phases = np.exp(2j * np.pi * ((alpha * s) % d) / d)
    return complex(phases @ dist.table[:, int(b)] / d**dist.m)


def modulo_marginal_matrix(dist: ConditionalDistribution, nu) -> np.ndarray:
    """Column-stochastic d x d matrix ``P[b, s]`` of output vs target modulo.

    Entry ``(b, s)`` averages ``P(b|x)`` over inputs whose weighted modulo
    is ``s``, normalized by ``d**(m-1)`` (each modulo class has exactly
    ``d**(m-1)`` members for nonzero weights and prime d).
    """
    d = dist.d
    s = modulo_targets(dist.m, d, digits_of(nu, d))
    out = np.zeros((d, d))
    for cls in range(d):
        rows = dist.table[s == cls]
        out[:, cls] = rows.sum(axis=0) / d ** (dist.m - 1)
    return out


def game_dual_equivalence(dist: ConditionalDistribution, nu,
                          tol: float = ORDER_TOL) -> tuple[bool, bool]:
    """Evaluate both sides of the game/dual equivalence for one weight string.

    Returns ``(game_side_vanishes, dual_side_vanishes)`` where the game
    side enumerates all d! output relabelings and the dual side all
    (b, alpha) pairs.  The two booleans agree for every distribution; the
    pair is returned unreduced so tests can assert that agreement.
    """
    d = dist.d
    if d > MAX_PERMUTATION_D:
        raise ValueError(
            f"relabeling enumeration capped at d <= {MAX_PERMUTATION_D}")
    marginal = modulo_marginal_matrix(dist, nu)
    game_side = True
    for image in permutations(range(d)):
        win = sum(marginal[image[s], s] for s in range(d)) / d
        if abs(win - 1.0 / d) > tol:
            game_side = False
            break
    dual_side = True
    for alpha in range(1, d):
        for b in range(d):
            if abs(dual_term(dist, nu, b, alpha)) > tol:
                dual_side = False
                break
        if not dual_side:
            break
    return game_side, dual_side


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """Coefficients of each outcome's table over the rotated product basis.

    ``coefficients[nu_index, b]`` is the component of ``P(b|.)`` along the
    weight string encoded by ``nu_index`` (same little-endian layout as
    input rows).  The transform is unitary, so the inverse reconstructs
    the source table exactly up to roundoff.
    """

    m: int
    d: int
    coefficients: np.ndarray

    def coefficient(self, nu, b: int) -> complex:
        return complex(self.coefficients[input_index(nu, self.d), int(b)])

    def weights(self) -> np.ndarray:
        """Nonzero-digit count of every weight string, aligned with rows."""
        return np.count_nonzero(all_inputs(self.m, self.d), axis=1)


def fourier_spectrum(dist: ConditionalDistribution) -> FourierSpectrum:
    """Unitary discrete Fourier transform of each ``P(b|.)`` over Z_d^m."""
    m, d = dist.m, dist.d
    coeffs = np.empty((d**m, d), dtype=complex)
    for b in range(d):
        grid = dist.table[:, b].reshape((d,) * m, order="F")
        lam = np.fft.ifftn(grid, norm="ortho")
        coeffs[:, b] = lam.reshape(-1, order="F")
    return FourierSpectrum(m, d, coeffs)


def inverse_fourier(spectrum: FourierSpectrum) -> np.ndarray:
    """Reconstruct the probability table from a spectrum (roundtrip check)."""
    m, d = spectrum.m, spectrum.d
    table = np.empty((d**m, d))
    for b in range(d):
        grid = spectrum.coefficients[:, b].reshape((d,) * m, order="F")
        back = np.fft.fftn(grid, norm="ortho")
        table[:, b] = back.reshape(-1, order="F").real
    return table


def algebraic_order(dist: ConditionalDistribution,
                    tol: float = ORDER_TOL) -> int:
    """Largest number of boxes any surviving spectral line couples.

    Zero for input-independent distributions.  A distribution of
    algebraic order n is a linear combination of functions of at most n
    inputs, and conversely.
    """
    spectrum = fourier_spectrum(dist)
    weights = spectrum.weights()
    alive = np.abs(spectrum.coefficients).max(axis=1) > tol
    alive[0] = False  # constant component carries no input dependence
    if not alive.any():
        return 0
    return int(weights[alive].max())


def synthesize_order_n_distribution(
        m: int, d: int, n: int, seed: int,
        headroom: float = 0.9) -> tuple[ConditionalDistribution, bool]:
    """Random distribution whose spectrum is supported on weight <= n.

    Samples a random spectrum, zeroes every coefficient coupling more
    than ``n`` boxes, enforces normalization across outcomes, inverse
    transforms, and mixes with the uniform table so all entries stay
    nonnegative (mixing weight chosen adaptively from the worst entry).

    Returns the distribution and a flag telling whether a weight-n
    coefficient survived, i.e. whether the order is exactly n rather
    than merely bounded by it.
    """
    if not 0 <= n <= m:
        raise ValueError(f"target order {n} outside 0..{m}")
    rng = np.random.default_rng(seed)
    shape = (d,) * m
    weights = np.count_nonzero(all_inputs(m, d), axis=1).reshape(shape,
                                                                 order="F")
    spectra = []
    for _ in range(d):
        lam = np.fft.ifftn(rng.random(shape), norm="ortho")
        lam[weights > n] = 0.0
        spectra.append(lam)
    spectra = np.stack(spectra)
    spectra -= spectra.mean(axis=0, keepdims=True)  # rows will sum to one

    bumps = np.stack([np.fft.fftn(lam, norm="ortho").real for lam in spectra])
    peak = float(np.abs(bumps).max())
    table = np.full((d**m, d), 1.0 / d)
    if peak > 1e-14:
        eps = headroom / (d * peak)
        for b in range(d):
            table[:, b] += eps * bumps[b].reshape(-1, order="F")
    achieved = bool(peak > 1e-14
                    and np.abs(spectra)[:, weights == n].max() > 1e-12)
    if n == 0:
        # only the constant line exists; it is b-dependent but weight zero
        achieved = bool(peak > 1e-14)
    return ConditionalDistribution(m, d, table), achieved


def product_distribution(a: ConditionalDistribution,
                         b: ConditionalDistribution,
                         mode: str = "disjoint") -> ConditionalDistribution:
    """Combine two independent processes, Bob adding the outputs mod d.

    ``mode="disjoint"``: the processes address disjoint box sets; the
    result is over ``m_a + m_b`` boxes with the first factor's boxes
    first.  ``mode="shared"``: both processes see the same m boxes.
    """
    if a.d != b.d:
        raise ValueError(f"modulus mismatch: {a.d} != {b.d}")
    d = a.d
    if mode == "disjoint":
        rows = a.table.shape[0] * b.table.shape[0]
        table = np.zeros((rows, d))
        for u in range(d):
            for v in range(d):
                table[:, (u + v) % d] += np.kron(b.table[:, v], a.table[:, u])
        return ConditionalDistribution(a.m + b.m, d, table)
    if mode == "shared":
        if a.m != b.m:
            raise ValueError("shared mode needs equal box counts")
        table = np.zeros_like(a.table)
        for u in range(d):
            for v in range(d):
                table[:, (u + v) % d] += a.table[:, u] * b.table[:, v]
        return ConditionalDistribution(a.m, d, table)
    raise ValueError(f"unknown composition mode {mode!r}")


@dataclass(frozen=True)
class InterferenceReport:
    """Summary of one distribution: game terms, duals, order, witness."""

    m: int
    d: int
    game_terms: dict = field(default_factory=dict)    # nu digits -> float
    dual_terms: dict = field(default_factory=dict)    # (nu digits, b) -> complex
    algebraic_order: int = 0
    witness_particles: int | None = None


def interference_report(dist: ConditionalDistribution,
                        tol: float = ORDER_TOL,
                        max_game_terms: int = 1024,
                        dual_floor: float = 0.0) -> InterferenceReport:
    """Compute every game term, every dual term, the order and the witness.

    Game terms cover all weight strings with no zero digit (identity
    relabeling) as long as there are at most ``max_game_terms`` of them,
    otherwise just the unit string.  Dual terms with modulus at most
    ``dual_floor`` are omitted (exact zeros dominate sparse spectra).
    """
    m, d = dist.m, dist.d
    spectrum = fourier_spectrum(dist)
    weights = spectrum.weights()
    scale = d ** (m / 2)

    game_terms = {}
    strings = all_inputs(m, d)
    full = np.flatnonzero(weights == m)
    if (d - 1) ** m > max_game_terms:
        candidates = [tuple([1] * m)]
    else:
        candidates = [tuple(int(v) for v in strings[i]) for i in full]
    for digits in candidates:
        spec = GameSpec(m, d, DitString(d, digits))
        game_terms[digits] = interference_term(dist, spec)

    dual_terms = {}
    for i in range(d**m):
        digits = tuple(int(v) for v in strings[i])
        for b in range(d):
            val = complex(spectrum.coefficients[i, b]) / scale
            if abs(val) > dual_floor:
                dual_terms[(digits, b)] = val

    alive = np.abs(spectrum.coefficients).max(axis=1) > tol
    alive[0] = False
    order = int(weights[alive].max()) if alive.any() else 0
    return InterferenceReport(m, d, game_terms, dual_terms, order,
                              math.ceil(order / 2))


def save_distribution(dist: ConditionalDistribution, path) -> None:
    """Write the flat table file: header ``m d`` then one line per input."""
    lines = [f"{dist.m} {dist.d}"]
    for row in dist.table:
        lines.append(" ".join(repr(float(p)) for p in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_distribution(path) -> ConditionalDistribution:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        m, d = int(header[0]), int(header[1])
        table = np.array([[float(tok) for tok in fh.readline().split()]
                          for _ in range(d**m)])
    return ConditionalDistribution(m, d, table)
