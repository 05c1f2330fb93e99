"""Exact density-operator simulation of systems traversing controlled boxes.

Each of the ``k`` distinguishable systems carries a which-box (path)
degree of freedom with ``m`` levels and an internal degree of freedom.
The composite Hilbert space is laid out as

    (path_1 x ... x path_k)  tensor  (internal_1 x ... x internal_k),

so path configurations index diagonal blocks and box operations compile
into block-diagonal Kraus operators: each box applies a completely
positive (possibly trace-decreasing) map to the internal factor,
conditioned on the path factor pointing at it.

Simulation is exact and enumerative; the total dimension is capped at
4096 to keep full input sweeps under a minute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import games
from .numkit import dagger, digits_of, is_prime, permute_kron_factors

DIMENSION_CAP = 4096


class DimensionCapError(ValueError):
    """Raised when a requested composite space exceeds the 4096 cap."""


@dataclass(frozen=True)
class PathedHilbert:
    """Shape of the state space: k systems, m paths each, internal dims."""

    k: int
    m: int
    internal_dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "internal_dims",
                           tuple(int(v) for v in self.internal_dims))
        if self.k < 1 or self.m < 1:
            raise ValueError("need at least one system and one path")
        if len(self.internal_dims) != self.k:
            raise ValueError("one internal dimension per system required")
        if any(v < 1 for v in self.internal_dims):
            raise ValueError("internal dimensions must be positive")
        if self.dim > DIMENSION_CAP:
            raise DimensionCapError(
                f"total dimension {self.dim} exceeds cap {DIMENSION_CAP}")

    @property
    def config_dim(self) -> int:
        """Dimension of the joint path factor (m**k configurations)."""
        return self.m**self.k

    @property
    def internal_dim(self) -> int:
        return int(np.prod(self.internal_dims))

    @property
    def dim(self) -> int:
        return self.config_dim * self.internal_dim

    def configs(self):
        """All joint path configurations (i_1, ..., i_k), first system slowest."""
        return product(range(self.m), repeat=self.k)

    def config_index(self, config) -> int:
        idx = 0
        for i in config:
            idx = idx * self.m + int(i)
        return idx


@dataclass(frozen=True, eq=False)
class DensityState:
    """A (possibly sub-normalized) density operator on a pathed space."""

    hilbert: PathedHilbert
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        n = self.hilbert.dim
        if rho.shape != (n, n):
            raise ValueError(f"state shape {rho.shape} != ({n}, {n})")
        if np.max(np.abs(rho - dagger(rho))) > 1e-10:
            raise ValueError("state is not Hermitian")
        if np.linalg.eigvalsh((rho + dagger(rho)) / 2).min() < -1e-9:
            raise ValueError("state is not positive semidefinite")
        tr = float(np.trace(rho).real)
        if tr > 1 + 1e-10:
            raise ValueError(f"trace {tr} exceeds one")
        object.__setattr__(self, "rho", rho)

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)


def pure_state(hilbert: PathedHilbert, vector) -> DensityState:
    """Density operator of a normalized pure state vector."""
    v = np.asarray(vector, dtype=complex).reshape(-1)
    if v.shape[0] != hilbert.dim:
        raise ValueError("vector length does not match space dimension")
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        raise ValueError("cannot normalize the zero vector")
    v = v / norm
    return DensityState(hilbert, np.outer(v, v.conj()))


def path_superposition_state(m: int, amplitudes=None, internal_dim: int = 1,
                             internal_vector=None) -> DensityState:
    """Single system: path amplitudes tensor a pure internal state.

    With no arguments beyond ``m`` this is the uniform superposition over
    all paths with a trivial internal factor.
    """
    hilbert = PathedHilbert(1, m, (internal_dim,))
    if amplitudes is None:
        amplitudes = np.full(m, 1.0 / math.sqrt(m))
    a = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if a.shape[0] != m:
        raise ValueError("one amplitude per path required")
    if internal_vector is None:
        internal = np.zeros(internal_dim, dtype=complex)
        internal[0] = 1.0
    else:
        internal = np.asarray(internal_vector, dtype=complex).reshape(-1)
    return pure_state(hilbert, np.kron(a, internal))


def definite_path_state(m: int, path: int, internal_dim: int = 1,
                        internal_vector=None) -> DensityState:
    """Single system parked at one box (a classical, path-diagonal state)."""
    amplitudes = np.zeros(m)
    amplitudes[int(path)] = 1.0
    return path_superposition_state(m, amplitudes, internal_dim,
                                    internal_vector)


@dataclass(frozen=True, eq=False)
class Povm:
    """A positive operator-valued measure: PSD effects summing to identity."""

    effects: tuple

    def __post_init__(self):
        effects = tuple(np.asarray(e, dtype=complex) for e in self.effects)
        if not effects:
            raise ValueError("a measurement needs at least one effect")
        n = effects[0].shape[0]
        total = np.zeros((n, n), dtype=complex)
        for e in effects:
            if e.shape != (n, n):
                raise ValueError("effects must share a square shape")
            if np.max(np.abs(e - dagger(e))) > 1e-9:
                raise ValueError("effect is not Hermitian")
            if np.linalg.eigvalsh((e + dagger(e)) / 2).min() < -1e-9:
                raise ValueError("effect is not positive semidefinite")
            total += e
        if np.max(np.abs(total - np.eye(n))) > 1e-9:
            raise ValueError("effects do not sum to the identity")
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def __len__(self):
        return len(self.effects)


def _check_kraus_set(ops, dim: int, where: str) -> tuple:
    ops = tuple(np.asarray(op, dtype=complex) for op in ops)
    if not ops:
        raise ValueError(f"{where}: empty Kraus list")
    total = np.zeros((dim, dim), dtype=complex)
    for op in ops:
        if op.shape != (dim, dim):
            raise ValueError(f"{where}: operator shape {op.shape} != "
                             f"({dim}, {dim})")
        total += dagger(op) @ op
    if np.linalg.eigvalsh((total + dagger(total)) / 2).max() > 1 + 1e-9:
        raise ValueError(f"{where}: Kraus operators exceed a CP contraction")
    return ops


@dataclass(frozen=True, eq=False)
class BoxProgram:
    """Input-conditioned local operations for each of the m boxes.

    ``box_kraus[i][x]`` lists the Kraus operators the i-th box applies to
    a single system's internal factor when its input is ``x``.  Each list
    may be trace-decreasing (boxes can destroy the system) but must stay
    completely positive with ``sum B^dag B <= 1``.

    ``joint_kraus`` instead describes correlated multi-system operations:
    it maps ``(config, inputs_at_config)`` to Kraus operators on the
    composite internal space, where ``config = (i_1, ..., i_k)`` are the
    systems' paths and ``inputs_at_config = (x_{i_1}, ..., x_{i_k})``.
    Exactly one of the two forms must be provided.
    """

    m: int
    d: int
    internal_dim: int = 1
    box_kraus: tuple | None = None
    k: int = 1
    internal_dims: tuple | None = None
    joint_kraus: dict | None = None

    def __post_init__(self):
        if not is_prime(self.d):
            raise ValueError(f"modulus d={self.d} is not prime")
        if (self.box_kraus is None) == (self.joint_kraus is None):
            raise ValueError("provide exactly one of box_kraus, joint_kraus")
        if self.box_kraus is not None:
            boxes = []
            if len(self.box_kraus) != self.m:
                raise ValueError("one Kraus table per box required")
            for i, per_input in enumerate(self.box_kraus):
                if len(per_input) != self.d:
                    raise ValueError(f"box {i}: one Kraus list per input")
                boxes.append(tuple(
                    _check_kraus_set(ops, self.internal_dim, f"box {i}")
                    for ops in per_input))
            object.__setattr__(self, "box_kraus", tuple(boxes))
        else:
            dims = tuple(int(v) for v in (self.internal_dims or ()))
            if len(dims) != self.k:
                raise ValueError("joint programs need internal_dims per system")
            object.__setattr__(self, "internal_dims", dims)
            full = int(np.prod(dims))
            checked = {}
            for (config, inputs), ops in self.joint_kraus.items():
                config = tuple(int(i) for i in config)
                inputs = tuple(int(x) for x in inputs)
                checked[(config, inputs)] = _check_kraus_set(
                    ops, full, f"config {config}")
            object.__setattr__(self, "joint_kraus", checked)


def identity_program(m: int, d: int, internal_dim: int = 1) -> BoxProgram:
    eye = np.eye(internal_dim, dtype=complex)
    return BoxProgram(m, d, internal_dim,
                      tuple(tuple((eye,) for _ in range(d))
                            for _ in range(m)))


def phase_program(m: int, d: int, phase_exponents) -> BoxProgram:
    """Scalar phase boxes: box i multiplies its branch by omega**e[i][x].

    ``phase_exponents[i][x]`` is an integer exponent of the d-th root of
    unity; internal dimension is one.
    """
    omega = np.exp(2j * np.pi / d)
    boxes = []
    for i in range(m):
        per_input = []
        for x in range(d):
            op = np.array([[omega ** int(phase_exponents[i][x])]])
            per_input.append((op,))
        boxes.append(tuple(per_input))
    return BoxProgram(m, d, 1, tuple(boxes))


def slit_program(m: int, d: int, internal_dim: int = 1) -> BoxProgram:
    """Open/block boxes: input 0 transmits, anything else annihilates."""
    eye = np.eye(internal_dim, dtype=complex)
    zero = np.zeros((internal_dim, internal_dim), dtype=complex)
    boxes = []
    for _ in range(m):
        per_input = [(eye,)] + [(zero,) for _ in range(d - 1)]
        boxes.append(tuple(per_input))
    return BoxProgram(m, d, internal_dim, tuple(boxes))


def mark_program(m: int, d: int) -> BoxProgram:
    """Boxes that stamp their input onto a d-level internal mark.

    Each box resets the internal factor to the basis state labeled by its
    input (Kraus ``|x><j|`` for all j).  For ``d = 2`` this reads as
    open/block with an explicit absorbed flag instead of lost trace.
    """
    basis = np.eye(d, dtype=complex)
    boxes = []
    for _ in range(m):
        per_input = []
        for x in range(d):
            ops = tuple(np.outer(basis[x], basis[j]) for j in range(d))
            per_input.append(ops)
        boxes.append(tuple(per_input))
    return BoxProgram(m, d, d, tuple(boxes))


def _single_system_kraus(program: BoxProgram, x, internal_dim: int) -> list:
    """Compile one system's controlled Kraus list for inputs ``x``.

    Boxes share the Kraus index (shorter per-box lists are padded with
    zero operators), giving block-diagonal operators
    ``M_s = sum_i |i><i| (x) B_i^(s)(x_i)``.
    """
    m = program.m
    xs = digits_of(x, program.d)
    per_box = [program.box_kraus[i][xs[i]] for i in range(m)]
    count = max(len(ops) for ops in per_box)
    dim = m * internal_dim
    out = []
    for s in range(count):
        op = np.zeros((dim, dim), dtype=complex)
        for i in range(m):
            if s < len(per_box[i]):
                sl = slice(i * internal_dim, (i + 1) * internal_dim)
                op[sl, sl] = per_box[i][s]
        out.append(op)
    return out


def controlled_channel(program: BoxProgram, x,
                       hilbert: PathedHilbert) -> list:
    """Compile the full-space Kraus operators for one input assignment.

    For one system this conditions each box's Kraus list on the path
    factor.  For several systems with per-box local programs the channel
    is the tensor product of the per-system controlled channels; with a
    joint program the supplied composite-internal operators are placed on
    the diagonal path-configuration blocks directly.  The compiled set
    always satisfies ``sum M^dag M <= 1`` (within 1e-9).
    """
    xs = digits_of(x, program.d)
    if len(xs) != program.m or program.m != hilbert.m:
        raise ValueError("input string does not match the box count")
    if program.joint_kraus is not None:
        if hilbert.k != program.k or hilbert.internal_dims != program.internal_dims:
            raise ValueError("joint program does not match the state space")
        return _joint_kraus(program, xs, hilbert)
    if hilbert.k == 1:
        if hilbert.internal_dims[0] != program.internal_dim:
            raise ValueError("program internal dimension mismatch")
        return _single_system_kraus(program, xs, program.internal_dim)
    if any(dim != program.internal_dim for dim in hilbert.internal_dims):
        raise ValueError("per-box programs need equal internal dimensions")
    single = _single_system_kraus(program, xs, program.internal_dim)
    k, m, idim = hilbert.k, hilbert.m, program.internal_dim
    dims = [m, idim] * k
    order = [2 * p for p in range(k)] + [2 * p + 1 for p in range(k)]
    out = []
    for combo in product(single, repeat=k):
        op = combo[0]
        for factor in combo[1:]:
            op = np.kron(op, factor)
        out.append(permute_kron_factors(op, dims, order))
    return out


def _joint_kraus(program: BoxProgram, xs, hilbert: PathedHilbert) -> list:
    full = hilbert.internal_dim
    blocks = {}
    count = 0
    for config in hilbert.configs():
        key = (config, tuple(xs[i] for i in config))
        try:
            ops = program.joint_kraus[key]
        except KeyError:
            raise ValueError(f"joint program has no entry for {key}")
        blocks[config] = ops
        count = max(count, len(ops))
    dim = hilbert.dim
    out = []
    for s in range(count):
        op = np.zeros((dim, dim), dtype=complex)
        for config, ops in blocks.items():
            if s < len(ops):
                c = hilbert.config_index(config)
                sl = slice(c * full, (c + 1) * full)
                op[sl, sl] = ops[s]
        out.append(op)
    return out


def evolve(state: DensityState, program: BoxProgram, x) -> DensityState:
    """Send the state through the boxes for one input assignment."""
    kraus = controlled_channel(program, x, state.hilbert)
    rho = np.zeros_like(state.rho)
    for op in kraus:
        rho += op @ state.rho @ dagger(op)
    rho = (rho + dagger(rho)) / 2
    return DensityState(state.hilbert, rho)


def classical_dephase(state: DensityState) -> DensityState:
    """Erase coherence between joint path configurations.

    Keeps only the diagonal blocks in the configuration basis, which is
    exactly the classical restriction (no spatial coherence; internal
    degrees of freedom stay quantum).  Idempotent.
    """
    h = state.hilbert
    c, i = h.config_dim, h.internal_dim
    out = np.zeros_like(state.rho)
    for cfg in range(c):
        sl = slice(cfg * i, (cfg + 1) * i)
        out[sl, sl] = state.rho[sl, sl]
    return DensityState(h, out)


def measure(state: DensityState, povm: Povm,
            no_detection_outcome: int | None = 0) -> np.ndarray:
    """Born-rule outcome probabilities for one state.

    Raw probabilities sum to the state's trace.  When the boxes were
    lossy that trace falls short of one; the deficit is assigned to
    ``no_detection_outcome`` (Bob must output some dit even when nothing
    arrives).  Pass ``None`` to get the raw, unfolded probabilities.
    """
    if povm.dim != state.hilbert.dim:
        raise ValueError("measurement dimension does not match the state")
    probs = np.array([float(np.trace(e @ state.rho).real)
                      for e in povm.effects])
    if probs.min() < -1e-10:
        raise ValueError("negative outcome probability beyond tolerance")
    if no_detection_outcome is not None:
        probs[int(no_detection_outcome)] += 1.0 - state.trace
    return probs


def run_experiment(prep: DensityState, program: BoxProgram, povm: Povm,
                   d: int, m: int,
                   no_detection_outcome: int = 0
                   ) -> games.ConditionalDistribution:
    """Full protocol sweep: evolve and measure for every input string.

    Returns the exact conditional table over all ``d**m`` inputs, rows
    renormalized after no-detection folding.
    """
    if len(povm) != d:
        raise ValueError(f"need a {d}-outcome measurement, got {len(povm)}")
    if program.m != m or program.d != d:
        raise ValueError("program does not match the requested game size")
    table = np.empty((d**m, d))
    for row, x in enumerate(games.all_inputs(m, d)):
        state = evolve(prep, program, x)
        probs = measure(state, povm, no_detection_outcome)
        probs = np.clip(probs, 0.0, None)
        total = probs.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"outcome probabilities sum to {total}")
        table[row] = probs / total
    return games.ConditionalDistribution(m, d, table)


def modulo_average_state(prep: DensityState, program: BoxProgram, nu,
                         target: int) -> DensityState:
    """Average of the evolved states over inputs with one weighted modulo.

    Normalized by ``d**(m-1)``, the size of each modulo class.
    """
    d, m = program.d, program.m
    ws = digits_of(nu, d)
    targets = games.modulo_targets(m, d, ws)
    rho = np.zeros_like(prep.rho)
    for row, x in enumerate(games.all_inputs(m, d)):
        if targets[row] == int(target) % d:
            rho += evolve(prep, program, x).rho
    return DensityState(prep.hilbert, rho / d ** (m - 1))


def average_state_collapse_check(prep: DensityState, program: BoxProgram,
                                 nu, m: int, d: int,
                                 tol: float = 1e-8) -> bool:
    """Whether all modulo-averaged states coincide (entrywise within tol).

    True whenever the box count exceeds twice the system count; for
    two-box phase strategies the averages are orthogonal and this fails.
    """
    if program.m != m or program.d != d:
        raise ValueError("program does not match the requested game size")
    averages = [modulo_average_state(prep, program, nu, t).rho
                for t in range(d)]
    worst = 0.0
    for s in range(d):
        for t in range(s + 1, d):
            worst = max(worst, float(np.abs(averages[s] - averages[t]).max()))
    return worst <= tol


def random_kraus_set(dim: int, rng, count: int = 2,
                     trace_factor: float = 1.0) -> tuple:
    """Random CP map Kraus operators with ``sum B^dag B = trace_factor * 1``."""
    ops = [rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
           for _ in range(count)]
    total = sum(dagger(op) @ op for op in ops)
    evals, vecs = np.linalg.eigh(total)
    inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(evals)) @ dagger(vecs)
    scale = math.sqrt(trace_factor)
    return tuple(scale * op @ inv_sqrt for op in ops)


def random_box_program(m: int, d: int, internal_dim: int, rng,
                       kraus_per_map: int = 2, lossy: bool = True
                       ) -> BoxProgram:
    """Random per-box program; lossy boxes shed up to 40% of the trace."""
    boxes = []
    for _ in range(m):
        per_input = []
        for _ in range(d):
            factor = rng.uniform(0.6, 1.0) if lossy else 1.0
            per_input.append(random_kraus_set(internal_dim, rng,
                                              kraus_per_map, factor))
        boxes.append(tuple(per_input))
    return BoxProgram(m, d, internal_dim, tuple(boxes))


def random_joint_program(m: int, d: int, k: int, internal_dims, rng,
                         kraus_per_map: int = 2, lossy: bool = True
                         ) -> BoxProgram:
    """Random correlated multi-system program (App-style joint operators).

    Every path configuration and input combination gets its own random
    CP map on the composite internal space, so internal degrees of
    freedom of different systems may become entangled.
    """
    dims = tuple(int(v) for v in internal_dims)
    full = int(np.prod(dims))
    joint = {}
    for config in product(range(m), repeat=k):
        for inputs in product(range(d), repeat=k):
            factor = rng.uniform(0.6, 1.0) if lossy else 1.0
            joint[(config, inputs)] = random_kraus_set(
                full, rng, kraus_per_map, factor)
    return BoxProgram(m, d, k=k, internal_dims=dims, joint_kraus=joint)


def random_density_state(hilbert: PathedHilbert, rng) -> DensityState:
    """Ginibre-random full-rank state on the composite space."""
    n = hilbert.dim
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = g @ dagger(g)
    return DensityState(hilbert, rho / np.trace(rho).real)


def computational_povm(dim: int, groups) -> Povm:
    """Diagonal POVM whose b-th effect sums the basis projectors in groups[b]."""
    effects = []
    for members in groups:
        e = np.zeros((dim, dim), dtype=complex)
        for j in members:
            e[int(j), int(j)] = 1.0
        effects.append(e)
    return Povm(tuple(effects))
