"""Dense complex linear algebra and modular arithmetic primitives.

Everything in this package runs at desk scale (operators of dimension at
most a few thousand, exact enumeration over at most a few thousand input
strings), so matrices are plain dense numpy arrays in row-major order and
no sparse or arbitrary-precision path exists.

Tolerance conventions used across the package:

* ``TOL_EXACT`` (1e-9) for "equals zero" checks on analytically exact
  quantities,
* ``TOL_CHANNEL`` (1e-7) where randomized channels accumulate roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TOL_EXACT = 1e-9
TOL_CHANNEL = 1e-7


def is_prime(d: int) -> bool:
    """Deterministic primality by trial division (moduli here are tiny)."""
    d = int(d)
    if d < 2:
        raise ValueError(f"primality is only defined for d >= 2, got {d}")
    if d in (2, 3):
        return True
    if d % 2 == 0:
        return False
    f = 3
    while f * f <= d:
        if d % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class DitString:
    """An ordered string of values in ``{0, ..., d-1}`` for prime ``d``."""

    d: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.d):
            raise ValueError(f"modulus d={self.d} is not prime")
        object.__setattr__(self, "digits", tuple(int(v) for v in self.digits))
        for v in self.digits:
            if not 0 <= v < self.d:
                raise ValueError(f"digit {v} outside range [0, {self.d})")

    def __len__(self):
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    @classmethod
    def zeros(cls, m: int, d: int) -> "DitString":
        return cls(d, (0,) * m)

    @classmethod
    def ones(cls, m: int, d: int) -> "DitString":
        """The unit weight string (all digits 1)."""
        return cls(d, (1,) * m)

    @property
    def weight(self) -> int:
        """Number of nonzero digits."""
        return sum(1 for v in self.digits if v != 0)


@dataclass(frozen=True)
class Permutation:
    """A bijection on ``{0, ..., d-1}`` given by its image list."""

    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(int(v) for v in self.image))
        if sorted(self.image) != list(range(len(self.image))):
            raise ValueError(f"image {self.image} is not a bijection")

    @classmethod
    def identity(cls, d: int) -> "Permutation":
        return cls(tuple(range(d)))

    @property
    def d(self) -> int:
        return len(self.image)

    def __call__(self, s: int) -> int:
        return self.image[s]

    def inverse(self) -> "Permutation":
        inv = [0] * self.d
        for s, t in enumerate(self.image):
            inv[t] = s
        return Permutation(tuple(inv))


def digits_of(nu, d: int | None = None) -> tuple[int, ...]:
    """Coerce a DitString or plain int sequence to a digit tuple.

    When ``d`` is given the digits are range checked against it.
    """
    if isinstance(nu, DitString):
        if d is not None and nu.d != d:
            raise ValueError(f"dit-string modulus {nu.d} != expected {d}")
        return nu.digits
    digits = tuple(int(v) for v in nu)
    if d is not None:
        for v in digits:
            if not 0 <= v < d:
                raise ValueError(f"digit {v} outside range [0, {d})")
    return digits


def weighted_mod_sum(x, nu, d: int | None = None) -> int:
    """Weighted sum of the digits of ``x`` modulo ``d``.

    ``x`` and ``nu`` must share length (and modulus when both are
    DitStrings).  This is the referee's target value in every game.
    """
    if isinstance(x, DitString) and isinstance(nu, DitString):
        if x.d != nu.d:
            raise ValueError(f"modulus mismatch: {x.d} != {nu.d}")
        d = x.d
    elif d is None:
        raise ValueError("modulus d required when inputs are plain sequences")
    xs = digits_of(x, d)
    ws = digits_of(nu, d)
    if len(xs) != len(ws):
        raise ValueError(f"length mismatch: {len(xs)} != {len(ws)}")
    return int(sum(w * v for w, v in zip(ws, xs)) % d)


def fourier_matrix(d: int) -> np.ndarray:
    """The d-dimensional Fourier matrix, entries ``omega**(l*k) / sqrt(d)``.

    Only prime dimensions are accepted; unitary to machine precision.
    """
    if not is_prime(d):
        raise ValueError(f"fourier_matrix requires prime d, got {d}")
    l = np.arange(d)
    return np.exp(2j * np.pi * np.outer(l, l) / d) / np.sqrt(d)


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; dimensions multiply."""
    return np.kron(np.asarray(a), np.asarray(b))


def tensor_many(ops: Iterable[np.ndarray]) -> np.ndarray:
    """Left fold of tensor_product over a nonempty sequence of operators."""
    ops = list(ops)
    if not ops:
        raise ValueError("tensor_many needs at least one operator")
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def is_hermitian(a: np.ndarray, tol: float = TOL_EXACT) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and np.max(np.abs(a - dagger(a))) <= tol


def is_psd(a: np.ndarray, tol: float = TOL_EXACT) -> bool:
    """Positive semidefiniteness with an eigenvalue floor at ``-tol``."""
    a = np.asarray(a)
    if not is_hermitian(a, max(tol, 1e-8)):
        return False
    evals = np.linalg.eigvalsh((a + dagger(a)) / 2)
    return bool(evals.min() >= -tol)


def is_unitary(a: np.ndarray, tol: float = TOL_EXACT) -> bool:
    a = np.asarray(a)
    if a.shape[0] != a.shape[1]:
        return False
    return np.max(np.abs(dagger(a) @ a - np.eye(a.shape[0]))) <= tol


def permute_kron_factors(matrix: np.ndarray, dims: Sequence[int],
                         order: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of a Kronecker-structured operator.

    ``matrix`` acts on a space of dimension ``prod(dims)`` whose factors are
    listed in ``dims``; the result acts on the same space with factors laid
    out as ``dims[order[0]], dims[order[1]], ...``.
    """
    dims = list(dims)
    n = len(dims)
    order = list(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {order} is not a permutation of {n} factors")
    t = np.asarray(matrix).reshape(dims + dims)
    t = t.transpose(order + [n + p for p in order])
    total = int(np.prod(dims))
    return t.reshape(total, total)
