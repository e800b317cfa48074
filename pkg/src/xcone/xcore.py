"""Three-qubit X-shaped self-adjoint matrices.

An X-matrix ``X(a, b, z)`` is the 8x8 self-adjoint matrix, in the
lexicographic basis |000>, |001>, ..., |111>, with

* ``a[i]`` at diagonal position ``(i, i)`` for ``i = 0..3``,
* ``b[i]`` at diagonal position ``(7 - i, 7 - i)``,
* ``z[i]`` at ``(i, 7 - i)`` and ``conj(z[i])`` at ``(7 - i, i)``.

Indices are 0-based in code.  Index ``i`` labels the anti-diagonal pair of
basis vectors ``(v, ~v)`` where ``v`` is the binary expansion of ``i`` with
a leading 0 bit.  The same triple doubles as a witness ``X(s, t, u)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_TOL = 1e-9

PARTIES = ("A", "B", "C")


class InvalidInputError(ValueError):
    """Raised for malformed or non-finite input data."""


class DomainError(ValueError):
    """Raised when an inequality is evaluated outside its domain."""


def _as_reals(values: Iterable[float], name: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if len(out) != 4:
        raise InvalidInputError(f"{name} must have 4 entries, got {len(out)}")
    if not all(math.isfinite(v) for v in out):
        raise InvalidInputError(f"{name} has non-finite entries: {out}")
    return out


def _as_complexes(values: Iterable[complex], name: str) -> tuple[complex, ...]:
    out = []
    for v in values:
        if isinstance(v, (tuple, list)):
            if len(v) != 2:
                raise InvalidInputError(f"{name}: complex pairs must be [re, im]")
            v = complex(float(v[0]), float(v[1]))
        out.append(complex(v))
    if len(out) != 4:
        raise InvalidInputError(f"{name} must have 4 entries, got {len(out)}")
    if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in out):
        raise InvalidInputError(f"{name} has non-finite entries: {out}")
    return tuple(out)


@dataclass(frozen=True)
class XMatrix:
    """Immutable X-shaped matrix ``X(a, b, z)``.

    Supports addition, subtraction and scaling by real numbers, so cone
    combinations can be written directly.
    """

    a: tuple[float, ...]
    b: tuple[float, ...]
    z: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", _as_reals(self.a, "a"))
        object.__setattr__(self, "b", _as_reals(self.b, "b"))
        object.__setattr__(self, "z", _as_complexes(self.z, "z"))

    def __add__(self, other: XMatrix) -> XMatrix:
        if not isinstance(other, XMatrix):
            return NotImplemented
        return XMatrix(
            tuple(p + q for p, q in zip(self.a, other.a)),
            tuple(p + q for p, q in zip(self.b, other.b)),
            tuple(p + q for p, q in zip(self.z, other.z)),
        )

    def __sub__(self, other: XMatrix) -> XMatrix:
        if not isinstance(other, XMatrix):
            return NotImplemented
        return self + (-1.0) * other

    def __neg__(self) -> XMatrix:
        return (-1.0) * self

    def __mul__(self, c: float) -> XMatrix:
        if isinstance(c, complex) or not isinstance(c, (int, float, np.floating, np.integer)):
            return NotImplemented
        c = float(c)
        return XMatrix(
            tuple(c * v for v in self.a),
            tuple(c * v for v in self.b),
            tuple(c * v for v in self.z),
        )

    __rmul__ = __mul__

    def to_vector(self) -> np.ndarray:
        """Real 16-vector ``(a, b, Re z, Im z)``."""
        z = np.array(self.z, dtype=complex)
        return np.concatenate([self.a, self.b, z.real, z.imag])

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> XMatrix:
        v = np.asarray(v, dtype=float)
        if v.shape != (16,):
            raise InvalidInputError(f"expected a 16-vector, got shape {v.shape}")
        return cls(v[0:4], v[4:8], v[8:12] + 1j * v[12:16])

    @property
    def magnitude(self) -> float:
        """Largest absolute entry."""
        return max(max(abs(v) for v in self.a), max(abs(v) for v in self.b),
                   max(abs(v) for v in self.z))

    def frobenius_norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.a) + sum(v * v for v in self.b)
                         + 2.0 * sum(abs(v) ** 2 for v in self.z))

    def __repr__(self) -> str:
        return f"X(a={list(self.a)}, b={list(self.b)}, z={list(self.z)})"


ZERO = XMatrix((0.0,) * 4, (0.0,) * 4, (0.0,) * 4)


def make_x(a: Iterable[float], b: Iterable[float], z: Iterable[complex]) -> XMatrix:
    """Build ``X(a, b, z)``; raises InvalidInputError on bad shapes or NaN/inf."""
    return XMatrix(tuple(a), tuple(b), tuple(z))


def x_single(i: int, s: float, t: float, u: complex) -> XMatrix:
    """``X_i(s, t, u)``: the X-matrix supported on the single index ``i``."""
    a = [0.0] * 4
    b = [0.0] * 4
    z = [0j] * 4
    a[i], b[i], z[i] = s, t, u
    return XMatrix(a, b, z)


def ghz() -> XMatrix:
    """Unnormalized GHZ projector |000><000| + |111><111| + cross terms."""
    return XMatrix((1, 0, 0, 0), (1, 0, 0, 0), (1, 0, 0, 0))


def embed(x: XMatrix) -> np.ndarray:
    """Place ``x`` into a full 8x8 complex matrix."""
    h = np.zeros((8, 8), dtype=complex)
    for i in range(4):
        h[i, i] = x.a[i]
        h[7 - i, 7 - i] = x.b[i]
        h[i, 7 - i] = x.z[i]
        h[7 - i, i] = x.z[i].conjugate()
    return h


def as_hermitian8(h, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Validate an 8x8 self-adjoint matrix and return it as a complex array."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (8, 8):
        raise InvalidInputError(f"expected an 8x8 matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise InvalidInputError("matrix has non-finite entries")
    diff = np.abs(h - h.conj().T)
    scale = 1.0 + float(np.abs(h).max())
    if diff.max() > tol * scale:
        i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
        raise InvalidInputError(
            f"matrix is not self-adjoint: entry ({i + 1},{j + 1}) = {h[i, j]} "
            f"but conj of entry ({j + 1},{i + 1}) = {h[j, i].conjugate()}"
        )
    return h


def x_part(h) -> XMatrix:
    """Keep the diagonal and anti-diagonal of ``h``; drop everything else."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (8, 8):
        raise InvalidInputError(f"expected an 8x8 matrix, got shape {h.shape}")
    a = [h[i, i].real for i in range(4)]
    b = [h[7 - i, 7 - i].real for i in range(4)]
    # average the two mirror entries so slightly non-Hermitian input projects symmetrically
    z = [0.5 * (h[i, 7 - i] + h[7 - i, i].conjugate()) for i in range(4)]
    return XMatrix(a, b, z)


def off_x_norm(h) -> float:
    """Frobenius norm of the part of ``h`` outside the X pattern."""
    h = np.asarray(h, dtype=complex)
    mask = np.ones((8, 8), dtype=bool)
    idx = np.arange(8)
    mask[idx, idx] = False
    mask[idx, 7 - idx] = False
    return float(np.linalg.norm(h[mask]))


def pair_x(w: XMatrix, r: XMatrix) -> float:
    """Pairing ``<W, R>`` of two X-matrices: sum of s a + t b + 2 Re(u z)."""
    total = 0.0
    for i in range(4):
        total += w.a[i] * r.a[i] + w.b[i] * r.b[i] + 2.0 * (w.z[i] * r.z[i]).real
    return total


def pair_full(p, q) -> float:
    """Pairing ``<P, Q> = Tr(Q P^T)`` of full matrices."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    return float(np.trace(q @ p.T).real)


_PT_SOURCE = {"A": (3, 2, 1, 0), "B": (2, 3, 0, 1), "C": (1, 0, 3, 2)}


def partial_transpose(x: XMatrix, party: str) -> XMatrix:
    """Partial transpose on one party's tensor factor, in closed form on X-matrices."""
    try:
        src = _PT_SOURCE[party]
    except KeyError:
        raise InvalidInputError(f"unknown party {party!r}") from None
    z = tuple(x.z[k] for k in src)
    if party == "A":
        z = tuple(v.conjugate() for v in z)
    return XMatrix(x.a, x.b, z)


def partial_transpose_full(h, party: str) -> np.ndarray:
    """Partial transpose of a full 8x8 matrix (independent reshape route)."""
    axis = PARTIES.index(party)
    t = np.asarray(h, dtype=complex).reshape(2, 2, 2, 2, 2, 2)
    perm = list(range(6))
    perm[axis], perm[axis + 3] = axis + 3, axis
    return t.transpose(perm).reshape(8, 8)


def psd_scale(x: XMatrix) -> float:
    return 1.0 + x.magnitude


def is_psd_x(x: XMatrix, tol: float = DEFAULT_TOL) -> bool:
    """Positivity through the four 2x2 blocks ``[[a_i, z_i], [conj z_i, b_i]]``."""
    scale = psd_scale(x)
    for i in range(4):
        if x.a[i] < -tol or x.b[i] < -tol:
            return False
        if x.a[i] * x.b[i] < abs(x.z[i]) ** 2 - tol * scale:
            return False
    return True


def is_psd_full(h, tol: float = DEFAULT_TOL) -> bool:
    h = np.asarray(h, dtype=complex)
    eig = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    return bool(eig[0] >= -tol * (1.0 + float(np.abs(eig).max())))


def is_ghz_diagonal(x: XMatrix, tol: float = DEFAULT_TOL) -> bool:
    scale = psd_scale(x)
    return all(abs(x.a[i] - x.b[i]) <= tol * scale and abs(x.z[i].imag) <= tol * scale
               for i in range(4))


def _system_permutation_matrix(perm: Mapping[str, str]) -> np.ndarray:
    pos = {p: k for k, p in enumerate(PARTIES)}
    p_mat = np.zeros((8, 8))
    for n in range(8):
        old_bits = [(n >> (2 - k)) & 1 for k in range(3)]
        new_bits = [0, 0, 0]
        for party, target in perm.items():
            new_bits[pos[target]] = old_bits[pos[party]]
        m = (new_bits[0] << 2) | (new_bits[1] << 1) | new_bits[2]
        p_mat[m, n] = 1.0
    return p_mat


def permute_systems(x: XMatrix, perm: Mapping[str, str]) -> XMatrix:
    """Relabel parties: the tensor factor of party ``p`` moves to slot ``perm[p]``.

    A state separable across ``p``-rest maps to one separable across
    ``perm[p]``-rest.
    """
    if sorted(perm) != list(PARTIES) or sorted(perm.values()) != list(PARTIES):
        raise InvalidInputError(f"not a permutation of A, B, C: {dict(perm)}")
    p_mat = _system_permutation_matrix(perm)
    return x_part(p_mat @ embed(x) @ p_mat.T)


def all_system_permutations() -> list[dict[str, str]]:
    from itertools import permutations

    return [dict(zip(PARTIES, img)) for img in permutations(PARTIES)]
