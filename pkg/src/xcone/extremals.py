"""Extreme-ray families of the X-restricted cones, and samplers built on them.

Every family member is pinned down, up to a positive multiple, by a set of
free ratios ``r_k`` (giving diagonal entries ``a_k = r_k``, ``b_k = 1/r_k``)
and phases ``theta_k`` (giving anti-diagonal entries ``exp(i theta_k)``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .criteria import PARTY_PAIRS, Cone, complement, in_cone
from .xcore import DEFAULT_TOL, InvalidInputError, XMatrix

_STATE_TAGS = ("E1", "E2", "E3")
_WITNESS_TAGS = ("We1", "We2", "We3")
_ALL_TAGS = ("Delta", "WDelta") + _STATE_TAGS + _WITNESS_TAGS


def _missing(parties: str) -> str:
    (p,) = set("ABC") - set(parties)
    return p


@dataclass(frozen=True)
class Family:
    """Tag plus payload identifying one extreme-ray family.

    ``where`` holds the party (``E1``/``We1``) or the pair of parties of a
    meet (``E2``/``We2``, e.g. ``"BC"``).  ``indices`` are 0-based.  ``side``
    is ``"a"`` or ``"b"`` for diagonal rays.
    """

    tag: str
    indices: tuple[int, ...] = ()
    where: str = ""
    side: str = ""

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        self._validate()

    def _validate(self):
        tag, idx, where = self.tag, self.indices, self.where
        bad = InvalidInputError(f"invalid extreme-ray family {self!r}")
        if tag not in _ALL_TAGS or any(not 0 <= i < 4 for i in idx) or len(set(idx)) != len(idx):
            raise bad
        if tag == "Delta":
            if len(idx) != 1 or self.side not in ("a", "b"):
                raise bad
        elif self.side:
            raise bad
        if tag in ("WDelta", "We3") and len(idx) != 1:
            raise bad
        if tag == "E3" and idx:
            raise bad
        if tag in ("E1", "We1"):
            if where not in PARTY_PAIRS or len(idx) != 2 or tuple(sorted(idx)) not in PARTY_PAIRS[where]:
                raise bad
        if tag in ("E2", "We2"):
            if len(where) != 2 or set(where) - set("ABC") or len(set(where)) != 2 or len(idx) != 2:
                raise bad
            if tuple(sorted(idx)) not in PARTY_PAIRS[_missing(where)]:
                raise bad
        if tag in ("E1", "We2") and idx != tuple(sorted(idx)):
            raise bad

    @property
    def ratio_indices(self) -> tuple[int, ...]:
        """Indices carrying a free ratio (nonzero diagonal pair)."""
        tag, idx = self.tag, self.indices
        if tag == "Delta":
            return ()
        if tag in ("WDelta", "E1", "We2"):
            return idx
        if tag == "E2":
            return tuple(k for k in range(4) if k != idx[1])
        if tag == "E3":
            return (0, 1, 2, 3)
        if tag == "We1":
            return idx[:1]
        return tuple(k for k in range(4) if k != idx[0])  # We3

    @property
    def phase_indices(self) -> tuple[int, ...]:
        """Indices carrying a unit-modulus anti-diagonal entry."""
        tag, idx = self.tag, self.indices
        if tag == "Delta":
            return ()
        if tag in ("WDelta", "E1", "We3"):
            return idx
        if tag == "E2":
            return idx[:1]
        if tag == "E3":
            return (0, 1, 2, 3)
        if tag == "We1":
            return idx[1:]
        return complement(idx)  # We2

    @property
    def is_witness(self) -> bool:
        return self.tag in _WITNESS_TAGS

    @property
    def is_state(self) -> bool:
        return self.tag in _STATE_TAGS

    def __str__(self) -> str:
        one = ",".join(str(i + 1) for i in self.indices)
        if self.tag == "Delta":
            return f"Delta({one},{self.side})"
        if self.tag == "E3":
            return "E3"
        if self.where:
            return f"{self.tag}({self.where};{one})"
        return f"{self.tag}({one})"

    @classmethod
    def parse(cls, text: str) -> Family:
        m = re.fullmatch(r"\s*(\w+)(?:\((?:([ABC]{1,2});)?([\d,]*)(?:,([ab]))?\))?\s*", text)
        if not m:
            raise InvalidInputError(f"cannot parse family {text!r}")
        tag, where, nums, side = m.groups()
        idx = tuple(int(v) - 1 for v in nums.split(",") if v) if nums else ()
        return cls(tag, idx, where or "", side or "")


class GeneratorParams(NamedTuple):
    """Free ratios and phases, aligned with ``Family.ratio_indices`` / ``phase_indices``."""

    ratios: tuple[float, ...] = ()
    phases: tuple[float, ...] = ()


class Term(NamedTuple):
    weight: float
    family: Family
    params: GeneratorParams


def delta(i: int, side: str = "a") -> Family:
    return Family("Delta", (i,), side=side)


def generator(f: Family, p: GeneratorParams = GeneratorParams()) -> XMatrix:
    """The unit element of family ``f`` with the given ratios and phases."""
    ratios, phases = tuple(p.ratios), tuple(p.phases)
    if len(ratios) != len(f.ratio_indices) or len(phases) != len(f.phase_indices):
        raise InvalidInputError(
            f"{f} takes {len(f.ratio_indices)} ratios and {len(f.phase_indices)} phases, "
            f"got {len(ratios)} and {len(phases)}"
        )
    if not all(math.isfinite(r) and r > 0 for r in ratios) or not all(math.isfinite(t) for t in phases):
        raise InvalidInputError(f"ratios must be positive and phases finite: {p}")
    a, b, z = [0.0] * 4, [0.0] * 4, [0j] * 4
    if f.tag == "Delta":
        (a if f.side == "a" else b)[f.indices[0]] = 1.0
    for k, r in zip(f.ratio_indices, ratios):
        a[k], b[k] = r, 1.0 / r
    for k, t in zip(f.phase_indices, phases):
        z[k] = complex(math.cos(t), math.sin(t))
    return XMatrix(a, b, z)


def family_scale(m: XMatrix, f: Family) -> float:
    """The positive multiple of a unit family member that ``m`` would be."""
    if f.tag == "Delta":
        k = f.indices[0]
        return (m.a if f.side == "a" else m.b)[k]
    return abs(m.z[f.phase_indices[0]])


def matches_family(m: XMatrix, f: Family, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``m`` is a positive multiple of some member of ``f``."""
    scale = family_scale(m, f)
    if not scale > tol * (1.0 + m.magnitude):
        return False
    y = (1.0 / scale) * m
    eps = tol * (1.0 + y.magnitude)
    ratio_idx, phase_idx = set(f.ratio_indices), set(f.phase_indices)
    for k in range(4):
        if k in ratio_idx:
            if y.a[k] <= 0 or y.b[k] <= 0 or abs(math.sqrt(y.a[k] * y.b[k]) - 1.0) > eps:
                return False
        elif f.tag == "Delta" and k == f.indices[0]:
            other = y.b[k] if f.side == "a" else y.a[k]
            if abs(other) > eps:
                return False
        elif abs(y.a[k]) > eps or abs(y.b[k]) > eps:
            return False
        if k in phase_idx:
            if abs(abs(y.z[k]) - 1.0) > eps:
                return False
        elif abs(y.z[k]) > eps:
            return False
    return True


def params_of(m: XMatrix, f: Family) -> tuple[float, GeneratorParams]:
    """Recover ``(weight, params)`` with ``m == weight * generator(f, params)``.

    Only meaningful when ``matches_family(m, f)`` holds.
    """
    w = family_scale(m, f)
    ratios = tuple(math.sqrt(m.a[k] / m.b[k]) for k in f.ratio_indices)
    phases = tuple(math.atan2(m.z[k].imag, m.z[k].real) for k in f.phase_indices)
    return w, GeneratorParams(ratios, phases)


def _basic_state_families(party: str) -> list[Family]:
    return [Family("E1", pr, party) for pr in PARTY_PAIRS[party]]


def _basic_witness_families(party: str) -> list[Family]:
    return [Family("We1", order, party) for i, j in PARTY_PAIRS[party] for order in ((i, j), (j, i))]


DELTAS = tuple(delta(i, s) for s in ("a", "b") for i in range(4))
WDELTAS = tuple(Family("WDelta", (i,)) for i in range(4))


def ext_families(cone: Cone) -> tuple[Family, ...]:
    """Families whose members are exactly the extreme rays of ``cone`` on X-matrices."""
    parties = cone.parties
    if not cone.is_dual:
        if cone.shape == "basic" or cone.shape == "join":
            fams = [f for p in parties for f in _basic_state_families(p)]
        elif len(parties) == 3:
            fams = [Family("E3")]
        else:
            where = "".join(parties)
            fams = [Family("E2", order, where)
                    for i, j in PARTY_PAIRS[_missing(where)] for order in ((i, j), (j, i))]
            fams.append(Family("E3"))
        return tuple(fams) + DELTAS
    if cone.shape == "basic" or cone.shape == "meet":
        # dual of a meet is a sum of basic duals: union of their extreme rays
        fams = [f for p in parties for f in _basic_witness_families(p)]
    elif len(parties) == 3:
        fams = [Family("We3", (i,)) for i in range(4)]
    else:
        where = "".join(parties)
        fams = [Family("We2", pr, where) for pr in PARTY_PAIRS[_missing(where)]]
    return tuple(fams) + DELTAS + WDELTAS


def _group_key(f: Family) -> tuple[str, str]:
    return (f.tag, f.where)


@dataclass(frozen=True)
class Spread:
    """Sampling distribution for cone members.

    Ratios are log-uniform on ``ratio_range``, phases uniform on [0, 2pi),
    the number of generators uniform on ``1..max_terms``, mixture weights a
    flat Dirichlet draw scaled by a log-uniform total mass.
    """

    ratio_range: tuple[float, float] = (0.1, 10.0)
    mass_range: tuple[float, float] = (0.01, 100.0)
    max_terms: int = 8


@dataclass
class _Draw:
    families: tuple[Family, ...]
    choice: np.ndarray   # (n, K) family index per slot
    ratios: np.ndarray   # (n, K, 4)
    phases: np.ndarray   # (n, K, 4)
    weights: np.ndarray  # (n, K), zero on unused slots
    vectors: np.ndarray = field(default=None)  # (n, 16)


def _draw(cone: Cone, n: int, rng: np.random.Generator, spread: Spread) -> _Draw:
    fams = ext_families(cone)
    groups: dict[tuple[str, str], int] = {}
    for f in fams:
        groups[_group_key(f)] = groups.get(_group_key(f), 0) + 1
    probs = np.array([1.0 / (len(groups) * groups[_group_key(f)]) for f in fams])
    K = spread.max_terms
    lo, hi = np.log(spread.ratio_range)
    mlo, mhi = np.log(spread.mass_range)

    n_terms = rng.integers(1, K + 1, size=n)
    choice = rng.choice(len(fams), size=(n, K), p=probs)
    ratios = np.exp(rng.uniform(lo, hi, size=(n, K, 4)))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(n, K, 4))
    raw = rng.gamma(1.0, size=(n, K)) * (np.arange(K)[None, :] < n_terms[:, None])
    mass = np.exp(rng.uniform(mlo, mhi, size=n))
    weights = raw / raw.sum(axis=1, keepdims=True) * mass[:, None]

    unit = np.zeros((n, K, 16))
    for q, f in enumerate(fams):
        rows, cols = np.nonzero(choice == q)
        if f.tag == "Delta":
            unit[rows, cols, f.indices[0] + (0 if f.side == "a" else 4)] = 1.0
        for k in f.ratio_indices:
            r = ratios[rows, cols, k]
            unit[rows, cols, k] = r
            unit[rows, cols, 4 + k] = 1.0 / r
        for k in f.phase_indices:
            t = phases[rows, cols, k]
            unit[rows, cols, 8 + k] = np.cos(t)
            unit[rows, cols, 12 + k] = np.sin(t)
    vectors = np.einsum("nk,nkd->nd", weights, unit)
    return _Draw(fams, choice, ratios, phases, weights, vectors)


def sample_vectors(cone: Cone, n: int, rng: np.random.Generator,
                   spread: Spread | None = None) -> np.ndarray:
    """``(n, 16)`` array of cone members as ``(a, b, Re z, Im z)`` rows."""
    return _draw(cone, n, rng, spread or Spread()).vectors


def sample_with_recipes(cone: Cone, n: int, seed: int,
                        spread: Spread | None = None) -> list[tuple[XMatrix, list[Term]]]:
    """Members of ``cone`` together with the generator mixture that built them."""
    if n < 1:
        raise InvalidInputError("sample count must be at least 1")
    d = _draw(cone, n, np.random.default_rng(seed), spread or Spread())
    out = []
    for s in range(n):
        terms = []
        for q in np.nonzero(d.weights[s] > 0)[0]:
            f = d.families[d.choice[s, q]]
            params = GeneratorParams(
                tuple(float(d.ratios[s, q, k]) for k in f.ratio_indices),
                tuple(float(d.phases[s, q, k]) for k in f.phase_indices),
            )
            terms.append(Term(float(d.weights[s, q]), f, params))
        out.append((XMatrix.from_vector(d.vectors[s]), terms))
    return out


def sample_cone(cone: Cone, n: int, seed: int, spread: Spread | None = None) -> list[XMatrix]:
    """``n`` members of ``cone``, each a nonnegative mix of its extreme rays."""
    return [x for x, _ in sample_with_recipes(cone, n, seed, spread)]


def rebuild(terms: Sequence[Term]) -> XMatrix:
    """Sum of ``weight * generator(family, params)`` over the terms."""
    total = np.zeros(16)
    for t in terms:
        total += t.weight * generator(t.family, t.params).to_vector()
    return XMatrix.from_vector(total)


def random_xmatrices(n: int, rng: np.random.Generator, kind: str = "state") -> list[XMatrix]:
    """Unstructured random X-matrices for property tests.

    ``kind="state"`` gives PSD matrices, ``"any"`` mixes PSD and non-PSD,
    ``"witness"`` gives nonnegative diagonals with anti-diagonals of
    arbitrary size.  About one index in five is zeroed out to reach
    lower-dimensional faces.
    """
    if kind not in ("state", "any", "witness"):
        raise InvalidInputError(f"unknown kind {kind!r}")
    a = np.exp(rng.normal(0.0, 1.0, size=(n, 4)))
    b = np.exp(rng.normal(0.0, 1.0, size=(n, 4)))
    stretch = {"state": 1.0, "any": 1.6, "witness": 2.5}[kind]
    mod = np.sqrt(a * b) * rng.uniform(0.0, 1.0, size=(n, 4)) * stretch
    z = mod * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=(n, 4)))
    keep = rng.uniform(size=(n, 4)) > 0.2
    a, b = a * keep, b * keep
    if kind == "state":
        z = z * keep
    if kind == "any":
        flip = rng.uniform(size=(n, 4)) < 0.05
        a = np.where(flip, -a, a)
    return [XMatrix(a[s], b[s], z[s]) for s in range(n)]


def soundness_check(cone: Cone, f: Family, p: GeneratorParams, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``generator(f, p)`` lies in ``cone``."""
    return in_cone(generator(f, p), cone, tol).member
