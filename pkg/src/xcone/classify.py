"""Lattice profiles and partial-separability class labels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .criteria import (
    BASIC,
    DUAL_CONES,
    DUAL_INCLUSIONS,
    PRIMAL_CONES,
    PRIMAL_INCLUSIONS,
    Cone,
    join_of,
    permute_cone,
    state_in_cone,
    witness_in_cone,
)
from .xcore import DEFAULT_TOL, XMatrix, is_psd_x

#: Cones whose membership bits make up a class signature, in order.
SIGNATURE_CONES = (Cone.A, Cone.B, Cone.C, Cone.AB_JOIN, Cone.BC_JOIN, Cone.CA_JOIN, Cone.ABC_JOIN)

NOT_A_STATE = "not a state"
FULLY_BISEPARABLE = "fully X-biseparable"
GENUINELY_ENTANGLED = "genuinely entangled"


class LatticeConsistencyError(RuntimeError):
    """Membership verdicts contradict the inclusion order of the cones."""


@dataclass(frozen=True)
class LatticeProfile:
    membership: tuple[tuple[Cone, bool], ...]
    psd: bool

    def __getitem__(self, cone: Cone) -> bool:
        return dict(self.membership)[cone]

    def as_dict(self) -> dict[Cone, bool]:
        return dict(self.membership)

    @property
    def is_dual(self) -> bool:
        return self.membership[0][0].is_dual

    def violations(self) -> list[tuple[Cone, Cone]]:
        """Inclusion arrows ``small -> big`` with ``small`` member but ``big`` not."""
        m = self.as_dict()
        arrows = DUAL_INCLUSIONS if self.is_dual else PRIMAL_INCLUSIONS
        return [(lo, hi) for lo, hi in arrows if m[lo] and not m[hi]]

    def to_dict(self) -> dict:
        return {"psd": self.psd, "membership": {c.value: v for c, v in self.membership}}


def _checked(profile: LatticeProfile) -> LatticeProfile:
    bad = profile.violations()
    if bad:
        arrows = ", ".join(f"{lo} -> {hi}" for lo, hi in bad)
        raise LatticeConsistencyError(f"membership is not monotone along {arrows}")
    return profile


def lattice_profile(x: XMatrix, tol: float = DEFAULT_TOL) -> LatticeProfile:
    """Membership of ``x`` in all 11 primal cones, checked against inclusions."""
    psd = is_psd_x(x, tol)
    if not psd:
        return LatticeProfile(tuple((c, False) for c in PRIMAL_CONES), False)
    return _checked(LatticeProfile(tuple((c, state_in_cone(x, c, tol).member) for c in PRIMAL_CONES), True))


def witness_profile(w: XMatrix, tol: float = DEFAULT_TOL) -> LatticeProfile:
    """Membership of ``w`` in all 11 dual cones; ``psd`` records nonnegative diagonals."""
    verdicts = [witness_in_cone(w, c, tol) for c in DUAL_CONES]
    positive = verdicts[0].positive
    return _checked(LatticeProfile(tuple((v.cone, v.member) for v in verdicts), positive))


@dataclass(frozen=True)
class ClassLabel:
    """Class of a state.

    ``party`` is set for the named classes that single out one party (the
    one playing the role of A in the definition); ``name`` then carries it
    as a suffix unless it is A itself.
    """

    name: str
    signature: tuple[bool, ...]
    base: str = ""
    party: str = ""

    @property
    def bits(self) -> str:
        return "".join("1" if b else "0" for b in self.signature)

    def to_dict(self) -> dict:
        return {"name": self.name, "signature": self.bits, "base": self.base or self.name,
                "party": self.party}


def _others(p: str) -> tuple[str, str]:
    rest = [q for q in "ABC" if q != p]
    return rest[0], rest[1]


def _named(m: Mapping[Cone, bool]) -> tuple[str, str] | None:
    basic = {p: m[BASIC[p]] for p in "ABC"}
    join2 = {frozenset(pq): m[join_of(pq)] for pq in ("AB", "BC", "CA")}
    if all(join2.values()) and not any(basic.values()):
        return "C^{2,4}", ""
    for p in "ABC":
        q, r = _others(p)
        if basic[p] and join2[frozenset(q + r)] and not basic[q] and not basic[r]:
            return "C^{2,6,1}", p
        if (join2[frozenset(p + q)] and join2[frozenset(r + p)] and not basic[p]
                and not join2[frozenset(q + r)]):
            return "C^{2,3,1}", p
    return None


def _label_name(base: str, party: str) -> str:
    return base if party in ("", "A") else f"{base}({party})"


def partition_class(profile: LatticeProfile) -> ClassLabel:
    """Name the class of a (primal) lattice profile."""
    m = profile.as_dict()
    sig = tuple(m[c] for c in SIGNATURE_CONES)
    if not profile.psd:
        return ClassLabel(NOT_A_STATE, sig)
    if m[Cone.ABC_MEET]:
        return ClassLabel(FULLY_BISEPARABLE, sig)
    if not m[Cone.ABC_JOIN]:
        return ClassLabel(GENUINELY_ENTANGLED, sig)
    named = _named(m)
    if named is not None:
        base, party = named
        return ClassLabel(_label_name(base, party), sig, base, party)
    return ClassLabel("sig:" + "".join("1" if b else "0" for b in sig), sig)


def classify(x: XMatrix, tol: float = DEFAULT_TOL) -> ClassLabel:
    return partition_class(lattice_profile(x, tol))


def permute_label(label: ClassLabel, perm: Mapping[str, str]) -> ClassLabel:
    """Label expected after relabelling parties by ``perm``."""
    bits = dict(zip(SIGNATURE_CONES, label.signature))
    sig = tuple(bits[c] for c in (permute_cone(c, {v: k for k, v in perm.items()})
                                  for c in SIGNATURE_CONES))
    if label.party:
        party = perm[label.party]
        return ClassLabel(_label_name(label.base, party), sig, label.base, party)
    if label.name.startswith("sig:"):
        return ClassLabel("sig:" + "".join("1" if b else "0" for b in sig), sig)
    return ClassLabel(label.name, sig, label.base)
