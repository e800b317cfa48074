"""Inequality criteria and cone membership for X-shaped states and witnesses.

Primal cones are built from the bi-separable cones A, B, C (separable across
A-BC, B-CA, C-AB) by intersection ("meet", written ``A^B``) and convex hull
("join", written ``A+B``).  Each has a dual cone of witnesses, written
``dual:<name>``; duality swaps meets and joins.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

from .xcore import (
    DEFAULT_TOL,
    DomainError,
    InvalidInputError,
    XMatrix,
    as_hermitian8,
    is_psd_x,
    off_x_norm,
    x_part,
)

# index pairs (0-based) tied together by each party's partial transpose
PARTY_PAIRS = {
    "A": ((0, 3), (1, 2)),
    "B": ((0, 2), (1, 3)),
    "C": ((0, 1), (2, 3)),
}


def complement(pair: Sequence[int]) -> tuple[int, int]:
    rest = tuple(k for k in range(4) if k not in pair)
    return rest  # type: ignore[return-value]


def pair_owner(pair: Sequence[int]) -> str:
    """Party whose index pairs contain ``pair``."""
    key = tuple(sorted(pair))
    for party, pairs in PARTY_PAIRS.items():
        if key in pairs:
            return party
    raise InvalidInputError(f"not an index pair: {pair}")


class Cone(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    AB_MEET = "A^B"
    BC_MEET = "B^C"
    CA_MEET = "C^A"
    ABC_MEET = "A^B^C"
    AB_JOIN = "A+B"
    BC_JOIN = "B+C"
    CA_JOIN = "C+A"
    ABC_JOIN = "A+B+C"
    A_DUAL = "dual:A"
    B_DUAL = "dual:B"
    C_DUAL = "dual:C"
    AB_MEET_DUAL = "dual:A^B"
    BC_MEET_DUAL = "dual:B^C"
    CA_MEET_DUAL = "dual:C^A"
    ABC_MEET_DUAL = "dual:A^B^C"
    AB_JOIN_DUAL = "dual:A+B"
    BC_JOIN_DUAL = "dual:B+C"
    CA_JOIN_DUAL = "dual:C+A"
    ABC_JOIN_DUAL = "dual:A+B+C"

    @classmethod
    def parse(cls, name: str) -> Cone:
        """Look up a cone by CLI name (``A``, ``B^C``, ``dual:A+B+C``) or member name."""
        try:
            return cls(name)
        except ValueError:
            pass
        try:
            return cls[name.upper()]
        except KeyError:
            raise InvalidInputError(f"unknown cone name {name!r}") from None

    @property
    def is_dual(self) -> bool:
        return self.value.startswith("dual:")

    @property
    def primal(self) -> Cone:
        return Cone(self.value[5:]) if self.is_dual else self

    @property
    def dual(self) -> Cone:
        return self.primal if self.is_dual else Cone("dual:" + self.value)

    @property
    def parties(self) -> tuple[str, ...]:
        return tuple(ch for ch in self.primal.value if ch in "ABC")

    @property
    def shape(self) -> str:
        """``basic``, ``meet`` or ``join`` of the underlying primal cone."""
        v = self.primal.value
        return "meet" if "^" in v else "join" if "+" in v else "basic"

    @property
    def pretty(self) -> str:
        """Name written as the cone it is, e.g. ``A°+B°`` for ``dual:A^B``."""
        if not self.is_dual:
            return self.value.replace("^", "∩")
        parts = [p + "°" for p in self.parties]
        return ("+" if self.shape == "meet" else "∩").join(parts)

    def __str__(self) -> str:
        return self.value


PRIMAL_CONES = tuple(c for c in Cone if not c.is_dual)
DUAL_CONES = tuple(c for c in Cone if c.is_dual)

_MEETS = {frozenset("AB"): Cone.AB_MEET, frozenset("BC"): Cone.BC_MEET, frozenset("CA"): Cone.CA_MEET}
_JOINS = {frozenset("AB"): Cone.AB_JOIN, frozenset("BC"): Cone.BC_JOIN, frozenset("CA"): Cone.CA_JOIN}
BASIC = {"A": Cone.A, "B": Cone.B, "C": Cone.C}


def meet_of(parties) -> Cone:
    return Cone.ABC_MEET if len(set(parties)) == 3 else _MEETS[frozenset(parties)]


def join_of(parties) -> Cone:
    return Cone.ABC_JOIN if len(set(parties)) == 3 else _JOINS[frozenset(parties)]


def _primal_arrows() -> tuple[tuple[Cone, Cone], ...]:
    arrows = []
    for pair in _MEETS:
        arrows.append((Cone.ABC_MEET, _MEETS[pair]))
        for p in sorted(pair):
            arrows.append((_MEETS[pair], BASIC[p]))
            arrows.append((BASIC[p], _JOINS[pair]))
        arrows.append((_JOINS[pair], Cone.ABC_JOIN))
    return tuple(arrows)


#: Inclusion arrows ``(smaller, larger)`` among the primal cones.
PRIMAL_INCLUSIONS = _primal_arrows()
#: Inclusion arrows among dual cones; duality reverses inclusion.
DUAL_INCLUSIONS = tuple((big.dual, small.dual) for small, big in PRIMAL_INCLUSIONS)


def is_included(small: Cone, big: Cone) -> bool:
    """Whether ``small ⊂ big`` follows from the inclusion arrows."""
    if small.is_dual != big.is_dual:
        return False
    arrows = DUAL_INCLUSIONS if small.is_dual else PRIMAL_INCLUSIONS
    seen, frontier = {small}, [small]
    while frontier:
        c = frontier.pop()
        for lo, hi in arrows:
            if lo == c and hi not in seen:
                seen.add(hi)
                frontier.append(hi)
    return big in seen


@dataclass(frozen=True)
class IneqKind:
    """One inequality of a family, with 0-based index payload.

    ``S1``/``W1``/``S2``/``W2`` take a pair of distinct indices; ``S3`` takes a
    single index; ``W3`` takes none.  ``str()`` gives the conventional
    1-based name such as ``S1[1,4]``.
    """

    tag: str
    indices: tuple[int, ...] = ()

    def __post_init__(self):
        arity = {"S1": 2, "S2": 2, "W1": 2, "W2": 2, "S3": 1, "W3": 0}
        if self.tag not in arity:
            raise InvalidInputError(f"unknown inequality family {self.tag!r}")
        idx = tuple(int(i) for i in self.indices)
        if len(idx) != arity[self.tag] or len(set(idx)) != len(idx) or any(not 0 <= i < 4 for i in idx):
            raise InvalidInputError(f"bad indices {self.indices} for {self.tag}")
        object.__setattr__(self, "indices", idx)

    @property
    def is_state(self) -> bool:
        return self.tag.startswith("S")

    def __str__(self) -> str:
        if not self.indices:
            return self.tag
        return f"{self.tag}[{','.join(str(i + 1) for i in self.indices)}]"

    @classmethod
    def parse(cls, text: str) -> IneqKind:
        text = text.strip()
        tag, _, rest = text.partition("[")
        idx = tuple(int(v) - 1 for v in rest.rstrip("]").split(",") if v.strip()) if rest else ()
        return cls(tag, idx)


def S1(i, j):
    return IneqKind("S1", (i, j))


def S2(i, j):
    return IneqKind("S2", (i, j))


def S3(i):
    return IneqKind("S3", (i,))


def W1(i, j):
    return IneqKind("W1", (i, j))


def W2(i, j):
    return IneqKind("W2", (i, j))


W3 = IneqKind("W3")


@dataclass(frozen=True)
class IneqReport:
    kind: IneqKind
    lhs: float
    rhs: float
    slack: float
    satisfied: bool
    # raw slacks of the individual displayed inequalities (W2 has two)
    parts: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        d = {"kind": str(self.kind), "lhs": self.lhs, "rhs": self.rhs,
             "slack": self.slack, "satisfied": self.satisfied}
        if len(self.parts) > 1:
            d["parts"] = list(self.parts)
        return d


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of a membership test.

    ``positive`` records the precondition check: positivity for states,
    nonnegative diagonals for witnesses.  ``conclusive`` is False only when
    a general matrix passed the necessary X-part test.
    """

    cone: Cone
    member: bool
    positive: bool
    reports: tuple[IneqReport, ...] = ()
    conclusive: bool = True

    @property
    def psd_checked(self) -> bool:
        return not self.cone.is_dual

    @property
    def min_slack(self) -> float:
        return min((r.slack for r in self.reports), default=math.inf)

    def failed(self) -> list[IneqReport]:
        return [r for r in self.reports if not r.satisfied]

    def to_dict(self) -> dict:
        return {"cone": self.cone.value, "member": self.member, "positive": self.positive,
                "conclusive": self.conclusive, "reports": [r.to_dict() for r in self.reports]}


# Square-root terms summed on the left of each family.  Tolerances grow with
# it so that a member of a smaller cone, passing each inequality with rounding
# slack, never fails an inequality of a larger cone that sums several of them.
_TERMS = {"S1": 1, "S2": 2, "S3": 3, "W1": 2, "W2": 3, "W3": 4}


def _report(kind, lhs, rhs, tol, parts=()):
    slack = lhs - rhs
    scale = _TERMS[kind.tag] * (1.0 + max(abs(lhs), abs(rhs)))
    return IneqReport(kind, lhs, rhs, slack, bool(slack >= -tol * scale), tuple(parts))


def _root_products(x: XMatrix, tol: float) -> list[float]:
    scale = 1.0 + x.magnitude
    out = []
    for i in range(4):
        a, b = x.a[i], x.b[i]
        if a < -tol * scale or b < -tol * scale:
            raise DomainError(f"negative diagonal at index {i + 1}: ({a}, {b})")
        out.append(math.sqrt(max(a, 0.0) * max(b, 0.0)))
    return out


def eval_state_inequality(x: XMatrix, kind: IneqKind, tol: float = DEFAULT_TOL) -> IneqReport:
    """Evaluate one of S1, S2, S3 on the state ``x``."""
    if not kind.is_state:
        raise InvalidInputError(f"{kind} is a witness inequality")
    root = _root_products(x, tol)
    mod = [abs(v) for v in x.z]
    if kind.tag == "S1":
        i, j = kind.indices
        return _report(kind, min(root[i], root[j]), max(mod[i], mod[j]), tol)
    if kind.tag == "S2":
        i, j = kind.indices
        k, l = complement((i, j))
        lhs = min(root[i] + root[j], root[k] + root[l])
        rhs = max(mod[i] + mod[j], mod[k] + mod[l])
        return _report(kind, lhs, rhs, tol)
    (i,) = kind.indices
    return _report(kind, sum(root[j] for j in range(4) if j != i), mod[i], tol)


def eval_witness_inequality(w: XMatrix, kind: IneqKind, tol: float = DEFAULT_TOL) -> IneqReport:
    """Evaluate one of W1, W2, W3 on the witness ``w = X(s, t, u)``."""
    if kind.is_state:
        raise InvalidInputError(f"{kind} is a state inequality")
    root = _root_products(w, tol)
    mod = [abs(v) for v in w.z]
    if kind.tag == "W1":
        i, j = kind.indices
        return _report(kind, root[i] + root[j], mod[i] + mod[j], tol)
    if kind.tag == "W3":
        return _report(kind, sum(root), sum(mod), tol)
    i, j = kind.indices
    first = _report(kind, sum(root[k] for k in range(4) if k != j), mod[i], tol)
    second = _report(kind, sum(root[k] for k in range(4) if k != i), mod[j], tol)
    bind = first if first.slack <= second.slack else second
    return IneqReport(kind, bind.lhs, bind.rhs, bind.slack,
                      first.satisfied and second.satisfied, (first.slack, second.slack))


def governing_inequalities(cone: Cone) -> tuple[IneqKind, ...]:
    """Inequalities whose conjunction characterizes ``cone`` on X-matrices.

    Primal cones additionally require positivity; dual cones require
    nonnegative diagonals.
    """
    parties = cone.parties
    if not cone.is_dual:
        if cone.shape in ("basic", "meet"):
            return tuple(S1(*pr) for p in parties for pr in PARTY_PAIRS[p])
        if len(parties) == 3:
            return tuple(S3(i) for i in range(4))
        (missing,) = set("ABC") - set(parties)
        return (S2(*PARTY_PAIRS[missing][0]),)
    # dual of a join is the meet of duals: union of W1 conditions
    if cone.shape in ("basic", "join"):
        return tuple(W1(*pr) for p in parties for pr in PARTY_PAIRS[p])
    if len(parties) == 3:
        return (W3,)
    (missing,) = set("ABC") - set(parties)
    return tuple(W2(*pr) for pr in PARTY_PAIRS[missing]) + (W3,)


def _nonneg_diagonals(w: XMatrix, tol: float) -> bool:
    scale = 1.0 + w.magnitude
    return all(v >= -tol * scale for v in w.a + w.b)


def state_in_cone(x: XMatrix, cone: Cone, tol: float = DEFAULT_TOL) -> MembershipVerdict:
    """Exact membership of an X-state in a primal cone."""
    if cone.is_dual:
        raise InvalidInputError(f"{cone} is a dual cone; use witness_in_cone")
    psd = is_psd_x(x, tol)
    if not _nonneg_diagonals(x, tol):
        return MembershipVerdict(cone, False, False)
    reports = tuple(eval_state_inequality(x, k, tol) for k in governing_inequalities(cone))
    return MembershipVerdict(cone, psd and all(r.satisfied for r in reports), psd, reports)


def witness_in_cone(w: XMatrix, cone: Cone, tol: float = DEFAULT_TOL) -> MembershipVerdict:
    """Exact membership of an X-shaped witness in a dual cone."""
    if not cone.is_dual:
        raise InvalidInputError(f"{cone} is a primal cone; use state_in_cone")
    if not _nonneg_diagonals(w, tol):
        return MembershipVerdict(cone, False, False)
    reports = tuple(eval_witness_inequality(w, k, tol) for k in governing_inequalities(cone))
    return MembershipVerdict(cone, all(r.satisfied for r in reports), True, reports)


def in_cone(x: XMatrix, cone: Cone, tol: float = DEFAULT_TOL) -> MembershipVerdict:
    """Dispatch to ``state_in_cone`` or ``witness_in_cone``."""
    return witness_in_cone(x, cone, tol) if cone.is_dual else state_in_cone(x, cone, tol)


def necessary_check_general(h, cone: Cone, tol: float = DEFAULT_TOL) -> MembershipVerdict:
    """Test a general self-adjoint 8x8 matrix through its X-part.

    The X-part of a cone member stays in the cone, so failure is always
    conclusive.  Success is conclusive only if ``h`` is already X-shaped.
    """
    h = as_hermitian8(h, tol)
    verdict = in_cone(x_part(h), cone, tol)
    x_shaped = off_x_norm(h) <= tol * (1.0 + float(abs(h).max()))
    conclusive = (not verdict.member) or x_shaped
    return MembershipVerdict(cone, verdict.member, verdict.positive, verdict.reports, conclusive)


def permute_cone(cone: Cone, perm) -> Cone:
    """Image of ``cone`` when party ``p`` is relabelled ``perm[p]``."""
    parties = [perm[p] for p in cone.parties]
    if cone.shape == "basic":
        image = BASIC[parties[0]]
    elif cone.shape == "meet":
        image = meet_of(parties)
    else:
        image = join_of(parties)
    return image.dual if cone.is_dual else image
