"""Checkable certificates for cone (non-)membership.

A non-member state gets a witness from the dual cone with negative pairing;
a non-member witness gets a counter-state from the primal cone.  Members get
explicit nonnegative decompositions into extreme rays.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import nnls

from .criteria import (
    PARTY_PAIRS,
    Cone,
    IneqReport,
    complement,
    in_cone,
    pair_owner,
    state_in_cone,
    witness_in_cone,
)
from .extremals import (
    Family,
    GeneratorParams,
    Spread,
    Term,
    delta,
    ext_families,
    generator,
    matches_family,
    rebuild,
    sample_vectors,
)
from .xcore import DEFAULT_TOL, InvalidInputError, XMatrix, is_psd_x, pair_x


class NoCertificateError(Exception):
    """The request does not apply, e.g. a witness was asked for a member."""


class CertificateError(RuntimeError):
    """A constructed certificate failed its own verification."""


@dataclass(frozen=True)
class Certificate:
    """A separating object: ``pairing < 0`` and ``obj`` lies in ``cone``.

    ``kind`` is ``"witness"`` (obj in a dual cone, refuting a state) or
    ``"counterstate"`` (obj in a primal cone, refuting a witness).
    """

    kind: str
    obj: XMatrix
    pairing: float
    cone: Cone
    family: Family | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "cone": self.cone.value,
            "family": None if self.family is None else str(self.family),
            "reason": self.reason,
            "pairing": self.pairing,
            "object": x_to_json(self.obj),
        }


@dataclass(frozen=True)
class Decomposition:
    terms: tuple[Term, ...]
    cone: Cone
    residual: float
    method: str = ""

    def reconstruct(self) -> XMatrix:
        return rebuild(self.terms)

    def to_dict(self) -> dict:
        return {
            "cone": self.cone.value,
            "method": self.method,
            "residual": self.residual,
            "terms": [
                {"weight": t.weight, "family": str(t.family),
                 "ratios": list(t.params.ratios), "phases": list(t.params.phases)}
                for t in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> Decomposition:
        terms = tuple(
            Term(float(t["weight"]), Family.parse(t["family"]),
                 GeneratorParams(tuple(map(float, t["ratios"])), tuple(map(float, t["phases"]))))
            for t in d["terms"]
        )
        return cls(terms, Cone.parse(d["cone"]), float(d["residual"]), d.get("method", ""))


def x_to_json(x: XMatrix) -> dict:
    return {"a": list(x.a), "b": list(x.b), "z": [[v.real, v.imag] for v in x.z]}


def _phase(v: complex) -> float:
    return math.atan2(v.imag, v.real) if v != 0 else 0.0


_RATIO_LIMIT = 1e100


def _balanced_ratio(p: float, q: float) -> float | None:
    """``sqrt(q / p)``, or None when it is undefined or too extreme to use."""
    if p <= 0 or q <= 0:
        return None
    r = math.sqrt(q) / math.sqrt(p)
    return r if 1.0 / _RATIO_LIMIT <= r <= _RATIO_LIMIT else None


def _diag_pair(p: float, q: float, budget: float) -> tuple[float, float]:
    """``(r, 1/r)`` making ``p r + q / r`` as small as needed.

    Balanced diagonals give the minimum ``2 sqrt(p q)``.  When one side
    vanishes (or nearly) the infimum is not attained; the sum is then kept
    below ``2 budget``.
    """
    p, q = max(p, 0.0), max(q, 0.0)
    r = _balanced_ratio(p, q)
    if r is None:
        if p == 0 and q == 0:
            r = 1.0
        elif p <= q:
            r = max(q / budget, 1.0)
        else:
            r = min(budget / p, 1.0)
    return r, 1.0 / r


def _dual_single(diag_idx: Sequence[int], phase_idx: Sequence[int], x: XMatrix,
                 violation: float) -> XMatrix:
    """Unit object with free diagonals on ``diag_idx`` and ``-exp(-i arg)`` on ``phase_idx``.

    Diagonals are balanced against ``x`` so the pairing with ``x`` is
    ``2 (sum sqrt(a b) - sum |z|)`` up to at most ``violation`` of slack
    spent on degenerate indices.
    """
    degenerate = [k for k in diag_idx
                  if _balanced_ratio(x.a[k], x.b[k]) is None and max(x.a[k], x.b[k]) > 0]
    # each degenerate index costs at most 2 budget, which leaves a third of the violation
    budget = violation / (3.0 * max(len(degenerate), 1))
    a, b, z = [0.0] * 4, [0.0] * 4, [0j] * 4
    for k in diag_idx:
        a[k], b[k] = _diag_pair(x.a[k], x.b[k], budget)
    for k in phase_idx:
        t = _phase(x.z[k])
        z[k] = -complex(math.cos(t), -math.sin(t))
    return XMatrix(a, b, z)


def _root(x: XMatrix, k: int) -> float:
    return math.sqrt(max(x.a[k], 0.0) * max(x.b[k], 0.0))


def _positivity_certificate(x: XMatrix, target: Cone, tol: float, kind: str) -> Certificate | None:
    """Certificate against a matrix that is not even positive (or has a negative diagonal)."""
    worst = min((v, k, side) for side, vals in (("a", x.a), ("b", x.b)) for k, v in enumerate(vals))
    if worst[0] < -tol:
        _, k, side = worst
        obj = generator(delta(k, side))
        return Certificate(kind, obj, pair_x(obj, x), target, delta(k, side),
                           f"negative diagonal at index {k + 1}")
    if kind == "counterstate":
        return None
    gaps = [(_root(x, k) - abs(x.z[k]), k) for k in range(4)]
    gap, k = min(gaps)
    if is_psd_x(x, tol) or gap >= 0:
        return None
    obj = _dual_single([k], [k], x, -gap)
    return Certificate(kind, obj, pair_x(obj, x), target, Family("WDelta", (k,)),
                       f"2x2 block at index {k + 1} is not positive")


def _check(cert: Certificate, tol: float) -> Certificate:
    ok_member = in_cone(cert.obj, cert.cone, tol).member
    if not ok_member or not cert.pairing < -tol:
        raise CertificateError(
            f"certificate failed verification (member={ok_member}, pairing={cert.pairing})"
        )
    return cert


def _worst(failed: Iterable[IneqReport]) -> IneqReport:
    return min(failed, key=lambda r: r.slack / (1.0 + max(abs(r.lhs), abs(r.rhs))))


def find_state_witness(x: XMatrix, cone: Cone, tol: float = DEFAULT_TOL) -> Certificate:
    """Witness ``W`` in the dual of ``cone`` with ``<W, x> < 0``.

    Raises NoCertificateError when ``x`` is a member.
    """
    if cone.is_dual:
        raise InvalidInputError(f"{cone} is a dual cone")
    target = cone.dual
    cert = _positivity_certificate(x, target, tol, "witness")
    if cert is not None:
        return _check(cert, tol)
    verdict = state_in_cone(x, cone, tol)
    if verdict.member:
        raise NoCertificateError(f"state is a member of {cone}")
    if not verdict.failed():
        raise CertificateError("non-member without a violated inequality")
    rep = _worst(verdict.failed())
    kind = rep.kind
    if kind.tag == "S1":
        i, j = kind.indices
        # diagonal index with the smallest sqrt(ab) against the largest |z|
        options = [(abs(x.z[l]) - _root(x, k), k, l) for k in (i, j) for l in (i, j) if k != l]
        v, k, l = max(options)
        obj = _dual_single([k], [l], x, v)
        fam = Family("We1", (k, l), pair_owner((i, j)))
    elif kind.tag == "S2":
        i, j = kind.indices
        k, l = complement((i, j))
        sides = [
            (abs(x.z[k]) + abs(x.z[l]) - _root(x, i) - _root(x, j), (i, j), (k, l)),
            (abs(x.z[i]) + abs(x.z[j]) - _root(x, k) - _root(x, l), (k, l), (i, j)),
        ]
        v, diag_idx, phase_idx = max(sides)
        obj = _dual_single(diag_idx, phase_idx, x, v)
        fam = Family("We2", tuple(sorted(diag_idx)), "".join(cone.parties))
    else:
        (i,) = kind.indices
        rest = [k for k in range(4) if k != i]
        v = abs(x.z[i]) - sum(_root(x, k) for k in rest)
        obj = _dual_single(rest, [i], x, v)
        fam = Family("We3", (i,))
    cert = Certificate("witness", obj, pair_x(obj, x), target, fam,
                       f"{kind} violated (slack {rep.slack:.6g})")
    return _check(cert, tol)


def find_witness_counterstate(w: XMatrix, cone: Cone, tol: float = DEFAULT_TOL) -> Certificate:
    """State ``rho`` in the primal cone paired with ``cone`` with ``<w, rho> < 0``.

    Raises NoCertificateError when ``w`` is a member of ``cone``.
    """
    if not cone.is_dual:
        raise InvalidInputError(f"{cone} is a primal cone")
    target = cone.primal
    cert = _positivity_certificate(w, target, tol, "counterstate")
    if cert is not None:
        return _check(cert, tol)
    verdict = witness_in_cone(w, cone, tol)
    if verdict.member:
        raise NoCertificateError(f"witness is a member of {cone.pretty}")
    rep = _worst(verdict.failed())
    kind = rep.kind
    if kind.tag == "W1":
        i, j = kind.indices
        idx = (min(i, j), max(i, j))
        obj = _dual_single(idx, idx, w, -rep.slack)
        fam = Family("E1", idx, pair_owner(idx))
    elif kind.tag == "W2":
        i, j = kind.indices
        first, second = rep.parts
        if second < first:
            i, j = j, i
        diag_idx = [k for k in range(4) if k != j]
        obj = _dual_single(diag_idx, [i], w, -min(first, second))
        fam = Family("E2", (i, j), "".join(target.parties))
    else:
        obj = _dual_single(range(4), range(4), w, -rep.slack)
        fam = Family("E3")
    cert = Certificate("counterstate", obj, pair_x(w, obj), target, fam,
                       f"{kind} violated (slack {rep.slack:.6g})")
    return _check(cert, tol)


def find_certificate(x: XMatrix, cone: Cone, tol: float = DEFAULT_TOL) -> Certificate:
    """Dispatch on whether ``cone`` is primal or dual."""
    if cone.is_dual:
        return find_witness_counterstate(x, cone, tol)
    return find_state_witness(x, cone, tol)


def _residual(x: XMatrix, terms: Sequence[Term]) -> float:
    return (x - rebuild(terms)).frobenius_norm() if terms else x.frobenius_norm()


_CONSTRUCTIVE_BLOCKS = {
    Cone.A: PARTY_PAIRS["A"],
    Cone.B: PARTY_PAIRS["B"],
    Cone.C: PARTY_PAIRS["C"],
    Cone.ABC_MEET: ((0, 1, 2, 3),),
}


def decompose_constructive(x: XMatrix, cone: Cone, tol: float = DEFAULT_TOL) -> Decomposition:
    """Exact split of a member of A, B, C or A^B^C into extreme rays.

    Each index block is handled on its own.  With ``m`` the largest
    ``|z_k|`` in the block, smaller anti-diagonal entries are written as
    convex mixes of ``+-m`` along their own phase, which leaves extreme
    rays of scale ``m`` plus diagonal remainders.
    """
    if cone not in _CONSTRUCTIVE_BLOCKS:
        raise InvalidInputError(f"constructive decomposition covers A, B, C, A^B^C; got {cone}")
    if not state_in_cone(x, cone, tol).member:
        raise NoCertificateError(f"state is not a member of {cone}")
    scale = 1.0 + x.magnitude
    terms: list[Term] = []
    for block in _CONSTRUCTIVE_BLOCKS[cone]:
        m = max(abs(x.z[k]) for k in block)
        used = {k: (0.0, 0.0) for k in block}
        if m > tol * scale and all(x.a[k] > 0 and x.b[k] > 0 for k in block):
            ratios = tuple(math.sqrt(x.a[k] / x.b[k]) for k in block)
            used = {k: (m * r, m / r) for k, r in zip(block, ratios)}
            options = []
            for k in block:
                mod, t = abs(x.z[k]), _phase(x.z[k])
                if m - mod <= 0:
                    options.append([(1.0, t)])
                else:
                    options.append([((m + mod) / (2 * m), t), ((m - mod) / (2 * m), t + math.pi)])
            fam = Family("E3") if len(block) == 4 else Family("E1", block, cone.value)
            for branch in itertools.product(*options):
                weight = m * math.prod(wt for wt, _ in branch)
                if weight > 0:
                    terms.append(Term(weight, fam, GeneratorParams(ratios, tuple(t for _, t in branch))))
        for k in block:
            for side, have, spent in (("a", x.a[k], used[k][0]), ("b", x.b[k], used[k][1])):
                rest = have - spent
                if rest > 0:
                    terms.append(Term(rest, delta(k, side), GeneratorParams()))
    return Decomposition(tuple(terms), cone, _residual(x, terms), "constructive")


@dataclass(frozen=True)
class DictionaryGrid:
    """Atom dictionary for ``decompose_dictionary``.

    Each free ratio ranges over ``ratio_points`` log-spaced values on
    ``ratio_range`` plus, when ``include_target`` is set, the target's own
    ratio ``sqrt(a_k / b_k)``.  Phases are locked to ``arg z_k`` and
    ``arg z_k + pi``.  Atom families whose product of ratio choices exceeds
    ``max_family_atoms`` keep only the target ratios.
    """

    ratio_points: int = 9
    ratio_range: tuple[float, float] = (1 / 8, 8.0)
    include_target: bool = True
    max_family_atoms: int = 1024


def _dictionary(x: XMatrix, cone: Cone, grid: DictionaryGrid) -> list[tuple[Family, GeneratorParams]]:
    lo, hi = np.log(grid.ratio_range)
    base = list(np.exp(np.linspace(lo, hi, grid.ratio_points))) if grid.ratio_points > 0 else []
    atoms = []
    for f in ext_families(cone):
        if f.tag == "Delta":
            atoms.append((f, GeneratorParams()))
            continue
        choices = []
        target_only = []
        for k in f.ratio_indices:
            tgt = [math.sqrt(x.a[k] / x.b[k])] if grid.include_target and x.a[k] > 0 and x.b[k] > 0 else []
            choices.append(tgt + base)
            # an atom touching a zero diagonal cannot carry weight in an exact fit
            target_only.append(tgt or [1.0])
        if math.prod(len(c) for c in choices) * 2 ** len(f.phase_indices) > grid.max_family_atoms:
            choices = target_only
        phases = [(_phase(x.z[k]), _phase(x.z[k]) + math.pi) for k in f.phase_indices]
        for rs in itertools.product(*choices):
            for ts in itertools.product(*phases):
                atoms.append((f, GeneratorParams(tuple(float(r) for r in rs), ts)))
    return atoms


def _frobenius_weights() -> np.ndarray:
    # (a, b, Re z, Im z) coordinates; anti-diagonal entries appear twice in the matrix
    return np.concatenate([np.ones(8), np.full(8, math.sqrt(2.0))])


def decompose_dictionary(x: XMatrix, cone: Cone, grid: DictionaryGrid | None = None,
                         tol: float = DEFAULT_TOL) -> Decomposition:
    """Best nonnegative fit of ``x`` by a finite dictionary of extreme rays of ``cone``.

    A residual within tolerance certifies membership constructively.  A
    larger residual is inconclusive and never proves non-membership.
    """
    grid = grid or DictionaryGrid()
    atoms = _dictionary(x, cone, grid)
    fw = _frobenius_weights()
    mat = np.array([generator(f, p).to_vector() * fw for f, p in atoms]).T
    target = x.to_vector() * fw
    weights, _ = nnls(mat, target, maxiter=max(10 * mat.shape[1], 1000))
    terms = [Term(float(w), f, p) for w, (f, p) in zip(weights, atoms) if w > 0]
    return Decomposition(tuple(terms), cone, _residual(x, terms), "dictionary")


def verify_decomposition(d: Decomposition, x: XMatrix, tol: float = DEFAULT_TOL) -> bool:
    """Independent re-check: signs, family patterns, cone membership, reconstruction."""
    for t in d.terms:
        if not (math.isfinite(t.weight) and t.weight >= 0):
            return False
        try:
            g = generator(t.family, t.params)
        except InvalidInputError:
            return False
        if t.family not in ext_families(d.cone):
            return False
        if not matches_family(g, t.family, tol):
            return False
        if not in_cone(g, d.cone, tol).member:
            return False
    error = (x - rebuild(d.terms)).frobenius_norm() if d.terms else x.frobenius_norm()
    return error <= tol * (1.0 + x.magnitude)


@dataclass(frozen=True)
class FuzzResult:
    primal: Cone
    dual: Cone
    trials: int
    min_pairing: float
    passed: bool

    def to_dict(self) -> dict:
        return {"primal": self.primal.value, "dual": self.dual.value, "trials": self.trials,
                "min_pairing": self.min_pairing, "passed": self.passed}


def _unit_rows(v: np.ndarray) -> np.ndarray:
    fw = _frobenius_weights()
    return v / np.linalg.norm(v * fw, axis=1, keepdims=True)


def duality_fuzz(pairs: Sequence[tuple[Cone, Cone]], trials: int, seed: int,
                 tol: float = DEFAULT_TOL, spread: Spread | None = None) -> list[FuzzResult]:
    """Sample ``trials`` member pairs per (primal, dual) pair and record the smallest pairing.

    Both members are scaled to unit Frobenius norm first, so the bound
    ``min >= -tol`` is independent of sample magnitude.
    """
    results = []
    seeds = np.random.SeedSequence(seed).spawn(len(pairs))
    for (primal, dual), ss in zip(pairs, seeds):
        if primal.is_dual or dual != primal.dual:
            raise InvalidInputError(f"{dual} is not the dual of {primal}")
        rng = np.random.default_rng(ss)
        rho = _unit_rows(sample_vectors(primal, trials, rng, spread))
        wit = _unit_rows(sample_vectors(dual, trials, rng, spread))
        vals = (np.einsum("nd,nd->n", rho[:, :8], wit[:, :8])
                + 2.0 * (rho[:, 8:12] * wit[:, 8:12] - rho[:, 12:] * wit[:, 12:]).sum(axis=1))
        lowest = float(vals.min())
        results.append(FuzzResult(primal, dual, trials, lowest, lowest >= -tol))
    return results


ALL_DUALITY_PAIRS = tuple((c, c.dual) for c in Cone if not c.is_dual)
