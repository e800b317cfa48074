"""Randomized self-checks shared by the CLI ``verify`` command and the tests."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .certify import (
    ALL_DUALITY_PAIRS,
    Decomposition,
    decompose_constructive,
    duality_fuzz,
    verify_decomposition,
)
from .classify import LatticeConsistencyError, lattice_profile
from .criteria import PRIMAL_INCLUSIONS, BASIC, Cone, state_in_cone
from .extremals import random_xmatrices, sample_cone
from .xcore import DEFAULT_TOL, InvalidInputError, embed, is_psd_full, partial_transpose_full

SUITES = ("duality", "ppt", "lattice", "roundtrip")


@dataclass
class SuiteResult:
    suite: str
    trials: int
    failures: int
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {"suite": self.suite, "trials": self.trials, "failures": self.failures,
                "passed": self.passed, **self.stats}


def run_duality(trials: int, seed: int, tol: float = DEFAULT_TOL) -> SuiteResult:
    results = duality_fuzz(ALL_DUALITY_PAIRS, trials, seed, tol)
    return SuiteResult(
        "duality", trials, sum(not r.passed for r in results),
        {"min_pairing": min(r.min_pairing for r in results),
         "pairs": [r.to_dict() for r in results]},
    )


def ppt_agreement(x, tol: float = DEFAULT_TOL) -> dict[Cone, tuple[bool, bool]]:
    """Inequality verdict vs. eigenvalue verdict for A, B, C and A^B^C."""
    h = embed(x)
    psd = is_psd_full(h, tol)
    pt_ok = {p: is_psd_full(partial_transpose_full(h, p), tol) for p in "ABC"}
    out = {}
    for p in "ABC":
        out[BASIC[p]] = (state_in_cone(x, BASIC[p], tol).member, psd and pt_ok[p])
    out[Cone.ABC_MEET] = (state_in_cone(x, Cone.ABC_MEET, tol).member, psd and all(pt_ok.values()))
    return out


def run_ppt(trials: int, seed: int, tol: float = DEFAULT_TOL) -> SuiteResult:
    xs = random_xmatrices(trials, np.random.default_rng(seed), kind="any")
    bad = 0
    members = 0
    for x in xs:
        verdicts = ppt_agreement(x, tol)
        bad += any(u != v for u, v in verdicts.values())
        members += verdicts[Cone.ABC_MEET][0]
    return SuiteResult("ppt", trials, bad, {"disagreements": bad, "abc_meet_members": members})


def run_lattice(trials: int, seed: int, tol: float = DEFAULT_TOL) -> SuiteResult:
    xs = random_xmatrices(trials, np.random.default_rng(seed), kind="state")
    bad = 0
    for x in xs:
        try:
            lattice_profile(x, tol)
        except LatticeConsistencyError:
            bad += 1
    return SuiteResult("lattice", trials, bad, {"arrows": len(PRIMAL_INCLUSIONS), "violations": bad})


def run_roundtrip(trials: int, seed: int, tol: float = DEFAULT_TOL) -> SuiteResult:
    """Decompose sampled members, pass the result through JSON, and re-verify."""
    bad = 0
    worst = 0.0
    seeds = np.random.SeedSequence(seed).generate_state(4)
    for cone, s in zip((Cone.A, Cone.B, Cone.C, Cone.ABC_MEET), seeds):
        for x in sample_cone(cone, trials, int(s)):
            d = decompose_constructive(x, cone, tol)
            back = Decomposition.from_dict(json.loads(json.dumps(d.to_dict())))
            worst = max(worst, back.residual / (1.0 + x.magnitude))
            bad += not verify_decomposition(back, x, tol)
    return SuiteResult("roundtrip", 4 * trials, bad, {"max_relative_residual": worst})


def run_suite(name: str, trials: int, seed: int, tol: float = DEFAULT_TOL) -> SuiteResult:
    if trials < 1:
        raise InvalidInputError("trials must be at least 1")
    runners = {"duality": run_duality, "ppt": run_ppt, "lattice": run_lattice,
               "roundtrip": run_roundtrip}
    if name not in runners:
        raise InvalidInputError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return runners[name](trials, seed, tol)
