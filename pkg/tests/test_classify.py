import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from xcone.classify import (
    FULLY_BISEPARABLE,
    GENUINELY_ENTANGLED,
    NOT_A_STATE,
    SIGNATURE_CONES,
    LatticeConsistencyError,
    LatticeProfile,
    classify,
    lattice_profile,
    partition_class,
    permute_label,
    witness_profile,
)
from xcone.criteria import DUAL_CONES, PRIMAL_CONES, Cone
from xcone.extremals import Family, GeneratorParams, delta, generator, random_xmatrices, sample_cone
from xcone.xcore import all_system_permutations, ghz, make_x, permute_systems

from conftest import xmatrices


def _profile(members, psd=True):
    return LatticeProfile(tuple((c, c in members) for c in PRIMAL_CONES), psd)


def test_golden_class(golden):
    label = classify(golden)
    assert label.name == "C^{2,6,1}"
    assert label.party == "A"
    assert label.bits == "1001111"


def test_golden_profile(golden):
    p = lattice_profile(golden)
    assert p.psd
    assert {c for c in PRIMAL_CONES if p[c]} == {Cone.A, Cone.AB_JOIN, Cone.BC_JOIN, Cone.CA_JOIN, Cone.ABC_JOIN}


def test_trivial_classes():
    assert classify(ghz()).name == GENUINELY_ENTANGLED
    assert lattice_profile(ghz()).psd
    assert classify(make_x((1,) * 4, (1,) * 4, (0,) * 4)).name == FULLY_BISEPARABLE
    bad = classify(make_x((1,) * 4, (1,) * 4, (2, 0, 0, 0)))
    assert bad.name == NOT_A_STATE and bad.signature == (False,) * 7


def test_named_tables():
    joins = {Cone.AB_JOIN, Cone.BC_JOIN, Cone.CA_JOIN, Cone.ABC_JOIN}
    assert partition_class(_profile(joins)).name == "C^{2,4}"
    assert partition_class(_profile(joins | {Cone.B})).name == "C^{2,6,1}(B)"
    label = partition_class(_profile({Cone.AB_JOIN, Cone.CA_JOIN, Cone.ABC_JOIN}))
    assert label.name == "C^{2,3,1}" and label.party == "A"
    assert partition_class(_profile({Cone.BC_JOIN, Cone.AB_JOIN, Cone.ABC_JOIN})).name == "C^{2,3,1}(B)"
    assert partition_class(_profile({Cone.ABC_JOIN})).name == "sig:0000001"
    assert partition_class(_profile(set(PRIMAL_CONES))).name == FULLY_BISEPARABLE


def test_inconsistent_profile_is_detected():
    assert _profile({Cone.A}).violations()
    assert not _profile({Cone.A, Cone.AB_JOIN, Cone.CA_JOIN, Cone.ABC_JOIN}).violations()


@given(xmatrices("state"))
def test_name_is_function_of_signature(x):
    label = classify(x)
    p = lattice_profile(x)
    assert label.signature == tuple(p[c] for c in SIGNATURE_CONES)
    if label.name.startswith("sig:"):
        assert label.name == "sig:" + label.bits


@given(xmatrices("state"), st.floats(1e-3, 1e3))
def test_class_is_scale_invariant(x, c):
    a, b = classify(x), classify(c * x)
    if a != b:
        # only allowed when x sits on a cone boundary
        from xcone.criteria import state_in_cone
        assert min(abs(state_in_cone(x, k).min_slack) for k in PRIMAL_CONES) < 1e-7 * (1 + x.magnitude)


def test_permutation_covariance():
    xs = random_xmatrices(400, np.random.default_rng(5), "state")
    xs += sample_cone(Cone.BC_JOIN, 100, 1) + sample_cone(Cone.A, 50, 2)
    for x in xs:
        label = classify(x)
        for perm in all_system_permutations():
            assert classify(permute_systems(x, perm)) == permute_label(label, perm)


def test_named_classes_appear_in_samples():
    names = {classify(x).name for x in sample_cone(Cone.ABC_JOIN, 2000, 8)}
    for n in ("C^{2,4}", "C^{2,6,1}", "C^{2,3,1}", FULLY_BISEPARABLE):
        assert any(m.startswith(n) for m in names)


def test_witness_profile_examples():
    we2 = generator(Family("We2", (0, 3), "BC"), GeneratorParams((1.0, 2.0), (0.4, 1.1)))
    p = witness_profile(we2)
    assert p[Cone.BC_JOIN_DUAL] and p[Cone.BC_MEET_DUAL] and p[Cone.ABC_MEET_DUAL]
    assert not p[Cone.A_DUAL]
    d = witness_profile(generator(delta(2, "b")))
    assert all(d[c] for c in DUAL_CONES)
    z = witness_profile(make_x((0,) * 4, (0,) * 4, (1, 1, 1, 1)))
    assert not any(z[c] for c in DUAL_CONES)


@given(xmatrices("witness"))
def test_witness_profile_is_monotone(w):
    assert not witness_profile(w).violations()


def test_consistency_error_type():
    assert issubclass(LatticeConsistencyError, RuntimeError)
