import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from xcone.certify import (
    ALL_DUALITY_PAIRS,
    Certificate,
    CertificateError,
    Decomposition,
    DictionaryGrid,
    NoCertificateError,
    decompose_constructive,
    decompose_dictionary,
    duality_fuzz,
    find_certificate,
    find_state_witness,
    find_witness_counterstate,
    verify_decomposition,
)
from xcone.criteria import DUAL_CONES, PRIMAL_CONES, Cone, in_cone
from xcone.extremals import Family, GeneratorParams, Term, delta, ext_families, random_xmatrices, sample_cone
from xcone.xcore import InvalidInputError, XMatrix, embed, ghz, make_x, pair_full, pair_x

from conftest import xmatrices


def _valid(cert: Certificate, x: XMatrix, tol=1e-9):
    assert cert.pairing < -tol
    assert cert.pairing == pytest.approx(pair_x(cert.obj, x), abs=1e-12)
    assert cert.pairing == pytest.approx(pair_full(embed(cert.obj), embed(x)), abs=1e-9)
    assert in_cone(cert.obj, cert.cone, tol).member


def test_witness_against_b(golden):
    cert = find_state_witness(golden, Cone.B)
    _valid(cert, golden)
    assert cert.pairing == -2
    assert cert.obj == make_x((1, 0, 0, 0), (1, 0, 0, 0), (0, 0, -1, 0))
    assert cert.cone is Cone.B_DUAL


def test_ghz_witness():
    cert = find_state_witness(ghz(), Cone.ABC_JOIN)
    _valid(cert, ghz())
    assert cert.pairing == pytest.approx(-2, abs=1e-12)
    assert str(cert.family) == "We3(1)"
    assert in_cone(cert.obj, Cone.ABC_MEET_DUAL).member


def test_member_has_no_witness(golden):
    with pytest.raises(NoCertificateError):
        find_state_witness(golden, Cone.A)
    with pytest.raises(NoCertificateError):
        find_witness_counterstate(make_x((1,) * 4, (1,) * 4, (0,) * 4), Cone.A_DUAL)


@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
def test_witness_phase_alignment(t1, t2):
    # complex phases must be undone, not doubled
    x = make_x((1, 1, 1, 1), (1, 1, 1, 1), (0, 0, 2 * complex(math.cos(t1), math.sin(t1)),
                                              0.5 * complex(math.cos(t2), math.sin(t2))))
    for cone in (Cone.B, Cone.ABC_MEET, Cone.BC_MEET):
        _valid(find_state_witness(x, cone), x)


def test_unbalanced_diagonals():
    # needs the ratio sqrt(b/a) on the summed indices to get a negative pairing
    x = make_x((1, 4, 1e-4, 1), (1, 1e-4, 4, 1e-4), (1, 0, 0, 0))
    cert = find_state_witness(x, Cone.ABC_JOIN)
    _valid(cert, x)


def test_counterstates():
    w = make_x((1, 0, 0, 0), (1, 0, 0, 0), (0, 0, 0, 3))
    cert = find_witness_counterstate(w, Cone.A_DUAL)
    _valid(cert, w)
    assert cert.kind == "counterstate" and cert.cone is Cone.A
    w3 = make_x((1,) * 4, (1,) * 4, (3, 3, 0, 0))
    _valid(find_witness_counterstate(w3, Cone.ABC_MEET_DUAL), w3)


def test_positivity_certificates():
    bad = make_x((-1, 1, 1, 1), (1, 1, 1, 1), (0, 0, 0, 0))
    cert = find_certificate(bad, Cone.ABC_JOIN)
    _valid(cert, bad)
    notpsd = make_x((1, 1, 1, 1), (1, 1, 1, 1), (2, 0, 0, 0))
    _valid(find_certificate(notpsd, Cone.ABC_JOIN), notpsd)
    wit = make_x((1, -1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 0))
    _valid(find_certificate(wit, Cone.A_DUAL), wit)


@pytest.mark.parametrize("cone", PRIMAL_CONES, ids=str)
@given(x=xmatrices("state"))
def test_state_certificate_completeness(cone, x):
    if in_cone(x, cone).member:
        with pytest.raises(NoCertificateError):
            find_certificate(x, cone)
    else:
        _valid(find_certificate(x, cone), x)


@pytest.mark.parametrize("cone", DUAL_CONES, ids=str)
@given(w=xmatrices("witness"))
def test_witness_certificate_completeness(cone, w):
    if in_cone(w, cone).member:
        with pytest.raises(NoCertificateError):
            find_certificate(w, cone)
    else:
        _valid(find_certificate(w, cone), w)


def test_constructive_example():
    x = make_x((2, 0, 0, 1), (1, 0, 0, 1), (1, 0, 0, 1))
    d = decompose_constructive(x, Cone.A)
    assert d.residual == 0
    assert verify_decomposition(d, x)
    e1 = [t for t in d.terms if t.family.tag == "E1"]
    assert len(e1) == 1 and e1[0].params.ratios == pytest.approx((math.sqrt(2), 1))
    rest = {str(t.family): t.weight for t in d.terms if t.family.tag == "Delta"}
    assert rest["Delta(1,a)"] == pytest.approx(2 - math.sqrt(2))
    assert rest["Delta(1,b)"] == pytest.approx(1 - 1 / math.sqrt(2))


def test_constructive_worked_example(golden):
    assert verify_decomposition(decompose_constructive(golden, Cone.A), golden)


@pytest.mark.parametrize("cone", [Cone.A, Cone.B, Cone.C, Cone.ABC_MEET], ids=str)
def test_constructive_on_samples(cone):
    for x in sample_cone(cone, 150, 5):
        d = decompose_constructive(x, cone)
        assert verify_decomposition(d, x)
        assert d.residual <= 1e-9 * (1 + x.magnitude)


@pytest.mark.parametrize("cone", [Cone.A, Cone.B, Cone.C, Cone.ABC_MEET], ids=str)
@given(x=xmatrices("state"))
def test_constructive_on_random_members(cone, x):
    if in_cone(x, cone).member:
        assert verify_decomposition(decompose_constructive(x, cone), x, 1e-8)


def test_constructive_rejects():
    with pytest.raises(InvalidInputError):
        decompose_constructive(ghz(), Cone.BC_JOIN)
    with pytest.raises(NoCertificateError):
        decompose_constructive(ghz(), Cone.A)


@pytest.mark.parametrize("cone", [Cone.BC_JOIN, Cone.AB_MEET, Cone.ABC_JOIN, Cone.C], ids=str)
def test_dictionary_fits_members(cone):
    for x in sample_cone(cone, 40, 9):
        d = decompose_dictionary(x, cone)
        assert d.residual <= 1e-6 * (1 + x.magnitude)
        assert all(t.family in ext_families(cone) for t in d.terms)


def test_dictionary_example(golden):
    d = decompose_dictionary(golden, Cone.BC_JOIN)
    assert d.residual <= 1e-6
    assert verify_decomposition(d, golden)


def test_dictionary_residual_for_outsider():
    d = decompose_dictionary(ghz(), Cone.ABC_JOIN, DictionaryGrid(ratio_points=3))
    assert d.residual > 1e-3
    assert not verify_decomposition(d, ghz())


def test_verify_rejects_tampering():
    x = make_x((2, 0, 0, 1), (1, 0, 0, 1), (1, 0, 0, 1))
    d = decompose_constructive(x, Cone.A)
    neg = Decomposition((Term(-1.0, delta(0), GeneratorParams()),) + d.terms, d.cone, d.residual)
    assert not verify_decomposition(neg, x)
    foreign = Decomposition(d.terms, Cone.B, d.residual)
    assert not verify_decomposition(foreign, x)
    short = Decomposition(d.terms[1:], d.cone, d.residual)
    assert not verify_decomposition(short, x)


def test_decomposition_json_roundtrip():
    for x in sample_cone(Cone.ABC_MEET, 20, 2):
        d = decompose_constructive(x, Cone.ABC_MEET)
        back = Decomposition.from_dict(json.loads(json.dumps(d.to_dict())))
        assert back == d
        assert verify_decomposition(back, x)


def test_duality_fuzz_small():
    res = duality_fuzz(ALL_DUALITY_PAIRS, 2000, 3)
    assert len(res) == 11 and all(r.passed for r in res)
    with pytest.raises(InvalidInputError):
        duality_fuzz([(Cone.A, Cone.B_DUAL)], 10, 0)


def test_fuzz_is_seeded():
    a = duality_fuzz(ALL_DUALITY_PAIRS[:2], 500, 4)
    b = duality_fuzz(ALL_DUALITY_PAIRS[:2], 500, 4)
    assert [r.min_pairing for r in a] == [r.min_pairing for r in b]


def test_mixed_random_certificates(rng):
    for x in random_xmatrices(300, rng, "any"):
        for cone in (Cone.A, Cone.ABC_JOIN, Cone.CA_JOIN):
            if not in_cone(x, cone).member:
                _valid(find_certificate(x, cone), x)
