import numpy as np
import pytest
from hypothesis import given

from xcone.xcore import (
    InvalidInputError,
    XMatrix,
    all_system_permutations,
    as_hermitian8,
    embed,
    ghz,
    is_psd_full,
    is_psd_x,
    make_x,
    off_x_norm,
    pair_full,
    pair_x,
    partial_transpose,
    partial_transpose_full,
    permute_systems,
    x_part,
    x_single,
)

from conftest import xmatrices


def test_embed_places_entries():
    x = make_x((1, 2, 3, 4), (5, 6, 7, 8), (1j, 2, 3, 4 - 1j))
    h = embed(x)
    assert h[0, 0] == 1 and h[7, 7] == 5 and h[4, 4] == 8
    assert h[0, 7] == 1j and h[7, 0] == -1j
    assert h[3, 4] == 4 - 1j and h[4, 3] == 4 + 1j
    assert off_x_norm(h) == 0


@given(xmatrices())
def test_x_part_inverts_embed(x):
    assert x_part(embed(x)) == x


@given(xmatrices(), xmatrices())
def test_pairing_matches_trace(w, r):
    assert pair_x(w, r) == pytest.approx(pair_full(embed(w), embed(r)), abs=1e-9)


@given(xmatrices())
def test_vector_roundtrip(x):
    assert XMatrix.from_vector(x.to_vector()) == x


@given(xmatrices(), xmatrices())
def test_arithmetic(x, y):
    np.testing.assert_allclose((x + y).to_vector(), x.to_vector() + y.to_vector())
    np.testing.assert_allclose((2.5 * x - y).to_vector(), 2.5 * x.to_vector() - y.to_vector())
    assert (-x).to_vector().tolist() == (-1 * x).to_vector().tolist()


@pytest.mark.parametrize("party", "ABC")
@given(x=xmatrices())
def test_partial_transpose_matches_full(party, x):
    expected = partial_transpose_full(embed(x), party)
    np.testing.assert_allclose(embed(partial_transpose(x, party)), expected, atol=1e-12)


@pytest.mark.parametrize("party", "ABC")
@given(x=xmatrices())
def test_partial_transpose_is_involution(party, x):
    assert partial_transpose(partial_transpose(x, party), party) == x


@given(xmatrices())
def test_psd_blocks_match_eigenvalues(x):
    assert is_psd_x(x, 1e-9) == is_psd_full(embed(x), 1e-9) or abs(
        np.linalg.eigvalsh(embed(x))[0]) < 1e-6


def test_validation():
    with pytest.raises(InvalidInputError):
        make_x((1, 2, 3), (0, 0, 0, 0), (0, 0, 0, 0))
    with pytest.raises(InvalidInputError):
        make_x((1, 2, 3, float("nan")), (0, 0, 0, 0), (0, 0, 0, 0))
    with pytest.raises(InvalidInputError):
        make_x((0,) * 4, (0,) * 4, ([1, 2, 3],) * 4)
    with pytest.raises(InvalidInputError, match="unknown party"):
        partial_transpose(ghz(), "D")


def test_hermitian_check_names_entries():
    h = np.zeros((8, 8), complex)
    h[2, 5] = 1.0
    with pytest.raises(InvalidInputError, match=r"\(3,6\)"):
        as_hermitian8(h)
    with pytest.raises(InvalidInputError):
        as_hermitian8(np.zeros((4, 4)))


def test_x_single_and_ghz():
    assert x_single(0, 1, 1, 1) == ghz()
    assert is_psd_x(ghz())


@given(xmatrices())
def test_permutation_matches_full_relabelling(x):
    # moving party A to slot B and back: swapping two factors twice is the identity
    swap = {"A": "B", "B": "A", "C": "C"}
    assert permute_systems(permute_systems(x, swap), swap) == x
    assert len(all_system_permutations()) == 6


def test_permutation_moves_partial_transpose():
    x = make_x((1, 2, 3, 4), (4, 3, 2, 1), (1 + 1j, 0.5, -0.25j, 2))
    for perm in all_system_permutations():
        for p in "ABC":
            lhs = permute_systems(partial_transpose(x, p), perm)
            rhs = partial_transpose(permute_systems(x, perm), perm[p])
            np.testing.assert_allclose(lhs.to_vector(), rhs.to_vector(), atol=1e-12)
