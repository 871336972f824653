from math import comb

import pytest
from hypothesis import given, strategies as st

from floquet_coe.errors import SizeLimitError
from floquet_coe.hilbert import enumerate_bose_basis, enumerate_spin_basis


def test_spin_l2_states():
    b = enumerate_spin_basis(2)
    assert b.states == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert b.N == 4 and b.D == 2


def test_spin_sizes():
    assert enumerate_spin_basis(10).N == 1024
    assert enumerate_spin_basis(1).states == ((0,), (1,))


@pytest.mark.parametrize("L", [0, 15])
def test_spin_guard(L):
    with pytest.raises(SizeLimitError):
        enumerate_spin_basis(L)


def test_bose_small_cases():
    assert enumerate_bose_basis(2, 1).states == ((0, 1), (1, 0))
    assert enumerate_bose_basis(3, 0).states == ((0, 0, 0),)
    assert enumerate_bose_basis(10, 5).N == comb(14, 5) == 2002


def test_bose_guard():
    with pytest.raises(SizeLimitError):
        enumerate_bose_basis(20, 10)


@given(st.integers(1, 9))
def test_spin_ordinal_is_binary_value(L):
    b = enumerate_spin_basis(L)
    for k, s in enumerate(b.states):
        assert int("".join(map(str, s)), 2) == k
        assert b.index_of[s] == k


@given(st.integers(1, 6), st.integers(0, 6))
def test_bose_basis_invariants(L, n):
    b = enumerate_bose_basis(L, n)
    assert b.N == comb(n + L - 1, n)
    assert all(sum(s) == n for s in b.states)
    assert list(b.states) == sorted(set(b.states))
    assert all(b.index_of[s] == k for k, s in enumerate(b.states))
