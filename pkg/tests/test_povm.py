import numpy as np
import pytest

from helpers import random_density, random_povm
from qdet.errors import (
    CapExceededError,
    DimMismatchError,
    InvalidEnsembleError,
    NotCompleteError,
    NotPositiveError,
    ValidationError,
)
from qdet.povm import (
    born_matrix,
    enumerate_groupings,
    group_povm,
    grouping_at,
    make_ensemble,
    num_groupings,
    validate_povm,
)
from qdet.sic import sic_elements


def test_projective_basis_is_valid():
    p = validate_povm([np.diag([1, 0]), np.diag([0, 1])])
    assert p.num_outcomes == 2 and p.dim == 2


def test_sic_is_valid(sic):
    assert len(sic) == 4


def test_negative_element_reports_index_and_eigenvalue():
    with pytest.raises(NotPositiveError) as err:
        validate_povm([np.diag([1.2, 0]), np.diag([-0.2, 1])])
    assert err.value.index == 2
    assert err.value.min_eigenvalue == pytest.approx(-0.2)


def test_incomplete_and_mismatched():
    with pytest.raises(NotCompleteError):
        validate_povm([np.diag([1, 0]), np.diag([0, 0.9])])
    with pytest.raises(DimMismatchError):
        validate_povm([np.eye(2), np.zeros((3, 3))])
    with pytest.raises(ValidationError):
        validate_povm([])


def test_elements_are_read_only(sic):
    with pytest.raises(ValueError):
        sic.elements[0, 0, 0] = 1


def test_ensemble_validation():
    e = make_ensemble([0.5, 0.5], [[1, 0], [0, 1]])
    np.testing.assert_allclose(e.states[1], np.diag([0, 1]))
    with pytest.raises(InvalidEnsembleError):
        make_ensemble([0.6, 0.5], [[1, 0], [0, 1]])
    with pytest.raises(InvalidEnsembleError):
        make_ensemble([1.0, 0.0], [[1, 0], [0, 1]])
    with pytest.raises(InvalidEnsembleError):
        make_ensemble([1.0], [np.diag([0.5, 0.6])])
    with pytest.raises(InvalidEnsembleError):
        make_ensemble([1.0], [np.diag([1.5, -0.5])])
    with pytest.raises(DimMismatchError):
        make_ensemble([1.0], np.zeros((2, 2, 3)))


def test_born_matrix_examples(sic):
    basis = validate_povm([np.diag([1, 0]), np.diag([0, 1])])
    e = make_ensemble([0.5, 0.5], [[1, 0], [0, 1]])
    np.testing.assert_allclose(born_matrix(e, basis), np.eye(2) / 2)
    mixed = make_ensemble([1.0], [np.eye(2) / 2])
    np.testing.assert_allclose(born_matrix(mixed, sic), [[0.25] * 4])


def test_born_matrix_matches_monte_carlo(rng):
    povm = random_povm(2, 3, rng)
    priors = np.array([0.3, 0.7])
    ens = make_ensemble(priors, [random_density(2, rng), random_density(2, rng)])
    P = born_matrix(ens, povm)
    n = 10**6
    # sample message, then outcome, by inverse-CDF on independently computed probabilities
    msg = rng.choice(2, size=n, p=priors)
    cond = np.array([[np.trace(r @ E).real for E in povm] for r in ens.states])
    u = rng.random(n)
    outcome = (u[:, None] > np.cumsum(cond[msg], axis=1)).sum(axis=1)
    freq = np.zeros((2, 3))
    np.add.at(freq, (msg, np.minimum(outcome, 2)), 1)
    freq /= n
    sigma = np.sqrt(P * (1 - P) / n)
    assert np.all(np.abs(freq - P) <= 4 * sigma + 1e-12)


def test_born_matrix_dimension_check(sic):
    with pytest.raises(DimMismatchError):
        born_matrix(make_ensemble([1.0], [np.eye(3) / 3]), sic)


def test_group_povm_examples(sic):
    E = sic.elements
    C = group_povm(sic, (0, 0, 1, 1), 4).elements
    np.testing.assert_allclose(C[0], E[0] + E[1])
    np.testing.assert_allclose(C[1], E[2] + E[3])
    np.testing.assert_allclose(C[2:], 0)
    triv = group_povm(sic, (0, 0, 0, 0), 2).elements
    np.testing.assert_allclose(triv[0], np.eye(2), atol=1e-15)
    np.testing.assert_allclose(triv[1], 0)
    np.testing.assert_allclose(group_povm(sic, (0, 1, 2, 3)).elements, E)
    with pytest.raises(DimMismatchError):
        group_povm(sic, (0, 1))
    with pytest.raises(ValidationError):
        group_povm(sic, (0, 1, 2, 5), 4)


def test_grouped_povm_stays_complete(rng):
    povm = random_povm(3, 5, rng)
    g = group_povm(povm, tuple(rng.integers(0, 3, 5)), 3)
    np.testing.assert_allclose(g.elements.sum(axis=0), np.eye(3), atol=1e-12)


def test_enumeration_counts_and_order():
    assert num_groupings(4, 4) == 256
    assert len(list(enumerate_groupings(4, 4))) == 256
    assert list(enumerate_groupings(1, 1)) == [(0,)]
    all8 = list(enumerate_groupings(3, 2))
    assert len(set(all8)) == 8 and all8 == sorted(all8)
    for k, g in enumerate(enumerate_groupings(3, 3)):
        assert grouping_at(k, 3, 3) == g


def test_enumeration_cap():
    with pytest.raises(CapExceededError) as err:
        enumerate_groupings(10, 6)
    assert err.value.count == 6**10
