import io

import numpy as np
import pytest

from helpers import random_density, random_povm
from qdet import _scan
from qdet.bayes import (
    binary_success,
    grouping_signature,
    map_regions,
    min_error,
    min_error_cost,
    normalize_cost,
    solve_bayes,
    trivial_threshold,
)
from qdet.errors import CapExceededError, DimMismatchError, ValidationError
from qdet.linalg import state_to_bloch
from qdet.povm import born_matrix, group_povm, make_ensemble, validate_povm
from qdet.sic import SIC_BLOCH, sic_qubit

S3 = np.sqrt(3)


@pytest.mark.parametrize(
    "n, gain, grouping",
    [(2, 0.5 + 1 / (2 * S3), (0, 0, 1, 1)), (3, 0.5 + 1 / (6 * S3), (0, 0, 1, 2)), (6, 1 / 3, (0, 1, 2, 3))],
)
def test_sic_uniform_priors(backend, sic, n, gain, grouping):
    sol = min_error(sic, np.full(n, 1 / n))
    assert sol.gain == pytest.approx(gain, abs=1e-12)
    assert sol.grouping == grouping


def test_padded_messages_are_never_detected(sic):
    sol = min_error(sic, np.full(6, 1 / 6))
    np.testing.assert_allclose(sol.score_vector[4:], 0, atol=1e-15)
    np.testing.assert_allclose(sol.grouped_elements[4:], 0)


def test_noisy_sic_values():
    eps = 0.5
    povm = sic_qubit(eps).povm
    assert min_error(povm, [0.5, 0.5]).gain == pytest.approx(0.5 + eps / (2 * S3), abs=1e-12)
    assert min_error(povm, np.full(4, 0.25)).gain == pytest.approx((1 + eps) / 4, abs=1e-12)


def test_projective_basis_is_perfect():
    povm = validate_povm([np.diag([1, 0]), np.diag([0, 1])])
    sol = min_error(povm, [0.7, 0.3])
    assert sol.gain == pytest.approx(1.0)
    np.testing.assert_allclose(sol.signal_states[0], np.diag([1, 0]), atol=1e-14)
    np.testing.assert_allclose(sol.signal_states[1], np.diag([0, 1]), atol=1e-14)


def test_sic_states_align_with_elements(sic):
    sol = min_error(sic, np.full(4, 0.25))
    for i, v in enumerate(sol.signal_vectors):
        b = state_to_bloch(np.outer(v, v.conj()))
        assert np.arccos(np.clip(b @ SIC_BLOCH[i], -1, 1)) < 1e-6


def test_solution_is_self_consistent(rng):
    povm = random_povm(3, 4, rng)
    priors = np.array([0.5, 0.3, 0.2])
    cost = rng.random((3, 3)) * 5
    sol = solve_bayes(povm, priors, cost)
    ens = make_ensemble(priors, sol.signal_states)
    P = born_matrix(ens, group_povm(povm, sol.grouping, 3))
    assert (cost * P).sum() == pytest.approx(sol.original_cost, abs=1e-12)
    assert sol.gain == pytest.approx(priors @ sol.score_vector, abs=1e-15)


def test_normalize_cost():
    gain, scale, offset = normalize_cost([[1, 3], [5, 1]])
    np.testing.assert_allclose(gain, [[1, 0.5], [0, 1]])
    assert (scale, offset) == (4, 1)
    gain, scale, offset = normalize_cost(np.full((2, 2), 2.0))
    np.testing.assert_allclose(gain, 1)
    assert (scale, offset) == (1.0, 2.0)
    with pytest.raises(ValidationError):
        normalize_cost([[-1, 0], [0, 0]])


def test_constant_cost_has_constant_value(sic):
    sol = solve_bayes(sic, [0.5, 0.5], np.full((2, 2), 3.0))
    assert sol.original_cost == pytest.approx(3.0)


def test_random_strategies_never_win(rng):
    for _ in range(20):
        povm = random_povm(2, 3, rng)
        priors = rng.dirichlet(np.ones(2))
        cost = rng.random((2, 2))
        sol = solve_bayes(povm, priors, cost)
        gain_matrix, _, _ = normalize_cost(cost)
        for _ in range(200):
            states = [random_density(2, rng) for _ in range(2)]
            decode = rng.dirichlet(np.ones(2), size=3)
            cond = np.array([[np.trace(r @ E).real for E in povm] for r in states]) @ decode
            assert priors @ (gain_matrix * cond).sum(axis=1) <= sol.gain + 1e-9


def test_input_errors(sic):
    with pytest.raises(ValidationError):
        min_error(sic, [0.5, 0.6])
    with pytest.raises(ValidationError):
        min_error(sic, [1.0, 0.0])
    with pytest.raises(DimMismatchError):
        solve_bayes(sic, [0.5, 0.5], np.ones((3, 3)))
    with pytest.raises(CapExceededError):
        min_error(sic, np.full(6, 1 / 6), cap=1000)


def test_scan_is_chunk_independent(rng):
    gains = np.round(rng.random(1000), 2)

    def chunk(a, b):
        return gains[a:b, None]

    results = {_scan.first_best(1000, chunk, lambda s: s[:, 0], c)[0] for c in (1, 7, 64, 1000)}
    assert results == {int(np.argmax(gains))}


def test_binary_success_examples(backend, sic):
    p, g = binary_success(sic, [0.5, 0.5])
    assert p == pytest.approx((1 + 1 / S3) / 2, abs=1e-12)
    p, g = binary_success(sic, [1 - 1e-15, 1e-15])
    assert p == pytest.approx(1.0, abs=1e-12)
    assert g == (0, 0, 0, 0)


def test_binary_success_matches_general_solver(rng):
    for _ in range(10):
        povm = random_povm(2, 3, rng)
        priors = rng.dirichlet(np.ones(2))
        assert binary_success(povm, priors)[0] == pytest.approx(min_error(povm, priors).gain, abs=1e-10)


def test_trivial_threshold():
    assert trivial_threshold(np.diag([0.9, 0.3])) == pytest.approx(0.875)
    assert trivial_threshold(np.diag([1.0, 0.0])) == 1.0
    assert trivial_threshold(np.eye(2) / 2) == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        trivial_threshold(np.diag([1.2, 0.0]))


def test_trivial_threshold_against_prior_grid():
    E = np.diag([0.9, 0.3])
    povm = validate_povm([E, np.eye(2) - E])
    thr = trivial_threshold(E)
    for p1 in np.linspace(0.5, 0.99, 50):
        p2 = 1 - p1
        measured = max(0.9 * p1 + 0.7 * p2, 0.7 * p1 + 0.9 * p2)
        assert binary_success(povm, [p1, p2])[0] == pytest.approx(max(measured, p1), abs=1e-12)
        if p1 > thr + 1e-9:
            assert p1 > measured
        elif p1 < thr - 1e-9:
            assert p1 < measured


def test_grouping_signature_orders_by_prior():
    assert grouping_signature((0, 0, 1, 2), [0.5, 0.3, 0.2], 3) == "2-1-1"
    assert grouping_signature((2, 2, 1, 0), [0.2, 0.3, 0.5], 3) == "2-1-1"
    assert grouping_signature((1, 1, 1, 0), [0.4, 0.4, 0.2], 3) == "3-1-0"


def test_region_map_basics(sic):
    rm = map_regions(sic, 0.05)
    assert len(rm) == 21 * 22 // 2
    np.testing.assert_allclose(rm.priors.sum(axis=1), 1)
    centre = np.argmin(np.abs(rm.priors - 1 / 3).sum(axis=1))
    buf = io.StringIO()
    rm.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "pi1,pi2,pi3,grouping_id,gain"
    assert len(lines) == len(rm) + 1
    ordered = map_regions(sic, 0.05, ordered=True)
    assert np.all(ordered.priors[:, 0] >= ordered.priors[:, 1] - 1e-12)
    assert np.all(ordered.priors[:, 1] >= ordered.priors[:, 2] - 1e-12)
    assert rm.grouping_ids[centre] in ("2-1-1", "2-2-0", "3-1-0")


def test_region_map_uniform_cell_is_grouping_b(sic):
    rm = map_regions(sic, 1 / 30)
    k = int(np.argmin(np.abs(rm.priors - 1 / 3).sum(axis=1)))
    np.testing.assert_allclose(rm.priors[k], 1 / 3)
    assert rm.grouping_ids[k] == "2-1-1"


def test_region_gains_match_solver(sic, rng):
    rm = map_regions(sic, 0.1)
    for k in rng.choice(len(rm), 10, replace=False):
        p = rm.priors[k]
        if p.min() > 0:
            assert rm.gains[k] == pytest.approx(min_error(sic, p).gain, abs=1e-12)


def test_region_map_caps(sic):
    with pytest.raises(CapExceededError):
        map_regions(sic, 1e-6)
    with pytest.raises(DimMismatchError):
        map_regions(sic, 0.1, cost=min_error_cost(2))
