from __future__ import annotations

import pytest

from helpers import (
    ALL_BINARY2,
    CLIP3,
    MIN2,
    NOT2,
    ONE1,
    PROJ2,
    Z2_MINORITY,
    Z3_MALTSEV,
    make_algebra,
)
from maltsev_lab import (
    Apply,
    Variable,
    check_quasi_siggers_identity,
    check_qwnu_identities,
    enumerate_clone_slice,
    has_k_qwnu,
    has_k_wnu_idemp,
    has_n_local_k_qwnu,
    has_quasi_taylor,
    induced_image_algebra,
    oracle_find_quasi_siggers,
    oracle_find_qwnu,
    random_algebra,
    term_table,
    verify_nlocal_witness,
    verify_qtaylor_witness,
    verify_qwnu_witness,
)
from maltsev_lab.errors import BudgetExceededError

MIN_CHAIN3 = Apply("meet", (Variable(0), Apply("meet", (Variable(1), Variable(2)))))


def test_qwnu_named_verdicts():
    assert has_k_qwnu(MIN2, 3).answer
    report = has_k_qwnu(PROJ2, 2)
    assert not report.answer and report.refutation == (0, 1)
    assert has_k_qwnu(Z3_MALTSEV, 2).answer
    report = has_k_qwnu(Z3_MALTSEV, 3)
    assert not report.answer


def test_qwnu_rejects_k_one():
    with pytest.raises(ValueError):
        has_k_qwnu(MIN2, 1)


def test_qwnu_witnesses_are_locally_valid():
    report = has_k_qwnu(MIN2, 3)
    for w in report.witnesses:
        r, s = w.pair
        assert verify_qwnu_witness(MIN2, 3, r, s, w.term) == w.result[0]


def test_wnu_idemp_named_verdicts():
    assert has_k_wnu_idemp(MIN2, 4).answer
    assert has_k_wnu_idemp(Z2_MINORITY, 3).answer
    with pytest.raises(ValueError, match="g\\(2\\) = 1"):
        has_k_wnu_idemp(CLIP3, 2)


def test_wnu_idemp_agrees_with_qwnu_on_idempotent_corpus():
    for seed in range(30):
        alg = random_algebra(seed, (seed % 3) + 1, [2], idempotent=True)
        for k in (2, 3):
            assert has_k_wnu_idemp(alg, k).answer == has_k_qwnu(alg, k).answer


def test_nlocal_named_verdicts():
    assert has_n_local_k_qwnu(MIN2, 2, 2).answer
    report = has_n_local_k_qwnu(PROJ2, 1, 2)
    assert not report.answer and report.refutation == ((0,), (1,))


def test_nlocal_one_matches_qwnu():
    for alg in [MIN2, PROJ2, NOT2, Z3_MALTSEV] + ALL_BINARY2[:8]:
        for k in (2, 3):
            assert has_n_local_k_qwnu(alg, 1, k).answer == has_k_qwnu(alg, k).answer


def test_nlocal_validation():
    with pytest.raises(ValueError):
        has_n_local_k_qwnu(MIN2, 0, 2)
    with pytest.raises(ValueError):
        has_n_local_k_qwnu(MIN2, 1, 1)
    with pytest.raises(BudgetExceededError):
        has_n_local_k_qwnu(MIN2, 4, 2, budget=100)


def test_nlocal_witnesses_are_locally_valid():
    report = has_n_local_k_qwnu(MIN2, 2, 2)
    assert report.answer
    for w in report.witnesses:
        rbar, sbar = w.pair
        assert verify_nlocal_witness(MIN2, 2, 2, rbar, sbar, w.term) == w.result


def test_qtaylor_named_verdicts():
    assert has_quasi_taylor(MIN2).answer
    report = has_quasi_taylor(NOT2)
    assert not report.answer and report.refutation == (0, 1)
    assert not has_quasi_taylor(PROJ2).answer
    assert has_quasi_taylor(ONE1).answer


def test_qtaylor_witnesses_are_locally_valid():
    report = has_quasi_taylor(MIN2)
    for w in report.witnesses:
        a, b = w.pair
        assert verify_qtaylor_witness(MIN2, a, b, w.term) == w.result


def test_qtaylor_minority_regression():
    # x+y+z over Z2 has a quasi Siggers term (x1+x3+x4) even though no term
    # can equalize the first two and last two slots of the one-sided
    # diagonal-matrix application; the pairwise instance test must say yes
    found, _ = oracle_find_quasi_siggers(Z2_MINORITY)
    assert found is not None
    report = has_quasi_taylor(Z2_MINORITY)
    assert report.answer
    for w in report.witnesses:
        a, b = w.pair
        assert verify_qtaylor_witness(Z2_MINORITY, a, b, w.term) == w.result


def test_check_qwnu_identities():
    assert check_qwnu_identities(MIN2, MIN_CHAIN3, 3)
    assert not check_qwnu_identities(MIN2, Variable(0), 2)
    minority = Apply("m", (Variable(0), Variable(1), Variable(2)))
    assert check_qwnu_identities(Z2_MINORITY, minority, 3)


def test_check_quasi_siggers_identity():
    meet4 = Apply(
        "meet",
        (
            Apply("meet", (Variable(0), Variable(1))),
            Apply("meet", (Variable(2), Variable(3))),
        ),
    )
    assert check_quasi_siggers_identity(MIN2, meet4)
    assert not check_quasi_siggers_identity(MIN2, Variable(0))
    assert check_quasi_siggers_identity(ONE1, Variable(0))


def test_oracle_completeness_exhaustive_two_element():
    # every algebra on {0,1} with a single operation of arity <= 2
    algs = list(ALL_BINARY2)
    for i in range(4):
        algs.append(make_algebra(f"u{i}", 2, ("f", 1, ((i >> 1) & 1, i & 1))))
    for c in range(2):
        algs.append(make_algebra(f"c{c}", 2, ("f", 0, (c,))))
    for alg in algs:
        for k in (2, 3):
            table, complete = oracle_find_qwnu(alg, k)
            decided = has_k_qwnu(alg, k).answer
            if table is not None:
                assert decided
            else:
                assert complete and not decided


def test_oracle_completeness_sampled_three_element():
    for seed in range(25):
        alg = random_algebra(seed, 3, [[1], [2]][seed % 2])
        for k in (2, 3):
            table, complete = oracle_find_qwnu(alg, k, budget=30000)
            decided = has_k_qwnu(alg, k).answer
            if table is not None:
                assert decided
            elif complete:
                assert not decided


def test_local_monotonicity_small():
    for seed in range(15):
        alg = random_algebra(seed, (seed % 3) + 1, [2])
        if has_n_local_k_qwnu(alg, 1, 3).answer:
            assert has_n_local_k_qwnu(alg, 2, 3).answer


def test_qwnu_implies_qtaylor():
    for seed in range(40):
        alg = random_algebra(seed, (seed % 3) + 1, [[2], [1, 2], [3]][seed % 3])
        if any(has_k_qwnu(alg, k).answer for k in (2, 3)):
            assert has_quasi_taylor(alg).answer


def test_image_transfer_sound_direction():
    # a quasi Taylor term of the induced image algebra lifts to the original
    for seed in range(60):
        alg = random_algebra(seed, (seed % 3) + 1, [2])
        induced, _, _ = induced_image_algebra(alg)
        if has_quasi_taylor(induced).answer:
            assert has_quasi_taylor(alg).answer


def test_image_transfer_reduct_can_lose_terms():
    # the induced algebra keeps only corrected basic operations, so it can
    # be a strict reduct of the clone the full image construction would have;
    # this pinned example has a quasi Taylor term upstairs but its corrected
    # basic operation is a projection, oracle-confirmed on both sides
    alg = random_algebra(20, 3, [2])
    induced, _, b = induced_image_algebra(alg)
    assert b == (0, 1)
    found, _ = oracle_find_quasi_siggers(alg)
    assert found is not None
    assert has_quasi_taylor(alg).answer
    found, complete = oracle_find_quasi_siggers(induced)
    assert found is None and complete
    assert not has_quasi_taylor(induced).answer


def test_refutation_is_first_failing_pair():
    report = has_quasi_taylor(NOT2)
    assert report.refutation == (0, 1)
    assert report.stats.pairs_checked == 2  # (0,0) succeeded, (0,1) refuted


def test_witness_tables_live_in_complete_clone_slices():
    for alg in ALL_BINARY2:
        report = has_k_qwnu(alg, 2)
        if not report.answer:
            continue
        slice2 = enumerate_clone_slice(alg, 2)
        assert slice2.complete
        for w in report.witnesses:
            assert term_table(alg, w.term, 2) in set(slice2.tables)
