import random

import pytest

from biasaudit.errors import EmptyInputError
from biasaudit.metrics.toxicity import (
    ScoredGenerationSet,
    expected_maximum_toxicity,
    toxic_fraction,
    toxicity_probability,
)

import oracles


def sets_from(score_lists):
    return [
        ScoredGenerationSet(prompt_id=f"p{i}", scores=tuple(scores))
        for i, scores in enumerate(score_lists)
    ]


def test_emt_all_zero():
    assert expected_maximum_toxicity(sets_from([[0.0, 0.0], [0.0]])) == 0.0


def test_emt_worked_example():
    # (max(0.1, 0.7) + max(0.2, 0.3)) / 2
    assert expected_maximum_toxicity(sets_from([[0.1, 0.7], [0.2, 0.3]])) == 0.5


def test_emt_single_generation_identity():
    assert expected_maximum_toxicity(sets_from([[0.9]])) == 0.9


def test_tp_worked_example():
    assert toxicity_probability(sets_from([[0.1, 0.7], [0.2, 0.3]]), 0.5) == 0.5


def test_tp_all_below_threshold():
    assert toxicity_probability(sets_from([[0.1], [0.49]]), 0.5) == 0.0


def test_tp_boundary_inclusive():
    assert toxicity_probability(sets_from([[0.5]]), 0.5) == 1.0


def test_tf_worked_example():
    assert toxic_fraction(sets_from([[0.6], [0.4], [0.5]]), 0.5) == pytest.approx(2 / 3)


def test_tf_extremes():
    assert toxic_fraction(sets_from([[0.0, 0.0]]), 0.5) == 0.0
    assert toxic_fraction(sets_from([[1.0], [1.0]]), 0.5) == 1.0


def test_tf_ragged_sets_pool_generations():
    # 3 toxic generations out of 5 total, regardless of grouping
    sets = sets_from([[0.9, 0.9, 0.9, 0.1], [0.2]])
    assert toxic_fraction(sets, 0.5) == pytest.approx(3 / 5)


def test_empty_input_rejected():
    for func in (expected_maximum_toxicity, toxicity_probability, toxic_fraction):
        with pytest.raises(EmptyInputError):
            func([])


def test_scores_outside_unit_interval_rejected():
    with pytest.raises(ValueError):
        ScoredGenerationSet("p", (1.2,))
    with pytest.raises(ValueError):
        ScoredGenerationSet("p", ())


def _random_sets(rng, max_n=8, max_m=6):
    return [
        [rng.random() for _ in range(rng.randint(1, max_m))]
        for _ in range(rng.randint(1, max_n))
    ]


def test_matches_oracle_on_random_inputs():
    rng = random.Random(20240811)
    for _ in range(300):
        lists = _random_sets(rng)
        sets = sets_from(lists)
        threshold = rng.random()
        assert expected_maximum_toxicity(sets) == pytest.approx(
            oracles.oracle_emt(lists), abs=1e-12
        )
        assert toxicity_probability(sets, threshold) == oracles.oracle_tp(
            lists, threshold
        )
        assert toxic_fraction(sets, threshold) == oracles.oracle_tf(lists, threshold)


def test_relations_on_random_inputs():
    # TF <= TP is a theorem for the uniform-m formula (mean of per-prompt
    # fractions vs indicators); the pooled ragged-m extension can exceed
    # TP when a toxic prompt carries many more generations than a clean
    # one, so the relation is asserted on its own domain.
    rng = random.Random(77)
    for _ in range(300):
        m = rng.randint(1, 6)
        sets = sets_from(
            [[rng.random() for _ in range(m)] for _ in range(rng.randint(1, 8))]
        )
        threshold = rng.choice([0.25, 0.5, 0.75])
        tf = toxic_fraction(sets, threshold)
        tp = toxicity_probability(sets, threshold)
        emt = expected_maximum_toxicity(sets)
        assert tf <= tp + 1e-12
        if tp == 0.0:
            assert emt < threshold
        if emt >= threshold:
            assert tp > 0.0


def test_permutation_invariance():
    rng = random.Random(5)
    lists = _random_sets(rng)
    sets = sets_from(lists)
    shuffled = list(sets)
    rng.shuffle(shuffled)
    shuffled = [
        ScoredGenerationSet(s.prompt_id, tuple(sorted(s.scores, reverse=True)))
        for s in shuffled
    ]
    assert expected_maximum_toxicity(sets) == pytest.approx(
        expected_maximum_toxicity(shuffled), abs=1e-12
    )
    assert toxicity_probability(sets) == toxicity_probability(shuffled)
    assert toxic_fraction(sets) == toxic_fraction(shuffled)


def test_monotone_in_each_score():
    rng = random.Random(9)
    for _ in range(100):
        lists = _random_sets(rng)
        sets = sets_from(lists)
        i = rng.randrange(len(lists))
        j = rng.randrange(len(lists[i]))
        raised = [list(s) for s in lists]
        raised[i][j] = min(1.0, raised[i][j] + rng.random() * (1 - raised[i][j]))
        raised_sets = sets_from(raised)
        assert expected_maximum_toxicity(raised_sets) >= expected_maximum_toxicity(sets) - 1e-12
        assert toxicity_probability(raised_sets) >= toxicity_probability(sets)
        assert toxic_fraction(raised_sets) >= toxic_fraction(sets)
