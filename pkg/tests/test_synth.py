import numpy as np
import pytest

from seedsynth.circuit import CNOT_MATRIX, evaluate
from seedsynth.errors import NoSolutionError
from seedsynth.linalg import hs_distance, random_unitary
from seedsynth.synth import (
    RANDOM_SEEDED,
    SEEDED,
    SearchConfig,
    random_seeds,
    seeded_synthesize,
    synthesize,
)
from seedsynth.templates import children

SWAP = np.eye(4)[[0, 2, 1, 3]]


def planted(catalog, tid, seed):
    sk = catalog[tid].skeleton
    rng = np.random.default_rng(seed)
    return evaluate(sk.with_params(rng.uniform(-np.pi, np.pi, sk.num_params)))


def test_cnot_needs_one(two_qubit_catalog):
    r = synthesize(CNOT_MATRIX, two_qubit_catalog)
    assert r.cnot_count == 1
    assert r.instantiation_calls == 2
    assert hs_distance(evaluate(r.circuit), CNOT_MATRIX) <= 1e-8


def test_swap_needs_three(two_qubit_catalog):
    r = synthesize(SWAP, two_qubit_catalog)
    assert r.cnot_count == 3
    assert hs_distance(evaluate(r.circuit), SWAP) <= 1e-8


def test_identity_is_root(line_catalog):
    r = synthesize(np.eye(8), line_catalog)
    assert (r.cnot_count, r.instantiation_calls, r.template_id) == (0, 1, 0)


def test_minimal_depth_found_with_strong_depth_weight(line_catalog):
    cfg = SearchConfig(depth_weight=1.0)
    for tid in (3, 5, 9):
        r = synthesize(planted(line_catalog, tid, tid), line_catalog, cfg)
        assert r.cnot_count <= line_catalog[tid].cnot_count


def test_oracle_seed_takes_one_call(line_catalog):
    tid = 12
    r = seeded_synthesize(planted(line_catalog, tid, 0), line_catalog, [tid])
    assert r.instantiation_calls == 1
    assert r.template_id == tid
    assert r.strategy == SEEDED


def test_seeded_walks_up_from_too_deep_seed(line_catalog):
    # seed below the true template still converges (over-parameterised)
    tid = 3
    deep = [k for k in range(len(line_catalog)) if line_catalog[k].parent == tid][0]
    r = seeded_synthesize(planted(line_catalog, tid, 1), line_catalog, [deep])
    assert r.cost <= 1e-8


def test_seeded_beats_root_on_planted_target(line_catalog):
    tid = 20
    u = planted(line_catalog, tid, 5)
    root = synthesize(u, line_catalog)
    seeded = seeded_synthesize(u, line_catalog, [tid])
    assert seeded.instantiation_calls < root.instantiation_calls


def test_tag_restricts_search(catalog):
    u = planted(catalog, catalog.lookup([(0, 2), (1, 2)]), 3)
    r = synthesize(u, catalog, tag=1)
    assert 1 in catalog[r.template_id].tags
    assert set(catalog[r.template_id].edges) <= {(0, 2), (1, 2)}


def test_exhaustion_raises_with_best(line_catalog):
    cfg = SearchConfig(max_cnots=1)
    with pytest.raises(NoSolutionError) as info:
        synthesize(random_unitary(3, 0), line_catalog, cfg)
    assert info.value.best is not None
    # root plus its two children
    assert info.value.best.instantiation_calls == 3


def test_random_seeds_deterministic_and_tagged(catalog):
    a = random_seeds(catalog, 3, 11, tag=2)
    assert a == random_seeds(catalog, 3, 11, tag=2)
    assert len(set(a)) == 3 and all(2 in catalog[i].tags for i in a)
    with pytest.raises(ValueError):
        random_seeds(catalog, 0, 1)


def test_random_seeded_strategy_label(line_catalog):
    r = seeded_synthesize(np.eye(8), line_catalog, [0], strategy=RANDOM_SEEDED)
    assert r.strategy == RANDOM_SEEDED


def test_bad_arguments(line_catalog):
    with pytest.raises(ValueError):
        seeded_synthesize(np.eye(8), line_catalog, [])
    with pytest.raises(ValueError):
        synthesize(np.eye(4), line_catalog)
    with pytest.raises(KeyError):
        seeded_synthesize(np.eye(8), line_catalog, [10**6])
    with pytest.raises(ValueError):
        SearchConfig(depth_weight=-1)


def test_root_seed_reduces_to_synthesize(line_catalog):
    u = planted(line_catalog, 7, 2)
    a = synthesize(u, line_catalog)
    b = seeded_synthesize(u, line_catalog, [0])
    assert (a.template_id, a.instantiation_calls) == (b.template_id, b.instantiation_calls)
    assert np.array_equal(a.circuit.params, b.circuit.params)


def test_over_deep_seed_moves_to_parent(line_catalog):
    tid = 9
    last = line_catalog[tid].edges[-1]
    # append the other edge so the extra CNOT cannot merge with the previous one
    kid = [k for k in children(line_catalog, tid) if line_catalog[k].edges[-1] != last][0]
    u = planted(line_catalog, tid, 4)
    r = seeded_synthesize(u, line_catalog, [kid], SearchConfig(depth_weight=1.0))
    assert r.cnot_count < line_catalog[kid].cnot_count
    assert r.template_id == tid


def test_calls_match_metrics_context(line_catalog):
    from seedsynth.instantiate import count_calls

    with count_calls() as c:
        r = synthesize(planted(line_catalog, 5, 1), line_catalog)
    assert c.count == r.instantiation_calls


def test_result_within_epsilon(catalog):
    from seedsynth.linalg import phase_invariant_distance

    tid = catalog.lookup([(0, 1), (1, 2), (0, 1)])
    u = planted(catalog, tid, 9)
    r = synthesize(u, catalog, tag=0)
    assert phase_invariant_distance(u, evaluate(r.circuit)) <= 1e-8


def test_random_seeds_full_permutation(line_catalog):
    ids = random_seeds(line_catalog, len(line_catalog), 3)
    assert sorted(ids) == list(range(len(line_catalog)))
    with pytest.raises(ValueError):
        random_seeds(line_catalog, len(line_catalog) + 1, 3)
