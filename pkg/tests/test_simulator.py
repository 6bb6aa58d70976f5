import json
import math
import random

import pytest

from gathersim import (
    AdversarySpec,
    Configuration,
    Point,
    SimParams,
    SimState,
    classify,
    run,
    step,
)
from gathersim.configuration import TAG_BIVALENT, TAG_L2W, TAG_QREGULAR
from gathersim.errors import BivalentInitial, TooFewRobots
from gathersim.generators import uniform_configuration
from gathersim.geometry import dist
from gathersim.simulator import (
    OUTCOME_GATHERED,
    OUTCOME_MAX_ROUNDS,
    LocalFrame,
    TransitionContext,
    check_transition,
    dumps_17g,
    read_trace,
    trace_lines,
)
from gathersim.symmetry import weber_numeric

SQUARE = Configuration([(1, 1), (-1, 1), (-1, -1), (1, -1)])
L2W_LINE = Configuration([(0, 0), (1, 0), (3, 0), (4, 0)])


def fresh_state(config):
    return SimState(0, config, [False] * config.n, [0] * config.n)


def test_step_square_full_move_gathers():
    rng = random.Random(7)
    state, record, _, changed = step(fresh_state(SQUARE), AdversarySpec(), SimParams(delta=2.0), rng)
    assert changed
    assert record.cls == TAG_QREGULAR
    assert all(dist(p, Point(0, 0)) <= 1e-9 for p in state.config.points)


def test_step_square_minimal_keeps_center():
    rng = random.Random(7)
    params = SimParams(delta=0.1)
    adv = AdversarySpec(stop_policy="minimal")
    state, record, _, _ = step(fresh_state(SQUARE), adv, params, rng)
    for old, new in zip(SQUARE.points, state.config.points):
        assert dist(old, new) == pytest.approx(0.1)
        assert dist(new, Point(0, 0)) == pytest.approx(math.sqrt(2) - 0.1)
    cls = classify(state.config)
    assert cls.tag == TAG_QREGULAR
    assert dist(cls.weber, Point(0, 0)) <= 1e-9
    assert dist(weber_numeric(state.config), Point(0, 0)) <= 1e-9


def test_step_l2w_endpoint_activation_leaves_line():
    # activate only the endpoint robot: fairness bound high, round robin from 0
    adv = AdversarySpec(activation="round_robin")
    params = SimParams(delta=10.0, fairness_bound=100)
    rng = random.Random(1)
    state, record, endpoint_moved, _ = step(fresh_state(L2W_LINE), adv, params, rng)
    assert record.activated == [0]
    assert endpoint_moved
    cls = classify(state.config)
    assert cls.tag not in (TAG_BIVALENT, TAG_L2W)


def test_run_square_trace_has_terminal_record():
    result = run(SQUARE, AdversarySpec(), SimParams(delta=2.0, seed=7))
    assert result.outcome == OUTCOME_GATHERED
    assert result.rounds == 1
    assert len(result.records) == 2
    assert result.records[-1].gathered
    assert result.records[-1].activated == []


def test_run_random_configs_gather():
    rng = random.Random(40)
    for n in range(3, 8):
        config = uniform_configuration(rng, n)
        result = run(config, AdversarySpec(), SimParams(delta=0.05, seed=n, max_rounds=10_000))
        assert result.outcome == OUTCOME_GATHERED, result.detail


def test_run_survives_max_crashes():
    rng = random.Random(41)
    config = uniform_configuration(rng, 4)
    adv = AdversarySpec(crash_schedule=((0, 0), (0, 1), (0, 2)))
    result = run(config, adv, SimParams(delta=0.05, seed=5, max_rounds=10_000))
    assert result.outcome == OUTCOME_GATHERED, result.detail
    assert result.crashes == 3


def test_run_rejects_bivalent_and_tiny():
    bivalent = Configuration([(0, 0), (0, 0), (1, 0), (1, 0)])
    with pytest.raises(BivalentInitial):
        run(bivalent, AdversarySpec(), SimParams(delta=0.1))
    with pytest.raises(TooFewRobots):
        run(Configuration([(0, 0), (1, 1)]), AdversarySpec(), SimParams(delta=0.1))


def test_run_validates_crash_budget_and_faulty_sets():
    config = Configuration([(0, 0), (1, 0), (0, 1), (2, 2)])
    with pytest.raises(ValueError):
        run(
            config,
            AdversarySpec(crash_schedule=((0, 0), (0, 1), (0, 2), (0, 3))),
            SimParams(delta=0.1),
        )
    with pytest.raises(ValueError):
        run(
            config,
            AdversarySpec(crash_schedule=((0, 0), (0, 1)), faulty_sets=((0,), (1, 2))),
            SimParams(delta=0.1),
        )
    result = run(
        config,
        AdversarySpec(crash_schedule=((0, 0), (0, 1)), faulty_sets=((0, 1), (2, 3))),
        SimParams(delta=0.5, seed=2),
    )
    assert result.outcome == OUTCOME_GATHERED


def test_crash_freeze_and_visibility():
    rng = random.Random(42)
    config = uniform_configuration(rng, 5)
    adv = AdversarySpec(activation="random", stop_policy="minimal", crash_schedule=((3, 1), (6, 2)))
    result = run(config, adv, SimParams(delta=0.05, seed=9, max_rounds=10_000))
    assert result.outcome == OUTCOME_GATHERED
    frozen: dict[int, Point] = {}
    for record in result.records:
        assert len(record.positions) == config.n  # crashed robots stay visible
        for robot, pos in frozen.items():
            assert record.positions[robot] == pos
        for robot, is_crashed in enumerate(record.crashed):
            if is_crashed and robot not in frozen:
                frozen[robot] = record.positions[robot]
    assert set(frozen) == {1, 2}


def test_movement_floor():
    rng = random.Random(43)
    config = uniform_configuration(rng, 6)
    adv = AdversarySpec(activation="random", stop_policy="random_fraction")
    params = SimParams(delta=0.03, seed=13, max_rounds=10_000)
    result = run(config, adv, params)
    assert result.outcome == OUTCOME_GATHERED
    for record in result.records:
        for (robot, rule, dest), stop in zip(record.decisions, record.stops):
            start = record.positions[robot]
            if rule == "Stay":
                assert stop == start
            else:
                full = dist(start, dest)
                moved = dist(start, stop)
                assert moved >= min(params.delta, full) - 1e-12


def test_fairness_bound_honored():
    rng = random.Random(44)
    config = uniform_configuration(rng, 6)
    adv = AdversarySpec(activation="random", activation_prob=0.2)
    params = SimParams(delta=0.05, seed=3, fairness_bound=4, max_rounds=10_000)
    result = run(config, adv, params)
    assert result.outcome == OUTCOME_GATHERED
    last_seen = {i: -1 for i in range(config.n)}
    for record in result.records[:-1]:
        for i in range(config.n):
            if record.crashed[i]:
                continue
            if i in record.activated:
                last_seen[i] = record.round
            else:
                assert record.round - last_seen[i] <= params.fairness_bound


def test_determinism_byte_identical():
    rng = random.Random(45)
    config = uniform_configuration(rng, 6)
    adv = AdversarySpec(activation="random", stop_policy="random_fraction", crash_schedule=((2, 3),))
    params = SimParams(delta=0.05, seed=77, max_rounds=10_000)
    first = run(config, adv, params)
    second = run(config, adv, params)
    assert trace_lines(first.records) == trace_lines(second.records)
    assert dumps_17g(first.summary()) == dumps_17g(second.summary())


def test_trace_round_trip_parses_exactly():
    result = run(SQUARE, AdversarySpec(), SimParams(delta=2.0, seed=7))
    text = trace_lines(result.records)
    parsed = read_trace(text.splitlines())
    assert parsed == result.records
    # JSON schema fields present
    obj = json.loads(text.splitlines()[0])
    assert set(obj) == {
        "round",
        "class",
        "positions",
        "crashed",
        "activated",
        "decisions",
        "stops",
        "gathered",
    }


def test_local_frame_round_trip():
    rng = random.Random(46)
    for _ in range(50):
        frame = LocalFrame.random(rng, 2.0)
        p = Point(rng.uniform(-3, 3), rng.uniform(-3, 3))
        assert dist(frame.invert_point(frame.apply_point(p)), p) <= 1e-12 * max(1, abs(p.x), abs(p.y))


def test_check_transition_rules():
    m_config = Configuration([(0, 0), (0, 0), (4, 0), (8, 0)])
    m_cls = classify(m_config)
    moved = Configuration([(0, 0), (0, 0), (2, 0), (8, 0)])
    ctx = TransitionContext(m_config, moved, False, True, 0.1)
    assert check_transition(m_cls, classify(moved), ctx) is None

    # M must keep its elected point
    wrong = Configuration([(5, 5), (5, 5), (5, 5), (8, 0)])
    ctx = TransitionContext(m_config, wrong, False, True, 0.1)
    assert check_transition(m_cls, classify(wrong), ctx) is not None

    # interior-only L2W activation keeps the class; that is allowed
    l2_cls = classify(L2W_LINE)
    interior_moved = Configuration([(0, 0), (1.5, 0), (3, 0), (4, 0)])
    ctx = TransitionContext(L2W_LINE, interior_moved, False, True, 0.1)
    assert check_transition(l2_cls, classify(interior_moved), ctx) is None

    # if an endpoint robot moved, staying in L2W is a violation
    ctx = TransitionContext(L2W_LINE, interior_moved, True, True, 0.1)
    assert check_transition(l2_cls, classify(interior_moved), ctx) is not None

    # nothing may become bivalent
    bivalent = Configuration([(0, 0), (0, 0), (1, 0), (1, 0)])
    ctx = TransitionContext(L2W_LINE, bivalent, False, True, 0.1)
    assert check_transition(l2_cls, classify(bivalent), ctx) is not None


def test_transition_checks_counted():
    result = run(SQUARE, AdversarySpec(stop_policy="minimal"), SimParams(delta=0.25, seed=1))
    assert result.outcome == OUTCOME_GATHERED
    assert result.transition_checks >= result.rounds - 1


def test_l2w_with_crashed_endpoints_contracts_to_midpoint():
    # both endpoint robots crash immediately; interior robots must still
    # gather, converging on the midpoint of the frozen endpoints
    config = Configuration([(0, 0), (1, 0), (3, 0), (4, 0)])
    adv = AdversarySpec(stop_policy="minimal", crash_schedule=((0, 0), (0, 3)))
    result = run(config, adv, SimParams(delta=0.5, seed=4, max_rounds=10_000))
    assert result.outcome == OUTCOME_GATHERED, result.detail
    final = result.records[-1]
    for robot in (1, 2):
        assert dist(final.positions[robot], Point(2, 0)) <= 1e-9
    assert final.positions[0] == Point(0, 0)
    assert final.positions[3] == Point(4, 0)


def test_greedy_adversary_still_gathers():
    rng = random.Random(47)
    config = uniform_configuration(rng, 5)
    adv = AdversarySpec(activation="adversarial_greedy", stop_policy="minimal")
    result = run(config, adv, SimParams(delta=0.05, seed=21, max_rounds=10_000))
    assert result.outcome == OUTCOME_GATHERED, result.detail


def test_max_rounds_exceeded_outcome():
    rng = random.Random(48)
    config = uniform_configuration(rng, 5)
    result = run(config, AdversarySpec(stop_policy="minimal"), SimParams(delta=0.01, seed=2, max_rounds=3))
    assert result.outcome == OUTCOME_MAX_ROUNDS
    assert result.rounds == 3
    assert not result.records[-1].gathered


def test_dumps_17g_round_trips_floats():
    values = [0.1, 1 / 3, math.pi, 1e-17, 123456.789, 2.0]
    for v in values:
        assert float(json.loads(dumps_17g(v))) == v
