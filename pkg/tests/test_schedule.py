import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from turnwalk.schedule import (
    Constant,
    Critical,
    Explicit,
    Periodic,
    PowerDecay,
    Regime,
    classify_regime,
    schedule_from_json,
    schedule_to_json,
)


def test_constant_p_at():
    assert Constant(0.3).p_at(7) == 0.3
    assert Constant(0.3).p_at(1) == 0.3


def test_critical_p_at():
    s = Critical(a=2.0, n0=10)
    assert s.p_at(100) == pytest.approx(0.02)
    assert s.p_at(9) == 1.0  # prefix_p default
    assert s.p_at(10) == pytest.approx(0.2)


def test_power_decay_p_at():
    s = PowerDecay(c=1.0, gamma=0.7, n0=1)
    assert s.p_at(1000) == pytest.approx(1000 ** -0.7)
    assert s.p_at(1000) == pytest.approx(0.00794328, abs=1e-8)


def test_periodic_cycles():
    s = Periodic(values=(0.4, 0.6), n0=2)
    assert s.p_at(1) == 1.0
    assert [s.p_at(n) for n in range(2, 8)] == [0.4, 0.6, 0.4, 0.6, 0.4, 0.6]


def test_explicit_table_and_persistence():
    s = Explicit(values=(0.5, 0.2, 0.9))
    assert [s.p_at(n) for n in (1, 2, 3, 4, 10)] == [0.5, 0.2, 0.9, 0.9, 0.9]


def test_construction_rejects_out_of_range():
    with pytest.raises(ValueError):
        Constant(1.5)
    with pytest.raises(ValueError):
        Constant(-0.1)
    # a/n0 > 1 would put p_n above 1 at the start of the critical range
    with pytest.raises(ValueError):
        Critical(a=3.0, n0=2)
    with pytest.raises(ValueError):
        PowerDecay(c=2.0, gamma=0.5, n0=1)  # p_1 = 2
    with pytest.raises(ValueError):
        PowerDecay(c=1.0, gamma=1.2)
    with pytest.raises(ValueError):
        Periodic(values=())
    with pytest.raises(ValueError):
        Explicit(values=(0.5, 1.1))


def test_prefix_probs_matches_p_at():
    for s in [Constant(0.4), Critical(2.0, n0=4), PowerDecay(0.8, 0.6, n0=3),
              Periodic((0.2, 0.7, 0.5), n0=2), Explicit((1.0, 0.3))]:
        arr = s.prefix_probs(40)
        assert arr.shape == (40,)
        assert np.allclose(arr, [s.p_at(n) for n in range(1, 41)])


@given(st.sampled_from([
    Constant(0.0), Constant(1.0), Constant(0.37),
    Critical(1.0, n0=1), Critical(5.0, n0=7),
    PowerDecay(0.9, 0.3), PowerDecay(1.0, 0.99, n0=2),
    Periodic((0.0, 1.0, 0.25)), Explicit((0.6,)),
]), st.integers(min_value=1, max_value=10 ** 6))
def test_p_at_always_a_probability(schedule, n):
    assert 0.0 <= schedule.p_at(n) <= 1.0


def test_json_round_trip():
    for s in [Constant(0.5), Critical(2.0, n0=3, prefix_p=0.5),
              PowerDecay(1.0, 0.7, n0=2), Periodic((0.4, 0.6), n0=2),
              Explicit((0.1, 0.9))]:
        assert schedule_from_json(schedule_to_json(s)) == s


def test_json_parses_plain_dict_and_rejects_junk():
    assert schedule_from_json({"kind": "Constant", "p": 0.5}) == Constant(0.5)
    with pytest.raises(ValueError):
        schedule_from_json({"p": 0.5})
    with pytest.raises(ValueError):
        schedule_from_json({"kind": "Nope"})
    with pytest.raises(ValueError):
        schedule_from_json(json.dumps({"kind": "Constant", "q": 0.5}))


# classification


def test_classify_constant_half_d2_recurrent():
    out = classify_regime(Constant(0.5), 2)
    assert out.regime is Regime.RECURRENT
    assert out.theorem_ref


def test_classify_power_decay_fast_d2_strongly_transient():
    out = classify_regime(PowerDecay(c=1.0, gamma=0.6, n0=1), 2)
    assert out.regime is Regime.STRONGLY_TRANSIENT


def test_classify_periodic_d2_not_strongly_transient():
    out = classify_regime(Periodic((0.4, 0.6), n0=2), 2)
    assert out.regime is Regime.NOT_STRONGLY_TRANSIENT


def test_classify_critical_d2_conjectured():
    out = classify_regime(Critical(1.0, n0=2), 2)
    assert out.regime is Regime.CONJECTURED_STRONGLY_TRANSIENT


def test_classify_d1_unknown():
    for s in [Constant(0.5), Critical(1.0), PowerDecay(1.0, 0.7)]:
        out = classify_regime(s, 1)
        assert out.regime is Regime.UNKNOWN
        assert out.theorem_ref == ""


def test_classify_theorem_ref_empty_iff_unknown():
    cases = [
        (Constant(0.5), 2), (Constant(0.5), 3), (Constant(0.0), 2),
        (Critical(1.0), 2), (Critical(1.0), 4),
        (PowerDecay(1.0, 0.3), 2), (PowerDecay(1.0, 0.7), 5),
        (Periodic((0.4, 0.6)), 2), (Periodic((0.0, 0.5)), 3),
        (Explicit((0.1, 0.2, 0.3)), 2), (Constant(0.5), 1),
    ]
    for sched, d in cases:
        out = classify_regime(sched, d)
        assert (out.regime is Regime.UNKNOWN) == (out.theorem_ref == "")


def test_classify_power_decay_window_conditions_all_satisfied():
    # every gamma in (0,1) and every d >= 2 satisfies the three
    # window-theorem hypotheses
    for gamma in (0.1, 0.5, 0.9):
        for d in (2, 3, 5):
            out = classify_regime(PowerDecay(1.0, gamma), d)
            assert out.regime is Regime.STRONGLY_TRANSIENT
            window = [ok for name, ok in out.checked_conditions
                      if "window" in name or "diverges" in name or "converges" in name]
            assert len(window) >= 3
            assert all(window)


def test_classify_is_pure():
    a = classify_regime(PowerDecay(1.0, 0.6), 2)
    b = classify_regime(PowerDecay(1.0, 0.6), 2)
    assert a == b


def test_classify_ignores_prefix():
    a = classify_regime(Critical(1.0, n0=1), 2)
    b = classify_regime(Critical(1.0, n0=50, prefix_p=0.2), 2)
    assert a.regime == b.regime


def test_classify_explicit_nonconstant_unknown():
    out = classify_regime(Explicit((0.1, 0.2, 0.3)), 2)
    assert out.regime is Regime.UNKNOWN
