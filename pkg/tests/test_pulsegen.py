import io

import pytest

from tdmac import pulsegen
from tdmac.pulsegen import PulseGenState, reset, step
from tdmac.validation import OperandError


def high_cycles(code, n_cycles=20):
    """Count enabled cycles with match_out high by clocking the FSM directly."""
    state = reset()
    state = step(state, True, code)  # latch edge
    count = 0
    for _ in range(n_cycles):
        if state.match_out:
            count += 1
        state = step(state, True, code)
    return count


def test_reset_state():
    s = reset(PulseGenState(counter=9, reg_code=4, match_out=False, cmp_valid=True, cycle_index=33))
    assert (s.counter, s.reg_code, s.match_out, s.cmp_valid) == (0, 0, True, False)


def test_reset_idempotent():
    s = PulseGenState(counter=3, reg_code=7, match_out=False, cmp_valid=True)
    assert reset(reset(s)) == reset(s)


def test_latch_on_first_edge():
    s = step(reset(), False, 9)
    assert s.reg_code == 9 and s.cmp_valid and s.counter == 0 and s.match_out


def test_code_seven_gives_seven_pulses():
    trace = pulsegen.simulate(7)
    assert sum(r.pulse for r in trace) == 7
    highs = [r.match_out for r in trace]
    # high after the latch edge and six counting edges, low from the seventh on
    assert highs[:7] == [True] * 7
    assert not any(highs[7:])


def test_code_zero_no_pulses():
    trace = pulsegen.simulate(0)
    assert sum(r.pulse for r in trace) == 0
    assert not trace[0].match_out


def test_enable_low_freezes():
    state = reset()
    for _ in range(40):
        state = step(state, False, 5)
    assert state.counter == 0 and state.match_out


def test_enable_gap_freezes_not_resets():
    enable = [True, True, True, False, False, True, True, True, True, True]
    trace = pulsegen.simulate(5, enable)
    assert [r.counter for r in trace] == [0, 1, 2, 2, 2, 3, 4, 5, 5, 5]
    assert sum(r.pulse for r in trace) == 5


def test_match_stays_low():
    state = reset()
    for _ in range(3):
        state = step(state, True, 1)
    assert not state.match_out
    for _ in range(40):
        state = step(state, True, 1)
        assert not state.match_out


def test_valid_flag_guards_reset_cycle():
    # before the latch edge the reset counter and register are both 0, but no match fires
    s = reset()
    assert s.counter == s.reg_code == 0 and s.match_out and not s.cmp_valid


@pytest.mark.parametrize("code", range(16))
def test_fsm_matches_closed_form(code):
    assert pulsegen.count_pulses(code) == code
    assert high_cycles(code) == code
    assert pulsegen.pulse_train(code, 20e-9).n_pulses == code


@pytest.mark.parametrize(
    "code, t_clk, expected",
    [(15, 20e-9, 300e-9), (0, 20e-9, 0.0), (7, 25e-9, 175e-9)],
)
def test_pulse_train_duration(code, t_clk, expected):
    train = pulsegen.pulse_train(code, t_clk)
    assert train.duration == pytest.approx(expected, rel=1e-15, abs=0)
    assert train.duration == train.n_pulses * train.t_unit


def test_pulse_train_monotone():
    d = [pulsegen.pulse_train(c, 20e-9).duration for c in range(1, 16)]
    assert all(a < b for a, b in zip(d, d[1:]))


def test_pulse_train_rejects_bad_inputs():
    with pytest.raises(ValueError):
        pulsegen.pulse_train(3, 0.0)
    with pytest.raises(OperandError):
        pulsegen.pulse_train(16, 1e-9)


def test_waveform_dump():
    buf = io.StringIO()
    pulsegen.write_waveform(pulsegen.simulate(2, n_cycles=4), buf)
    assert buf.getvalue().splitlines() == [
        "cycle,enable,counter,match_out",
        "1,1,0,1",
        "2,1,1,1",
        "3,1,2,0",
        "4,1,2,0",
    ]
