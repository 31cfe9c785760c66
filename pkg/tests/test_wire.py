import pytest
from hypothesis import given
from hypothesis import strategies as st

from safe_horizon.errors import WireFormatError
from safe_horizon.sim import CommandPacket
from safe_horizon.sim.model import fmt

speeds = st.floats(-1.0, 1.0)


def test_golden_line():
    pkt = CommandPacket(3, 17, 0.5, -0.25, 1.23456789012)
    assert pkt.encode() == "SH1 3 17 0.5 -0.25 1.23456789\n"


def test_fmt_has_nine_digits_and_no_negative_zero():
    assert fmt(1 / 3) == "0.333333333"
    assert fmt(-0.0) == "0"
    assert fmt(1e-7) == "1e-07"


@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 9), speeds, speeds, st.floats(0.0, 1e3))
def test_round_trip_to_nine_digits(rid, tick, v, w, s):
    pkt = CommandPacket(rid, tick, v, w, s)
    back = CommandPacket.decode(pkt.encode())
    assert (back.robot_id, back.tick) == (rid, tick)
    for a, b in ((back.linear, v), (back.angular, w), (back.horizon, s)):
        assert a == pytest.approx(b, rel=1e-8, abs=1e-300)
    assert back.encode() == pkt.encode()


@pytest.mark.parametrize(
    "line",
    [
        "SH1 0 0 1.5 0 1\n",
        "SH1 0 0 0 -2 1\n",
        "SH1 0 0 0 0 -1\n",
        "SH2 0 0 0 0 1\n",
        "SH1 0 0 0 0\n",
        "SH1 a 0 0 0 1\n",
        "SH1 0 0 nan 0 1\n",
        "SH1 0 0 0 0 inf\n",
    ],
)
def test_rejects_bad_lines(line):
    with pytest.raises(WireFormatError):
        CommandPacket.decode(line)
