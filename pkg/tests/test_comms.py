import itertools
import json

import numpy as np
import pytest

from qsdcsim.adversary import InterceptParams, ghz_intercept_tap
from qsdcsim.channels import ProtocolError, TamperingDetected
from qsdcsim.comms import (
    Message,
    Mode,
    Session,
    decode_map,
    decode_symbol,
    eavesdrop_check,
    encode_symbol,
    symbol_width,
)
from qsdcsim.qcore import GhzOutcome, PauliOp, XOutcome


# ----------------------------------------------------------------------
# framing and encoding

def test_symbol_width_by_party_count():
    assert symbol_width(2) == 2
    assert symbol_width(3) == 3
    assert symbol_width(6) == 6
    with pytest.raises(ProtocolError):
        symbol_width(1)


def test_encode_symbol_examples():
    assert encode_symbol("10", 2) == [PauliOp.Y]
    assert encode_symbol("101", 3) == [PauliOp.Y, PauliOp.X]
    assert encode_symbol("000", 3) == [PauliOp.I, PauliOp.I]
    assert encode_symbol("1101", 4) == [PauliOp.Z, PauliOp.I, PauliOp.X]


def test_encode_symbol_width_faults():
    with pytest.raises(ProtocolError):
        encode_symbol("101", 2)
    with pytest.raises(ProtocolError):
        encode_symbol("1x", 2)


def test_message_padding():
    message = Message("10011", 2)
    assert message.symbols == ["10", "01", "10"]
    assert message.pad_len == 1
    assert Message("100111", 2).pad_len == 0
    with pytest.raises(ProtocolError):
        Message("10a1", 2)


# ----------------------------------------------------------------------
# decode map

def test_decode_map_is_total_and_collision_free():
    for n, mode in itertools.product((2, 3, 4), Mode):
        table = decode_map(n, mode)
        assert len(table) == 2 ** (n + 1)  # every (pattern, sign, pub) decodes
        per_symbol = {}
        for key, bits in table.items():
            per_symbol.setdefault(bits, []).append(key)
        assert all(len(v) == 2 for v in per_symbol.values())
        assert len(per_symbol) == 2 ** symbol_width(n)


def test_decode_examples():
    # two users, partial: pair outcome psi- with publication "-" decodes 01
    assert decode_symbol(Mode.PARTIAL, GhzOutcome("01", -1), XOutcome.MINUS, 2) == "01"
    # three users, partial: pattern 001 "+" with publication "-" decodes 101
    assert decode_symbol(Mode.PARTIAL, GhzOutcome("001", 1), XOutcome.MINUS, 3) == "101"
    # two users, full: server measures psi-, receiver publishes "+": 10
    assert decode_symbol(Mode.FULL, GhzOutcome("01", -1), XOutcome.PLUS, 2) == "10"


def test_decode_fault_on_impossible_pair():
    with pytest.raises(TamperingDetected):
        decode_symbol(Mode.PARTIAL, GhzOutcome("0101", 1), XOutcome.PLUS, 2)


def test_publication_symmetry():
    # flipping the publication maps the table onto itself under sign flip
    for n in (2, 3):
        table = decode_map(n, Mode.PARTIAL)
        for (pattern, sign, pub), bits in table.items():
            mirrored = ("-" if pub == "+" else "+")
            assert table[(pattern, -sign, mirrored)] == bits


def test_full_mode_tables_match_partial():
    for n in (2, 3, 4, 5):
        assert decode_map(n, Mode.PARTIAL) == decode_map(n, Mode.FULL)


# ----------------------------------------------------------------------
# sessions

def test_round_trip_exhaustive_small():
    for n, mode in itertools.product((2, 3), Mode):
        width = symbol_width(n)
        for value in range(2 ** width):
            bits = format(value, f"0{width}b")
            session = Session(n, mode, seed=17 + value, auth_rounds=1,
                              sample_fraction=0.0)
            report = session.run(bits)
            assert report.decoded == bits
            assert not report.alarm


def test_transcript_replay_is_bit_identical():
    def run(seed):
        session = Session(3, "partial", seed=seed, auth_rounds=2,
                          sample_fraction=0.5)
        return session.run("101011").transcript.to_json()

    assert run(42) == run(42)
    assert run(42) != run(43)


def test_transcript_schema():
    session = Session(2, "full", seed=5, auth_rounds=2, sample_fraction=1.0)
    report = session.run("1011")
    data = json.loads(report.transcript.to_json())
    assert data["header"] == {"n_users": 2, "mode": "full", "seed": 5, "pad_len": 0}
    for event in data["events"]:
        assert list(event) == ["seq", "actor", "action", "payload"]
    assert [e["seq"] for e in data["events"]] == list(range(len(data["events"])))
    assert data["final"] == {"u2": report.decoded}


def test_pad_recorded_and_stripped():
    session = Session(2, "partial", seed=9, auth_rounds=2, sample_fraction=0.0)
    report = session.run("101")  # pads to 1010
    assert report.pad_len == 1
    assert report.decoded == "101"
    assert report.transcript.header["pad_len"] == 1
    assert len(report.transcript.final["u2"]) == 4


def test_insufficient_stock_fails_fast():
    session = Session(2, "partial", seed=1, auth_rounds=1, sample_fraction=0.0)
    with pytest.raises(ProtocolError):
        session.run("100111")  # three symbols, one retained pair per user


def test_eavesdrop_check_clean_passes():
    session = Session(2, "partial", seed=2, auth_rounds=4, sample_fraction=1.0)
    report = session.run("10011100")
    assert report.check.verdict == "pass"
    assert report.check.errors == 0
    assert report.check.sampled == 4


def test_eavesdrop_check_vacuous_threshold_always_passes():
    session = Session(2, "partial", seed=3, auth_rounds=50, threshold=1.0,
                      sample_fraction=1.0,
                      attack=ghz_intercept_tap(
                          InterceptParams.random_recording(
                              np.random.default_rng(0))))
    report = session.run("10" * 50)
    assert report.check.verdict == "pass"
    assert not report.alarm


def test_eavesdrop_check_flags_interception():
    rng = np.random.default_rng(1)
    session = Session(2, "partial", seed=4, auth_rounds=400, threshold=0.05,
                      sample_fraction=0.25,
                      attack=ghz_intercept_tap(InterceptParams.random_recording(rng)))
    report = session.run("10" * 400)
    assert report.check.verdict == "terminated"
    assert report.alarm and report.alarm_stage == "check"
    # recording interception sits at one half symbol error
    sigma = (0.25 / report.check.sampled) ** 0.5
    assert abs(report.check.error_rate - 0.5) <= 3 * sigma


def test_eavesdrop_check_standalone_sampling():
    session = Session(2, "partial", seed=6, auth_rounds=5, sample_fraction=0.0)
    session.authenticate_all()
    transcript = session.send_message("1001110010")
    result = eavesdrop_check(transcript, 0.4, 0.0, session.rng)
    assert result.sampled == 2
    assert result.verdict == "pass"
    event = transcript.events[-1]
    assert event.action == "eavesdrop_check"
    assert len(event.payload["positions"]) == 2


def test_worked_message_decodes_in_both_modes():
    for mode in Mode:
        session = Session(2, mode, seed=7, auth_rounds=3, sample_fraction=0.0)
        report = session.run("100111")
        assert report.decoded == "100111"
        ops = [e.payload["ops"] for e in
               report.transcript.select("symbol_encoded")]
        assert ops == [["Y"], ["X"], ["Z"]]


def test_mode_fixes_measurer_and_publisher():
    partial = Session(2, "partial", seed=8, auth_rounds=1, sample_fraction=0.0)
    partial.run("10")
    assert partial.transcript.select("ghz_measured")[0].actor == "u2"
    assert partial.transcript.select("publication")[0].actor == "server"

    full = Session(2, "full", seed=8, auth_rounds=1, sample_fraction=0.0)
    full.run("10")
    assert full.transcript.select("ghz_measured")[0].actor == "server"
    assert full.transcript.select("publication")[0].actor == "u2"


def test_random_round_trips_n_users():
    rng = np.random.default_rng(123)
    for _ in range(30):
        n = int(rng.integers(2, 7))
        mode = Mode.PARTIAL if rng.integers(2) else Mode.FULL
        bits = "".join(str(b) for b in rng.integers(0, 2, size=2 * n))
        session = Session(n, mode, seed=int(rng.integers(2 ** 31)),
                          auth_rounds=2, sample_fraction=0.0)
        assert session.run(bits).decoded == bits
