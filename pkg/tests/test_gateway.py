import json
import math
import random

import pytest

from hapticopter.gateway import (
    GatewaySession,
    PROTOCOL_VERSION,
    RecordError,
    SessionSettings,
    WireMessage,
    parse_message,
    parse_record,
    replay_session,
)
from hapticopter.geometry import Vec3
from hapticopter.metrics import summarize_trial
from hapticopter.world import Task, build_scenario


def msg(kind, seq, payload=None, t=0.0):
    return WireMessage(kind=kind, seq=seq, t=t, payload=payload or {})


def hello(seq=1):
    return msg("hello", seq, {"version": PROTOCOL_VERSION})


def _established(task="lateral_gate"):
    session = GatewaySession()
    assert session.handle_message(hello())[0].kind == "hello"
    replies = session.handle_message(msg("load_scenario", 2, {"task": task}))
    assert replies[0].payload["event"] == "scenario_loaded"
    return session


# --- envelope parsing -------------------------------------------------------------

def test_parse_round_trip():
    m = msg("hand_input", 7, {"position": [1, 2, 3], "timestamp": 0.5}, t=1.25)
    assert parse_message(m.to_json()) == m


def test_parse_rejects_garbage_and_unknown():
    from hapticopter.gateway import ProtocolError

    with pytest.raises(ProtocolError):
        parse_message("{not json")
    with pytest.raises(ProtocolError):
        parse_message(json.dumps({"kind": "teleport", "seq": 1, "t": 0}))
    with pytest.raises(ProtocolError):
        parse_message(json.dumps({"kind": "hello", "seq": -1, "t": 0}))
    with pytest.raises(ProtocolError):
        parse_message(json.dumps({"kind": "hello", "seq": 1, "t": 0, "payload": {}, "x": 1}))


# --- handshake --------------------------------------------------------------------

def test_hello_ack():
    session = GatewaySession()
    replies = session.handle_message(hello())
    assert [r.kind for r in replies] == ["hello"]
    assert replies[0].payload == {"version": PROTOCOL_VERSION}
    assert session.established


def test_input_before_hello_rejected():
    session = GatewaySession()
    replies = session.handle_message(msg("hand_input", 1, {"position": [0, 0, 0]}))
    assert replies[0].kind == "error"
    assert replies[0].payload["code"] == "not_established"
    assert not session.closed


def test_version_mismatch_errors_and_closes():
    session = GatewaySession()
    replies = session.handle_message(msg("hello", 1, {"version": 99}))
    assert replies[0].kind == "error"
    assert replies[0].payload["code"] == "bad_version"
    assert session.closed


def test_malformed_payload_keeps_session():
    session = _established()
    replies = session.handle_message(msg("hand_input", 3, {"position": [1, 2]}))
    assert replies[0].kind == "error"
    assert replies[0].payload["code"] == "bad_payload"
    # next message still works
    replies = session.handle_message(msg("hand_input", 4, {"position": [0, -2.4, 1.2]}))
    assert replies == []


def test_unknown_payload_field_rejected():
    session = _established()
    replies = session.handle_message(
        msg("clutch_input", 3, {"engaged": True, "verbosity": 2})
    )
    assert replies[0].payload["code"] == "bad_payload"


def test_outbound_kind_from_client_rejected():
    session = _established()
    replies = session.handle_message(msg("state_update", 3, {}))
    assert replies[0].payload["code"] == "unknown_kind"


# --- seq ordering -----------------------------------------------------------------

def test_out_of_order_messages_consumed_in_seq_order():
    session = _established()
    # seq 4 arrives before seq 3: nothing applies until 3 lands
    assert session.handle_message(msg("clutch_input", 4, {"engaged": True})) == []
    assert not session.sim.clutch.engaged
    session.handle_message(msg("hand_input", 3, {"position": [0, -0.3, 0.15]}))
    assert session.sim.clutch.engaged  # both drained, in order


def test_duplicate_seq_rejected():
    session = _established()
    session.handle_message(msg("clutch_input", 3, {"engaged": True}))
    replies = session.handle_message(msg("clutch_input", 3, {"engaged": False}))
    assert replies[0].payload["code"] == "bad_seq"


# --- ticking ----------------------------------------------------------------------

def test_tick_broadcasts_state_and_cue():
    session = _established()
    out = session.tick()
    kinds = [m.kind for m in out]
    assert kinds[:2] == ["state_update", "cue_update"]
    state = out[0].payload
    assert state["tick"] == 1
    assert len(state["position"]) == 3
    cue = out[1].payload
    assert len(cue["intensities"]) == 6
    seqs = [m.seq for m in out]
    assert seqs == sorted(seqs)


def test_clutch_gates_goal_updates():
    session = _established()
    spawn = session.scenario.spawn
    session.handle_message(msg("hand_input", 3, {"position": [0.5, 0.5, 0.5]}))
    session.tick()
    assert session.sim.goal == spawn  # disengaged: hand motion is free

    session.handle_message(msg("clutch_input", 4, {"engaged": True}))
    session.handle_message(msg("hand_input", 5, {"position": [0.1, -0.2, 0.15]}))
    session.tick()
    assert session.sim.goal == Vec3(0.8, -1.6, 1.2)


def test_reset_goal_returns_to_spawn():
    session = _established()
    session.handle_message(msg("clutch_input", 3, {"engaged": True}))
    session.handle_message(msg("hand_input", 4, {"position": [0.2, 0.1, 0.2]}))
    session.tick()
    assert session.sim.goal != session.scenario.spawn
    session.handle_message(msg("reset_goal", 5, {}))
    assert session.sim.goal == session.scenario.spawn


# --- record / replay -----------------------------------------------------------------

def _scripted_session(seed: int, n_ticks: int = 240, task: str = "lateral_gate"):
    rng = random.Random(seed)
    session = GatewaySession(settings=SessionSettings(seed=seed))
    session.handle_message(hello())
    session.handle_message(msg("load_scenario", 2, {"task": task}))
    seq = 3
    session.handle_message(msg("clutch_input", seq, {"engaged": True}))
    seq += 1
    hand = Vec3(task == "vertical_gate" and 0.0 or 0.0, -0.3, 0.15)
    for k in range(n_ticks):
        if k % 2 == 0:  # 60 Hz input against the 120 Hz loop
            hand = Vec3(
                hand.x + rng.uniform(-0.004, 0.004),
                hand.y + 0.004,
                hand.z + rng.uniform(-0.002, 0.002),
            )
            session.handle_message(
                msg("hand_input", seq, {"position": list(hand), "timestamp": k / 120})
            )
            seq += 1
        if k == 100:
            session.handle_message(msg("clutch_input", seq, {"engaged": False}))
            seq += 1
        if k == 110:
            session.handle_message(msg("clutch_input", seq, {"engaged": True}))
            seq += 1
        session.tick()
    return session


def test_recorded_session_replays_bit_identically():
    session = _scripted_session(seed=42)
    live_log = session.log
    record = session.record
    assert record is not None and record.total_ticks == 240

    replayed = replay_session(record)
    assert replayed.samples == live_log.samples
    assert replayed.events == live_log.events
    assert replayed.meta == live_log.meta

    live_summary = summarize_trial(live_log, session.scenario)
    replay_summary = summarize_trial(replayed, session.scenario)
    assert live_summary == replay_summary


def test_record_text_round_trip():
    session = _scripted_session(seed=7, n_ticks=60)
    record = session.record
    text = record.dumps()
    again = parse_record(text)
    assert again.settings == record.settings
    assert again.total_ticks == record.total_ticks
    assert again.entries == record.entries
    assert again.scenario_doc == record.scenario_doc
    assert replay_session(again).samples == session.log.samples


def test_empty_record_is_hover_at_spawn():
    session = GatewaySession(settings=SessionSettings(seed=0))
    session.handle_message(hello())
    session.handle_message(msg("load_scenario", 2, {"task": "wall_approach"}))
    for _ in range(120):
        session.tick()
    log = replay_session(session.record)
    spawn = session.scenario.spawn
    assert all(s.position.dist_to(spawn) < 1e-9 for s in log.samples)
    assert all(s.goal == spawn for s in log.samples)


def test_corrupted_record_reports_line():
    session = _scripted_session(seed=3, n_ticks=30)
    lines = session.record.dumps().splitlines()
    lines[5] = "{broken json"
    with pytest.raises(RecordError, match="line 6"):
        parse_record("\n".join(lines))


def test_record_header_must_parse():
    with pytest.raises(RecordError, match="line 1"):
        parse_record("not json\n")
    with pytest.raises(RecordError, match="line 1"):
        parse_record('{"format_version": 99}\n')


def test_twenty_seeded_sessions_replay_identically():
    for seed in range(20):
        task = ("lateral_gate", "vertical_gate", "wall_approach")[seed % 3]
        session = _scripted_session(seed=seed, n_ticks=120, task=task)
        replayed = replay_session(parse_record(session.record.dumps()))
        assert replayed.samples == session.log.samples
        assert replayed.events == session.log.events
        live = summarize_trial(session.log, session.scenario)
        after = summarize_trial(replayed, session.scenario)
        assert live == after
