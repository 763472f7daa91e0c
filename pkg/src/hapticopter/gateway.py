"""Wire protocol sessions: message handling, recording, and offline replay.

Messages travel as JSON envelopes {kind, seq, t, payload}. A session is
established by hello, loads a scenario, then consumes hand/clutch input while
the owning loop calls `tick()` to advance simulation time and broadcast
state_update + cue_update (plus events) back to the client.

Every applied inbound message is recorded with the tick index it acted on,
which makes a recorded session exactly replayable: feeding the record back
through a fresh session reproduces the trial log bit for bit.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .dynamics import SimConfig
from .geometry import Vec3
from .session import HapticsConfig, SimSession
from .teleop import ClutchMode, MappingConfig
from .trial import TrialLog
from .world import Scenario, ScenarioError, build_scenario, load_scenario_json, scenario_to_json

PROTOCOL_VERSION = 1

RECORD_FORMAT_VERSION = 1

LOG_DIR_ENV = "HAPTICOPTER_LOG_DIR"

INBOUND_KINDS = ("hello", "load_scenario", "hand_input", "clutch_input", "reset_goal")
OUTBOUND_KINDS = ("hello", "state_update", "cue_update", "event", "error")
ALL_KINDS = tuple(sorted(set(INBOUND_KINDS + OUTBOUND_KINDS)))


class ProtocolError(ValueError):
    """Malformed wire data; the caller turns this into an error reply."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class RecordError(ValueError):
    """A session record that cannot be parsed; carries the offending line."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"record line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class WireMessage:
    kind: str
    seq: int
    t: float
    payload: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {"kind": self.kind, "seq": self.seq, "t": self.t, "payload": self.payload},
            separators=(",", ":"),
        )


def parse_message(text: str) -> WireMessage:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError("bad_payload", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ProtocolError("bad_payload", "message must be a JSON object")
    unknown = set(doc) - {"kind", "seq", "t", "payload"}
    if unknown:
        raise ProtocolError("bad_payload", f"unknown envelope fields: {sorted(unknown)}")
    missing = {"kind", "seq", "t"} - set(doc)
    if missing:
        raise ProtocolError("bad_payload", f"missing envelope fields: {sorted(missing)}")
    kind = doc["kind"]
    if not isinstance(kind, str) or kind not in ALL_KINDS:
        raise ProtocolError("unknown_kind", f"unknown message kind {kind!r}")
    seq = doc["seq"]
    if not isinstance(seq, int) or isinstance(seq, bool) or seq < 0:
        raise ProtocolError("bad_payload", f"seq must be a nonnegative integer, got {seq!r}")
    t = doc["t"]
    if not isinstance(t, (int, float)) or isinstance(t, bool):
        raise ProtocolError("bad_payload", f"t must be a number, got {t!r}")
    payload = doc.get("payload", {})
    if not isinstance(payload, dict):
        raise ProtocolError("bad_payload", "payload must be an object")
    return WireMessage(kind=kind, seq=seq, t=float(t), payload=payload)


def _require_fields(payload: dict, required: dict, optional: dict | None = None) -> None:
    optional = optional or {}
    unknown = set(payload) - set(required) - set(optional)
    if unknown:
        raise ProtocolError("bad_payload", f"unknown payload fields: {sorted(unknown)}")
    for name, types in required.items():
        if name not in payload:
            raise ProtocolError("bad_payload", f"payload missing field {name!r}")
        if not isinstance(payload[name], types) or isinstance(payload[name], bool) and types != (bool,):
            raise ProtocolError("bad_payload", f"payload field {name!r} has wrong type")
    for name, types in optional.items():
        if name in payload and not isinstance(payload[name], types):
            raise ProtocolError("bad_payload", f"payload field {name!r} has wrong type")


def _parse_vec(value, what: str) -> Vec3:
    if (
        not isinstance(value, list)
        or len(value) != 3
        or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value)
    ):
        raise ProtocolError("bad_payload", f"{what} must be [x, y, z]")
    return Vec3(float(value[0]), float(value[1]), float(value[2]))


@dataclass(frozen=True)
class SessionSettings:
    """Everything besides the inbound messages that shapes a session."""

    dt: float = SimConfig().dt
    scale: float = 8.0
    mode: str = ClutchMode.ABSOLUTE.value
    seed: int = 0

    def mapping_for(self, scenario: Scenario) -> MappingConfig:
        return MappingConfig._preset(self.scale, scenario.world.room, ClutchMode(self.mode))

    def sim_config(self) -> SimConfig:
        return SimConfig(dt=self.dt)


@dataclass
class SessionRecord:
    scenario_doc: dict
    settings: SessionSettings
    entries: list[tuple[int, WireMessage]] = field(default_factory=list)
    total_ticks: int = 0

    def dumps(self) -> str:
        header = {
            "format_version": RECORD_FORMAT_VERSION,
            "scenario": self.scenario_doc,
            "settings": {
                "dt": self.settings.dt,
                "scale": self.settings.scale,
                "mode": self.settings.mode,
                "seed": self.settings.seed,
            },
            "total_ticks": self.total_ticks,
        }
        lines = [json.dumps(header, separators=(",", ":"))]
        for tick, msg in self.entries:
            lines.append(
                json.dumps(
                    {"tick": tick, "kind": msg.kind, "seq": msg.seq, "t": msg.t, "payload": msg.payload},
                    separators=(",", ":"),
                )
            )
        return "\n".join(lines) + "\n"


def parse_record(text: str) -> SessionRecord:
    lines = [ln for ln in text.splitlines()]
    if not lines or not lines[0].strip():
        raise RecordError(1, "missing header line")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise RecordError(1, f"header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict) or header.get("format_version") != RECORD_FORMAT_VERSION:
        raise RecordError(1, f"unsupported record format: {header!r}")
    for key in ("scenario", "settings", "total_ticks"):
        if key not in header:
            raise RecordError(1, f"header missing {key!r}")
    s = header["settings"]
    if not isinstance(s, dict) or not {"dt", "scale", "mode", "seed"} <= set(s):
        raise RecordError(1, f"bad settings block: {s!r}")
    settings = SessionSettings(
        dt=float(s["dt"]), scale=float(s["scale"]), mode=str(s["mode"]), seed=int(s["seed"])
    )
    record = SessionRecord(
        scenario_doc=header["scenario"],
        settings=settings,
        total_ticks=int(header["total_ticks"]),
    )
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            entry = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordError(i, f"not valid JSON: {exc}") from exc
        if not isinstance(entry, dict) or not {"tick", "kind", "seq", "t"} <= set(entry):
            raise RecordError(i, f"malformed entry: {entry!r}")
        if entry["kind"] not in ("hand_input", "clutch_input", "reset_goal"):
            raise RecordError(i, f"unexpected recorded kind {entry['kind']!r}")
        try:
            msg = WireMessage(
                kind=str(entry["kind"]),
                seq=int(entry["seq"]),
                t=float(entry["t"]),
                payload=entry.get("payload", {}),
            )
        except (TypeError, ValueError) as exc:
            raise RecordError(i, str(exc)) from exc
        record.entries.append((int(entry["tick"]), msg))
    return record


def load_record_file(path: str) -> SessionRecord:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_record(fh.read())


def default_record_dir() -> str:
    return os.environ.get(LOG_DIR_ENV, os.path.join(os.getcwd(), "records"))


class GatewaySession:
    """Protocol state machine plus the simulation it owns.

    `handle_message` validates and applies one inbound message, returning the
    immediate replies; `tick` advances the simulation one step and returns the
    broadcast messages. Inbound seq numbers must increase strictly; messages
    arriving out of order are buffered and consumed in seq order.
    """

    def __init__(
        self,
        *,
        default_scenario: Scenario | None = None,
        settings: SessionSettings | None = None,
        record: bool = True,
    ):
        self.settings = settings or SessionSettings()
        self.established = False
        self.closed = False
        self.sim: SimSession | None = None
        self.scenario: Scenario | None = None
        self._default_scenario = default_scenario
        self._out_seq = 0
        self._next_in_seq: int | None = None
        self._reorder: dict[int, WireMessage] = {}
        self._recording = record
        self.record: SessionRecord | None = None

    # -- outbound helpers ---------------------------------------------------

    def _outbound(self, kind: str, payload: dict) -> WireMessage:
        self._out_seq += 1
        t = self.sim.state.time if self.sim is not None else 0.0
        return WireMessage(kind=kind, seq=self._out_seq, t=t, payload=payload)

    def _error(self, code: str, message: str) -> WireMessage:
        return self._outbound("error", {"code": code, "message": message})

    # -- inbound ---------------------------------------------------------------

    def handle_text(self, text: str) -> list[WireMessage]:
        try:
            msg = parse_message(text)
        except ProtocolError as exc:
            return [self._error(exc.code, str(exc))]
        return self.handle_message(msg)

    def handle_message(self, msg: WireMessage) -> list[WireMessage]:
        if self.closed:
            return []
        if msg.kind not in INBOUND_KINDS:
            return [self._error("unknown_kind", f"clients may not send {msg.kind!r}")]

        if self._next_in_seq is None:
            self._next_in_seq = msg.seq  # first message fixes the numbering base
        if msg.seq < self._next_in_seq or msg.seq in self._reorder:
            return [self._error("bad_seq", f"seq {msg.seq} already consumed")]

        self._reorder[msg.seq] = msg
        replies: list[WireMessage] = []
        while self._next_in_seq in self._reorder:
            queued = self._reorder.pop(self._next_in_seq)
            self._next_in_seq += 1
            replies.extend(self._apply(queued))
            if self.closed:
                break
        return replies

    def _apply(self, msg: WireMessage) -> list[WireMessage]:
        try:
            if msg.kind == "hello":
                return self._on_hello(msg)
            if not self.established:
                return [self._error("not_established", "send hello first")]
            if msg.kind == "load_scenario":
                return self._on_load(msg)
            if self.sim is None:
                return [self._error("no_scenario", "load a scenario first")]
            if msg.kind == "hand_input":
                _require_fields(
                    msg.payload, {"position": (list,)}, {"timestamp": (int, float)}
                )
                position = _parse_vec(msg.payload["position"], "position")
                ts = float(msg.payload.get("timestamp", msg.t))
                self._record_entry(msg)
                self.sim.apply_hand(position, ts)
                return []
            if msg.kind == "clutch_input":
                _require_fields(msg.payload, {"engaged": (bool,)})
                self._record_entry(msg)
                self.sim.apply_clutch(bool(msg.payload["engaged"]))
                return []
            if msg.kind == "reset_goal":
                _require_fields(msg.payload, {})
                self._record_entry(msg)
                self.sim.reset_goal()
                return []
            return [self._error("unknown_kind", f"unhandled kind {msg.kind!r}")]
        except ProtocolError as exc:
            return [self._error(exc.code, str(exc))]

    def _on_hello(self, msg: WireMessage) -> list[WireMessage]:
        _require_fields(msg.payload, {"version": (int,)}, {"client": (str,)})
        if msg.payload["version"] != PROTOCOL_VERSION:
            self.closed = True
            return [
                self._error(
                    "bad_version",
                    f"protocol version {msg.payload['version']} unsupported, "
                    f"server speaks {PROTOCOL_VERSION}",
                )
            ]
        already = self.established
        self.established = True
        replies = [self._outbound("hello", {"version": PROTOCOL_VERSION})]
        if not already and self._default_scenario is not None and self.sim is None:
            self._start(self._default_scenario)
            replies.append(self._scenario_loaded_event())
        return replies

    def _on_load(self, msg: WireMessage) -> list[WireMessage]:
        _require_fields(msg.payload, {}, {"task": (str,), "scenario": (dict,)})
        if ("task" in msg.payload) == ("scenario" in msg.payload):
            raise ProtocolError("bad_payload", "provide exactly one of task or scenario")
        try:
            if "task" in msg.payload:
                scenario = build_scenario(msg.payload["task"])
            else:
                scenario = load_scenario_json(msg.payload["scenario"])
        except (ScenarioError, ValueError) as exc:
            raise ProtocolError("bad_payload", f"cannot load scenario: {exc}") from exc
        self._start(scenario)
        return [self._scenario_loaded_event()]

    def _scenario_loaded_event(self) -> WireMessage:
        # geometry rides along so clients can draw the scene
        return self._outbound(
            "event",
            {
                "event": "scenario_loaded",
                "task": self.scenario.task.value,
                "scenario": scenario_to_json(self.scenario),
            },
        )

    def _start(self, scenario: Scenario) -> None:
        self.scenario = scenario
        self.sim = _make_sim(scenario, self.settings)
        if self._recording:
            # the scenario and settings live in the header; only the input
            # stream needs per-message capture
            self.record = SessionRecord(
                scenario_doc=scenario_to_json(scenario), settings=self.settings
            )

    def _record_entry(self, msg: WireMessage) -> None:
        if self.record is not None and self.sim is not None:
            # applied before the next tick advances
            self.record.entries.append((self.sim.tick_index + 1, msg))
            self.record.total_ticks = max(self.record.total_ticks, self.sim.tick_index + 1)

    # -- stepping ------------------------------------------------------------

    def tick(self) -> list[WireMessage]:
        """Advance the owned simulation one step; broadcast state, cue, events."""
        if self.sim is None:
            return []
        events = self.sim.tick()
        if self.record is not None:
            self.record.total_ticks = self.sim.tick_index
        out = [
            self._outbound(
                "state_update",
                {
                    "tick": self.sim.tick_index,
                    "position": list(self.sim.state.position),
                    "velocity": list(self.sim.state.velocity),
                    "goal": list(self.sim.goal),
                    "clutch_engaged": self.sim.clutch.engaged,
                },
            ),
            self._outbound(
                "cue_update",
                {
                    "intensities": list(self.sim.cue.intensities),
                    "max_intensity": self.sim.cue.max_intensity,
                },
            ),
        ]
        for ev in events:
            out.append(
                self._outbound("event", {"event": ev.kind.value, "time": ev.time, **ev.payload})
            )
        return out

    @property
    def log(self) -> TrialLog | None:
        return self.sim.log if self.sim is not None else None


def _make_sim(scenario: Scenario, settings: SessionSettings) -> SimSession:
    return SimSession(
        scenario,
        config=settings.sim_config(),
        mapping=settings.mapping_for(scenario),
        haptics=HapticsConfig(),
        meta={"seed": settings.seed},
    )


def replay_session(record: SessionRecord) -> TrialLog:
    """Re-run a recorded session offline; deterministic and socket-free.

    Recorded inputs are applied before the tick they were captured against,
    and exactly total_ticks steps run, so the returned log matches the live
    session's bit for bit.
    """
    try:
        scenario = load_scenario_json(record.scenario_doc)
    except ScenarioError as exc:
        raise RecordError(1, f"bad scenario in header: {exc}") from exc
    sim = _make_sim(scenario, record.settings)
    by_tick: dict[int, list[WireMessage]] = {}
    for tick, msg in record.entries:
        by_tick.setdefault(tick, []).append(msg)

    for tick in range(1, record.total_ticks + 1):
        for msg in by_tick.get(tick, []):
            if msg.kind == "hand_input":
                position = _parse_vec(msg.payload["position"], "position")
                sim.apply_hand(position, float(msg.payload.get("timestamp", msg.t)))
            elif msg.kind == "clutch_input":
                sim.apply_clutch(bool(msg.payload["engaged"]))
            elif msg.kind == "reset_goal":
                sim.reset_goal()
        sim.tick()
    return sim.log
