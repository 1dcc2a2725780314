"""Channels, transcripts, and the attack-tap interface.

A session keeps one transcript: an ordered list of events with monotone
sequence numbers.  Re-running a session with the same seed reproduces the
transcript bit for bit, so transcripts double as regression artifacts.

Channels are in-order and lossless.  A quantum channel may carry a tap: an
adversary hooked into specific legs of the protocol.  Classical channels
are authenticated-but-public; attackers may read publications, never forge
them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .qcore import QubitId, StateRegister


class ProtocolError(RuntimeError):
    """Protocol-level failure (closed channel, exhausted stock, bad roster)."""


class TamperingDetected(ProtocolError):
    """Raised when a decode hits a measurement pair no honest run produces."""


@dataclass
class TranscriptEvent:
    seq: int
    actor: str
    action: str
    payload: dict[str, Any]

    def as_dict(self) -> dict[str, Any]:
        return {"seq": self.seq, "actor": self.actor,
                "action": self.action, "payload": self.payload}


class Transcript:
    """Replayable session record: header, ordered events, final decodes."""

    def __init__(self, header: dict[str, Any]) -> None:
        self.header = dict(header)
        self.events: list[TranscriptEvent] = []
        self.final: dict[str, str] = {}

    def add(self, actor: str, action: str, payload: dict[str, Any]) -> TranscriptEvent:
        event = TranscriptEvent(len(self.events), actor, action, payload)
        self.events.append(event)
        return event

    def select(self, action: str) -> list[TranscriptEvent]:
        return [e for e in self.events if e.action == action]

    def as_dict(self) -> dict[str, Any]:
        return {"header": self.header,
                "events": [e.as_dict() for e in self.events],
                "final": self.final}

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.as_dict(), indent=indent)


class AttackModel:
    """Base channel tap.  The default implementation is a no-op observer.

    Hooks receive the live register plus the qubit in flight and may extend
    the register with adversary ancillas.  ``on_auth_forward`` may return a
    replacement particle: the adversary then cuts the legitimate user out of
    the round and the returned qubit is what the server checks.
    """

    kind = "none"
    leg = "auth"  # which legs the tap attaches to: "auth" or "message"

    def on_auth_forward(self, reg: StateRegister, server_q: QubitId, u: QubitId,
                        rng: np.random.Generator) -> Optional[QubitId]:
        """Tap on the server -> user leg.  Return a replacement check
        particle to impersonate the user, or None to stay passive."""
        return None

    def on_auth_return(self, reg: StateRegister, n: QubitId,
                       rng: np.random.Generator) -> None:
        """Tap on the user -> server leg."""

    def on_message_qubit(self, reg: StateRegister, qubit: QubitId,
                         rng: np.random.Generator) -> None:
        """Tap on one sender's encoded qubit in flight to the measurer."""


@dataclass
class Channel:
    """Point-to-point link.  Quantum channels move qubit custody; classical
    channels broadcast outcomes.  Every use is logged to the transcript."""

    a: str
    b: str
    kind: str = "quantum"
    tap: Optional[AttackModel] = None
    transcript: Optional[Transcript] = None
    closed: bool = False
    log: list[TranscriptEvent] = field(default_factory=list)

    def record(self, actor: str, action: str, payload: dict[str, Any]) -> None:
        if self.transcript is not None:
            self.log.append(self.transcript.add(actor, action, payload))

    def ensure_open(self) -> None:
        if self.closed:
            raise ProtocolError(f"channel {self.a}<->{self.b} is closed")
