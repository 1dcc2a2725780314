"""Message encoding/decoding and session orchestration.

Framing
-------
With N users, u_1 .. u_{N-1} are senders and u_N is the receiver.  One
symbol rides one (N+1)-particle GHZ allocation.  The first sender encodes
two bits as a full Pauli {00:I, 01:X, 10:Y, 11:Z}; every further sender
encodes one bit as {0:I, 1:X}, so a symbol is exactly N bits wide.  A GHZ
state is stabilized by Z on any two touched qubits, so only one sender can
carry the phase bit: N bits per symbol is the capacity of the shared state,
and the oracle below verifies the map stays collision-free.

Cooperation modes
-----------------
partial: the receiver performs the entangled-basis measurement over all N
user qubits and the server publishes the X-basis status of its own qubit.
full: the server measures (senders' qubits plus its own) and the receiver
publishes its X outcome.  There is then no user-to-user quantum channel.

The decode tables are generated once per (N, mode) by applying every
encoding to a fresh GHZ state and reading off the exact measurement
decomposition; the published 2- and 3-user correlation tables are used as
acceptance vectors against this map, never as its source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np

from . import auth as auth_mod
from .channels import AttackModel, Channel, ProtocolError, TamperingDetected, Transcript
from .ghzfab import GhzAllocation, allocate_ghz
from .qcore import (
    GhzOutcome,
    PauliOp,
    QubitAllocator,
    QubitId,
    StateRegister,
    XOutcome,
    make_ghz,
)

DEFAULT_SAMPLE_FRACTION = 0.1


class Mode(str, Enum):
    PARTIAL = "partial"
    FULL = "full"


_DIBIT_TO_PAULI = {"00": PauliOp.I, "01": PauliOp.X, "10": PauliOp.Y, "11": PauliOp.Z}
_BIT_TO_PAULI = {"0": PauliOp.I, "1": PauliOp.X}


def symbol_width(n_users: int) -> int:
    """Bits per symbol: 2 for the first sender plus 1 for each other sender."""
    if n_users < 2:
        raise ProtocolError("at least two users are required")
    return n_users


def encode_symbol(bits: str, n_users: int) -> list[PauliOp]:
    """Map one symbol to the per-sender operation list.

    The first two bits pick the full Pauli for u_1; each remaining bit picks
    I or X for the next sender.
    """
    width = symbol_width(n_users)
    if len(bits) != width or set(bits) - {"0", "1"}:
        raise ProtocolError(f"symbol must be {width} binary digits, got {bits!r}")
    ops = [_DIBIT_TO_PAULI[bits[:2]]]
    ops.extend(_BIT_TO_PAULI[b] for b in bits[2:])
    return ops


def decode_ops(ops: list[PauliOp]) -> str:
    """Inverse of encode_symbol, for reporting."""
    inverse_dibit = {v: k for k, v in _DIBIT_TO_PAULI.items()}
    inverse_bit = {v: k for k, v in _BIT_TO_PAULI.items()}
    return inverse_dibit[ops[0]] + "".join(inverse_bit[op] for op in ops[1:])


@dataclass
class Message:
    """A bit string split into N-bit symbols, zero-padded to a whole count."""

    bits: str
    n_users: int
    symbols: list[str] = field(init=False)
    pad_len: int = field(init=False)

    def __post_init__(self) -> None:
        if set(self.bits) - {"0", "1"}:
            raise ProtocolError("message must be a binary string")
        width = symbol_width(self.n_users)
        pad = (-len(self.bits)) % width
        padded = self.bits + "0" * pad
        self.symbols = [padded[i:i + width] for i in range(0, len(padded), width)]
        self.pad_len = pad


# ----------------------------------------------------------------------
# decode-table oracle

@lru_cache(maxsize=None)
def decode_map(n_users: int, mode: Mode) -> dict[tuple[str, int, str], str]:
    """Exact (pattern, sign, publication) -> symbol map, generated by
    applying every encoding to a fresh GHZ state.

    The 2^(N+1) measurement results tile the 2^N encodings two-to-one, so
    the map is total: any result decodes to exactly one symbol.
    """
    mode = Mode(mode)
    width = symbol_width(n_users)
    users = [QubitId(f"u{k + 1}", 0) for k in range(n_users)]
    server = QubitId("server", 0)
    senders, receiver = users[:-1], users[-1]
    if mode is Mode.PARTIAL:
        measured, published = senders + [receiver], server
    else:
        measured, published = senders + [server], receiver

    table: dict[tuple[str, int, str], str] = {}
    for value in range(2 ** width):
        bits = format(value, f"0{width}b")
        reg = make_ghz(users + [server])
        for sender, op in zip(senders, encode_symbol(bits, n_users)):
            reg.apply_pauli(sender, op)
        dist = reg.ghz_x_joint_distribution(measured, published)
        for key, prob in dist.items():
            if prob < 1e-12:
                continue
            if key in table:
                raise ProtocolError(
                    f"decode collision at {key}: {table[key]} vs {bits}")
            table[key] = bits
    return table


def decode_symbol(mode: Mode, ghz: GhzOutcome, pub: XOutcome, n_parties: int) -> str:
    """Invert the encoding given the measurement/publication pair.

    A pair outside the generated map signals tampering (it cannot arise from
    any honest encoding) and faults.
    """
    try:
        return decode_map(n_parties, Mode(mode))[(ghz.pattern, ghz.sign, pub.value)]
    except KeyError:
        raise TamperingDetected(
            f"no encoding produces {ghz.pattern}{'+' if ghz.sign > 0 else '-'}"
            f" with publication {pub.value}") from None


# ----------------------------------------------------------------------
# session

@dataclass
class CheckResult:
    sampled: int
    errors: int
    error_rate: float
    verdict: str  # "pass" | "terminated"


@dataclass
class SessionReport:
    decoded: str
    sent: str
    pad_len: int
    auth: dict[str, auth_mod.AuthResult]
    check: Optional[CheckResult]
    alarm: bool
    alarm_stage: Optional[str]
    transcript: Transcript


class Session:
    """One N-party protocol run: roster, channels, transcript, inventory.

    All randomness flows through a single seeded generator consumed in a
    fixed order (authentication rounds in roster order, then allocations,
    then per-symbol events, then check sampling), so identical seeds yield
    bit-identical transcripts.
    """

    def __init__(self, n_users: int, mode: Mode | str, seed: int, *,
                 auth_rounds: int = auth_mod.DEFAULT_ROUNDS,
                 threshold: float = auth_mod.DEFAULT_THRESHOLD,
                 sample_fraction: float = DEFAULT_SAMPLE_FRACTION,
                 attack: Optional[AttackModel] = None,
                 attack_user: str = "u1",
                 session_id: str = "session-0") -> None:
        if n_users < 2:
            raise ProtocolError("at least two users are required")
        self.n_users = n_users
        self.mode = Mode(mode)
        self.seed = int(seed)
        self.rng = np.random.default_rng(self.seed)
        self.auth_rounds = auth_rounds
        self.threshold = threshold
        self.sample_fraction = sample_fraction
        self.attack = attack
        self.attack_user = attack_user
        self.session_id = session_id

        self.server_name = "server"
        self.users = [f"u{k + 1}" for k in range(n_users)]
        self.senders = self.users[:-1]
        self.receiver = self.users[-1]
        self.alloc = QubitAllocator()
        self.transcript = Transcript({
            "n_users": n_users, "mode": self.mode.value,
            "seed": self.seed, "pad_len": 0})
        self.auth_channels = {
            user: Channel(self.server_name, user, kind="quantum",
                          tap=self._auth_tap(user), transcript=self.transcript)
            for user in self.users}
        measurer = self.receiver if self.mode is Mode.PARTIAL else self.server_name
        self.message_channels = {
            sender: Channel(sender, measurer, kind="quantum",
                            tap=self._message_tap(sender), transcript=self.transcript)
            for sender in self.senders}
        self.broadcast = Channel(self.server_name, "*", kind="classical",
                                 transcript=self.transcript)
        self.auth_results: dict[str, auth_mod.AuthResult] = {}
        self._inventory: dict[str, list[StateRegister]] = {u: [] for u in self.users}
        self._allocation_count = 0
        self._sent_symbols: list[str] = []
        self._decoded_symbols: list[str] = []

    def _auth_tap(self, user: str) -> Optional[AttackModel]:
        if self.attack is not None and self.attack.leg == "auth" \
                and user == self.attack_user:
            return self.attack
        return None

    def _message_tap(self, sender: str) -> Optional[AttackModel]:
        if self.attack is not None and self.attack.leg == "message" \
                and sender == self.attack_user:
            return self.attack
        return None

    # -- roster / inventory hooks used by ghzfab ------------------------

    def is_authenticated(self, party: str) -> bool:
        result = self.auth_results.get(party)
        return result is not None and result.verdict == "authenticated"

    def draw_pair(self, party: str) -> StateRegister:
        stock = self._inventory[party]
        if not stock:
            raise ProtocolError(f"EPR stock exhausted for {party}")
        return stock.pop(0)

    def next_allocation_index(self) -> int:
        index = self._allocation_count
        self._allocation_count += 1
        return index

    # -- protocol phases -------------------------------------------------

    def authenticate_all(self) -> dict[str, auth_mod.AuthResult]:
        """Authenticate every user in roster order; retained pairs go to
        that user's fabrication stock."""
        for user in self.users:
            key = auth_mod.AuthKey.random(self.auth_rounds, self.rng)
            result = auth_mod.authenticate_user(
                key, self.auth_rounds, self.threshold,
                self.auth_channels[user], self.rng, self.alloc)
            self.auth_results[user] = result
            self._inventory[user] = list(result.retained_pairs)
        return self.auth_results

    def allocate(self, count: int) -> list[GhzAllocation]:
        return [allocate_ghz(self, self.users, self.rng) for _ in range(count)]

    def send_message(self, bits: str) -> Transcript:
        """Transmit a message symbol by symbol over fresh GHZ allocations.

        Senders apply their operations locally and ship their qubits to the
        measurer (receiver in partial mode, server in full mode); the
        remaining party measures X and publishes; the receiver decodes.
        """
        message = Message(bits, self.n_users)
        self.transcript.header["pad_len"] = message.pad_len
        allocations = self.allocate(len(message.symbols))
        for index, symbol in enumerate(message.symbols):
            self._transmit_symbol(index, symbol, allocations[index])
        decoded = "".join(self._decoded_symbols)
        self.transcript.final[self.receiver] = decoded
        return self.transcript

    def _transmit_symbol(self, index: int, symbol: str,
                         allocation: GhzAllocation) -> None:
        reg = allocation.register
        qmap = allocation.qubit_map
        ops = encode_symbol(symbol, self.n_users)
        for sender, op in zip(self.senders, ops):
            reg.apply_pauli(qmap[sender], op)
        self._sent_symbols.append(symbol)
        self.transcript.add("senders", "symbol_encoded", {
            "index": index, "bits": symbol, "ops": [op.value for op in ops]})

        measurer = self.receiver if self.mode is Mode.PARTIAL else self.server_name
        for sender in self.senders:
            channel = self.message_channels[sender]
            channel.ensure_open()
            channel.record(sender, "qubit_sent",
                           {"qubit": repr(qmap[sender]), "to": measurer})
            if channel.tap is not None:
                channel.tap.on_message_qubit(reg, qmap[sender], self.rng)

        if self.mode is Mode.PARTIAL:
            measured = [qmap[u] for u in self.senders] + [qmap[self.receiver]]
            publisher, pub_qubit = self.server_name, qmap[self.server_name]
        else:
            measured = [qmap[u] for u in self.senders] + [qmap[self.server_name]]
            publisher, pub_qubit = self.receiver, qmap[self.receiver]

        outcome = reg.measure_ghz(measured, self.rng)
        self.transcript.add(measurer, "ghz_measured", {
            "index": index, "pattern": outcome.pattern,
            "sign": "+" if outcome.sign > 0 else "-", "label": outcome.label})
        pub = reg.measure_x(pub_qubit, self.rng)
        self.broadcast.record(publisher, "publication",
                              {"index": index, "value": pub.value})

        decoded = decode_symbol(self.mode, outcome, pub, self.n_users)
        self._decoded_symbols.append(decoded)
        self.transcript.add(self.receiver, "symbol_decoded",
                            {"index": index, "bits": decoded})

    def eavesdrop_check(self, sample_fraction: float | None = None,
                        threshold: float | None = None) -> CheckResult:
        fraction = self.sample_fraction if sample_fraction is None else sample_fraction
        limit = self.threshold if threshold is None else threshold
        return eavesdrop_check(self.transcript, fraction, limit, self.rng)

    def run(self, bits: str) -> SessionReport:
        """authenticate -> allocate -> transmit -> check, with alarms."""
        self.authenticate_all()
        terminated = [u for u, r in self.auth_results.items()
                      if r.verdict == "terminated"]
        if terminated:
            return SessionReport("", bits, 0, self.auth_results, None,
                                 alarm=True, alarm_stage="auth",
                                 transcript=self.transcript)
        try:
            self.send_message(bits)
        except TamperingDetected:
            self.transcript.add(self.receiver, "tamper_alarm", {"stage": "decode"})
            return SessionReport("", bits, self.transcript.header["pad_len"],
                                 self.auth_results, None, alarm=True,
                                 alarm_stage="decode", transcript=self.transcript)
        check = self.eavesdrop_check()
        decoded_full = self.transcript.final[self.receiver]
        return SessionReport(decoded_full[:len(bits)], bits,
                             self.transcript.header["pad_len"],
                             self.auth_results, check,
                             alarm=check.verdict == "terminated",
                             alarm_stage="check" if check.verdict == "terminated" else None,
                             transcript=self.transcript)


def send_message(session: Session, mode: Mode | str, bits: str,
                 rng: np.random.Generator | None = None) -> Transcript:
    """Module-level convenience wrapper around ``Session.send_message``."""
    if Mode(mode) is not session.mode:
        raise ProtocolError("session was built for a different mode")
    return session.send_message(bits)


def eavesdrop_check(transcript: Transcript, sample_fraction: float,
                    threshold: float, rng: np.random.Generator) -> CheckResult:
    """Post-transmission sampling check.

    The senders reveal the positions and operations of a random sample of
    transmitted symbols; the receiver compares its decodes against them and
    terminates iff the observed error rate exceeds the threshold.
    """
    sent = {e.payload["index"]: e.payload["bits"]
            for e in transcript.select("symbol_encoded")}
    decoded = {e.payload["index"]: e.payload["bits"]
               for e in transcript.select("symbol_decoded")}
    total = len(sent)
    if sample_fraction > 0 and total > 0:
        size = min(total, max(1, math.ceil(sample_fraction * total)))
        positions = sorted(int(i) for i in
                           rng.choice(total, size=size, replace=False))
    else:
        positions = []
    errors = sum(1 for i in positions if decoded.get(i) != sent[i])
    error_rate = errors / len(positions) if positions else 0.0
    verdict = "terminated" if error_rate > threshold else "pass"
    transcript.add("senders", "eavesdrop_check", {
        "positions": positions, "errors": errors,
        "error_rate": error_rate, "verdict": verdict})
    return CheckResult(len(positions), errors, error_rate, verdict)
