"""EPR + CNOT authentication handshake between the quantum server and one
disjoint user.

One round consumes two key bits (k1, k2):

1. the server prepares a Phi+ pair (q, u), keeps q, sends u to the user;
2. the user prepares a check particle n = |k1 xor k2>;
3. the user applies the round gate with control u and target n -- the gate
   is the Z-controlled CNOT when k1 = 0, the X-controlled CNOT when k1 = 1 --
   then returns n and keeps u;
4. the server applies the same gate with control q and target n and
   measures n in Z.  The round accepts iff the result equals k1 xor k2.

On a clean channel every round accepts and the (q, u) pair is restored to
Phi+ exactly, so accepted pairs are retained as GHZ-fabrication stock.
An in-the-middle adversary may return its own particle instead of n (see
``AttackModel.on_auth_forward``); detection statistics for that case follow
the closed forms in :mod:`qsdcsim.adversary`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import AttackModel, Channel, ProtocolError
from .qcore import (
    ControlledOp,
    QubitAllocator,
    QubitId,
    StateRegister,
    compose,
    make_bell,
)

DEFAULT_ROUNDS = 64
DEFAULT_THRESHOLD = 0.05


@dataclass
class AuthKey:
    """Binary authentication key shared at registration; two bits per round."""

    bits: str

    def __post_init__(self) -> None:
        if len(self.bits) % 2 != 0:
            raise ProtocolError("authentication key must have even length")
        if set(self.bits) - {"0", "1"}:
            raise ProtocolError("authentication key must be binary")

    @property
    def rounds_available(self) -> int:
        return len(self.bits) // 2

    def pair(self, round_index: int) -> tuple[int, int]:
        if round_index >= self.rounds_available:
            raise ProtocolError("authentication key exhausted")
        return (int(self.bits[2 * round_index]), int(self.bits[2 * round_index + 1]))

    @classmethod
    def random(cls, rounds: int, rng: np.random.Generator) -> "AuthKey":
        return cls("".join(str(b) for b in rng.integers(0, 2, size=2 * rounds)))


@dataclass
class AuthRound:
    round_index: int
    key_pair: tuple[int, int]
    measured_value: int
    outcome: str  # "accept" | "reject"

    @property
    def accepted(self) -> bool:
        return self.outcome == "accept"


@dataclass
class AuthResult:
    rounds: list[AuthRound]
    error_rate: float
    verdict: str  # "authenticated" | "terminated"
    retained_pairs: list[StateRegister] = field(default_factory=list)


def round_gate(k1: int) -> ControlledOp:
    return ControlledOp.C0 if k1 == 0 else ControlledOp.C1


def run_auth_round(key_pair: tuple[int, int], channel: Channel,
                   rng: np.random.Generator,
                   alloc: QubitAllocator | None = None,
                   round_index: int = 0) -> tuple[AuthRound, StateRegister | None]:
    """Execute one handshake round over ``channel`` (server side = channel.a).

    Returns the round record plus the retained (q, u) register when the
    round accepted with particle custody intact, else None.
    """
    channel.ensure_open()
    alloc = alloc or QubitAllocator()
    server, user = channel.a, channel.b
    k1, k2 = key_pair
    expected = k1 ^ k2
    gate = round_gate(k1)

    q = alloc.new(server)
    u = alloc.new(user)
    reg = make_bell([q, u])
    channel.record(server, "epr_prepared", {"q": repr(q), "u": repr(u)})
    channel.record(server, "qubit_sent", {"qubit": repr(u), "to": user})

    tap = channel.tap
    replacement: QubitId | None = None
    if tap is not None:
        replacement = tap.on_auth_forward(reg, q, u, rng)

    if replacement is None:
        # honest user completes the round
        n = alloc.new(user)
        reg = compose(reg, StateRegister.computational([n], str(expected)))
        reg.apply_controlled(u, n, gate)
        channel.record(user, "check_encoded", {"n": repr(n), "gate": gate.value})
        channel.record(user, "qubit_sent", {"qubit": repr(n), "to": server})
        if tap is not None:
            tap.on_auth_return(reg, n, rng)
        check = n
        decode_gate = gate
    else:
        # the adversary cut the user out and returned its own particle; the
        # published detection analysis checks it with the Z-controlled
        # decode for every key value (the averaged rate is gate-independent)
        channel.record(user, "qubit_sent", {"qubit": repr(replacement), "to": server})
        check = replacement
        decode_gate = ControlledOp.C0

    reg.apply_controlled(q, check, decode_gate)
    measured = reg.measure_z(check, rng)
    outcome = "accept" if measured == expected else "reject"
    channel.record(server, "auth_round", {
        "round": round_index, "measured": measured, "outcome": outcome})

    record = AuthRound(round_index, key_pair, measured, outcome)
    if outcome == "accept" and replacement is None:
        reg.remove_qubit(check)
        return record, reg
    return record, None


def authenticate_user(key: AuthKey, rounds: int, threshold: float,
                      channel: Channel, rng: np.random.Generator,
                      alloc: QubitAllocator | None = None) -> AuthResult:
    """Run ``rounds`` handshake rounds and apply the error-rate threshold.

    Accepted rounds' (q, u) pairs are retained for GHZ fabrication.
    """
    if rounds > key.rounds_available:
        raise ProtocolError(
            f"key supports {key.rounds_available} rounds, {rounds} requested")
    alloc = alloc or QubitAllocator()
    records: list[AuthRound] = []
    retained: list[StateRegister] = []
    for i in range(rounds):
        record, pair = run_auth_round(key.pair(i), channel, rng, alloc, round_index=i)
        records.append(record)
        if pair is not None:
            retained.append(pair)
    errors = sum(1 for r in records if not r.accepted)
    error_rate = errors / rounds if rounds else 0.0
    verdict = "terminated" if error_rate > threshold else "authenticated"
    channel.record(channel.a, "auth_verdict", {
        "user": channel.b, "rounds": rounds,
        "error_rate": error_rate, "verdict": verdict})
    return AuthResult(records, error_rate, verdict, retained)
