"""Build shared (N+1)-particle GHZ states from post-authentication EPR pairs.

Each retained pair links one user to the server.  The server fuses its local
halves one at a time: a CNOT between its anchor qubit and the next pair's
server qubit, a Z measurement of that qubit, and a conditional X correction
on the user side.  The outcome-dependent correction makes the extension
deterministic, so every allocation is an exact GHZ over the users plus one
server qubit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ProtocolError
from .qcore import (
    ControlledOp,
    PauliOp,
    QubitId,
    StateRegister,
    compose,
    ghz_vector,
    make_bell,
)

_PHI_PLUS = make_bell([QubitId("_", 0), QubitId("_", 1)]).amps


@dataclass
class GhzAllocation:
    """One message symbol's worth of entanglement: a fresh GHZ register and
    the party -> qubit assignment (the server holds exactly one qubit)."""

    session_id: str
    index: int
    qubit_map: dict[str, QubitId]
    register: StateRegister


def _require_bell_pair(reg: StateRegister) -> None:
    if reg.n_qubits != 2 or abs(reg.fidelity(_PHI_PLUS) - 1.0) > 1e-9:
        raise ProtocolError("extension input is not a Phi+ pair")


def _fuse(current: StateRegister, anchor: QubitId, pair: StateRegister,
          pair_server: QubitId, pair_user: QubitId,
          rng: np.random.Generator) -> StateRegister:
    """Merge ``pair`` into ``current`` through the server's two local qubits."""
    reg = compose(current, pair)
    reg.apply_controlled(anchor, pair_server, ControlledOp.C0)
    if reg.measure_z(pair_server, rng) == 1:
        reg.apply_pauli(pair_user, PauliOp.X)
    reg.remove_qubit(pair_server)
    return reg


def extend_epr(epr_iq: StateRegister, epr_qj: StateRegister,
               server_qubits: tuple[QubitId, QubitId],
               rng: np.random.Generator) -> StateRegister:
    """Fuse two Phi+ pairs that share the server into a three-party GHZ.

    ``server_qubits`` names the server's halves: the anchor inside
    ``epr_iq`` (kept) and the half inside ``epr_qj`` (measured away).
    The result is (|000> + |111>)/sqrt(2) over (i, anchor, j), exactly.
    """
    anchor, merged = server_qubits
    _require_bell_pair(epr_iq)
    _require_bell_pair(epr_qj)
    if anchor not in epr_iq or merged not in epr_qj:
        raise ProtocolError("server qubits not found in their pairs")
    (j,) = [q for q in epr_qj.qubits if q != merged]
    return _fuse(epr_iq, anchor, epr_qj, merged, j, rng)


def allocate_ghz(session, parties: list[str],
                 rng: np.random.Generator) -> GhzAllocation:
    """Draw one retained pair per party from the session inventory and fuse
    them into an (N+1)-qubit GHZ allocation.

    Faults if any party is not authenticated or its pair stock is exhausted.
    """
    if len(parties) < 2:
        raise ProtocolError("an allocation needs at least two parties")
    for party in parties:
        if not session.is_authenticated(party):
            raise ProtocolError(f"party {party} is not authenticated")

    pairs = [session.draw_pair(party) for party in parties]

    def split(pair: StateRegister, party: str) -> tuple[QubitId, QubitId]:
        server_half = [q for q in pair.qubits if q.owner == session.server_name]
        user_half = [q for q in pair.qubits if q.owner == party]
        if len(server_half) != 1 or len(user_half) != 1:
            raise ProtocolError(f"malformed retained pair for {party}")
        return server_half[0], user_half[0]

    anchor, first_user = split(pairs[0], parties[0])
    reg = pairs[0]
    qubit_map = {session.server_name: anchor, parties[0]: first_user}
    for party, pair in zip(parties[1:], pairs[1:]):
        pair_server, pair_user = split(pair, party)
        reg = _fuse(reg, anchor, pair, pair_server, pair_user, rng)
        qubit_map[party] = pair_user

    # No output assertion here: the parties cannot verify the state without
    # destroying it.  Corrupted stock (e.g. pairs dephased by a probe on the
    # return leg) flows through and is caught by the post-transmission check.
    index = session.next_allocation_index()
    return GhzAllocation(session.session_id, index, qubit_map, reg)
