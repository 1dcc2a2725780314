"""qsdcsim: desk-scale simulator of N-user quantum secure direct communication.

Subsystems:

* :mod:`qsdcsim.qcore` -- state-vector engine with labeled qubits
* :mod:`qsdcsim.channels` -- channels, transcripts, attack-tap interface
* :mod:`qsdcsim.auth` -- EPR + CNOT authentication handshake
* :mod:`qsdcsim.ghzfab` -- GHZ fabrication from retained EPR pairs
* :mod:`qsdcsim.comms` -- message encoding/decoding and session orchestration
* :mod:`qsdcsim.adversary` -- attack models and closed-form security numbers
* :mod:`qsdcsim.service` -- FastAPI service wrapping the simulator
* :mod:`qsdcsim.cli` -- thin command-line client
"""

from .qcore import (
    BellOutcome,
    ControlledOp,
    GhzOutcome,
    PauliOp,
    QubitAllocator,
    QubitId,
    RegisterError,
    StateRegister,
    XOutcome,
    compose,
    make_bell,
    make_ghz,
)

__all__ = [
    "BellOutcome",
    "ControlledOp",
    "GhzOutcome",
    "PauliOp",
    "QubitAllocator",
    "QubitId",
    "RegisterError",
    "StateRegister",
    "XOutcome",
    "compose",
    "make_bell",
    "make_ghz",
]

__version__ = "0.1.0"
