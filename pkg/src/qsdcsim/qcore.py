"""Dense state-vector engine with labeled qubits.

The register is the only carrier of quantum state in the simulator.  Qubits
are identified by (owner, index) labels rather than positions, so protocol
code can hand particles around between parties without tracking where they
sit in the amplitude vector.  Amplitude index bit k corresponds to the k-th
qubit in the register's ordered list (big-endian: leftmost qubit is the most
significant bit).  States are compared up to global phase; relative signs
inside superpositions are preserved.

All floating-point comparisons use an absolute tolerance of 1e-9.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

ATOL = 1e-9
DEFAULT_MAX_QUBITS = 24


class RegisterError(ValueError):
    """Raised on malformed register operations (unknown qubit, bad sizes)."""


class QubitAllocator:
    """Hands out session-unique qubit labels per owner."""

    def __init__(self) -> None:
        self._next: dict[str, int] = {}

    def new(self, owner: str) -> "QubitId":
        idx = self._next.get(owner, 0)
        self._next[owner] = idx + 1
        return QubitId(owner, idx)


@dataclass(frozen=True)
class QubitId:
    """Label of one qubit: which party owns it and its ordinal for that party."""

    owner: str
    index: int

    def __repr__(self) -> str:
        return f"{self.owner}#{self.index}"


class PauliOp(Enum):
    """Single-qubit encoding alphabet.  Y is the real antisymmetric form
    |0><1| - |1><0| (i.e. i*sigma_y), so all matrices are real."""

    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"

    @property
    def matrix(self) -> np.ndarray:
        return _PAULI[self.value]


_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, 1], [-1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
_KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


def _controlled_x(control_basis: tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    """CNOT whose control distinguishes the two given orthonormal states.

    Basis order on the 4-dim space is |control, target> with the control as
    the most significant bit.
    """
    b0, b1 = control_basis
    p0 = np.outer(b0, b0.conj())
    p1 = np.outer(b1, b1.conj())
    return np.kron(p0, _PAULI["I"]) + np.kron(p1, _PAULI["X"])


class ControlledOp(Enum):
    """The two authentication gates: a CNOT controlled in the Z basis (C0)
    or in the X basis (C1).  Both are unitary and self-inverse."""

    C0 = "C0"
    C1 = "C1"

    @property
    def matrix(self) -> np.ndarray:
        return _CONTROLLED[self.value]


_CONTROLLED = {
    "C0": _controlled_x((np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex))),
    "C1": _controlled_x((_KET_PLUS, _KET_MINUS)),
}


class XOutcome(Enum):
    """X-basis measurement result: the |+> or |-> eigenstate."""

    PLUS = "+"
    MINUS = "-"

    @property
    def sign(self) -> int:
        return 1 if self is XOutcome.PLUS else -1


@dataclass(frozen=True)
class GhzOutcome:
    """Projective outcome in the entangled basis (|x> +/- |xbar>)/sqrt(2).

    ``pattern`` is the bit string x with x[0] = 0, written in the order the
    measured qubits were listed; ``sign`` is +1 or -1.  For two qubits this
    is the Bell basis, for N >= 3 the N-particle GHZ basis.
    """

    pattern: str
    sign: int

    def __post_init__(self) -> None:
        if not self.pattern or self.pattern[0] != "0":
            raise RegisterError(f"pattern must start with 0, got {self.pattern!r}")
        if self.sign not in (1, -1):
            raise RegisterError(f"sign must be +1 or -1, got {self.sign!r}")

    @property
    def label(self) -> str:
        """Conventional glyph name (Phi/psi for pairs, Psi/psi/phi/vphi for
        triples), falling back to pattern+sign for larger registers."""
        glyph = _GLYPHS.get(self.pattern, self.pattern)
        return glyph + ("+" if self.sign > 0 else "-")


_GLYPHS = {
    "00": "Phi",
    "01": "psi",
    "000": "Psi",
    "011": "psi",
    "010": "phi",
    "001": "vphi",
}


class BellOutcome(Enum):
    """The four Bell states of a qubit pair."""

    PHI_PLUS = ("00", 1)
    PHI_MINUS = ("00", -1)
    PSI_PLUS = ("01", 1)
    PSI_MINUS = ("01", -1)

    @property
    def pattern(self) -> str:
        return self.value[0]

    @property
    def sign(self) -> int:
        return self.value[1]

    @property
    def label(self) -> str:
        return GhzOutcome(*self.value).label

    @classmethod
    def from_ghz(cls, outcome: GhzOutcome) -> "BellOutcome":
        for member in cls:
            if member.value == (outcome.pattern, outcome.sign):
                return member
        raise RegisterError(f"not a two-qubit outcome: {outcome}")

    def as_ghz(self) -> GhzOutcome:
        return GhzOutcome(*self.value)


class StateRegister:
    """Complex amplitude vector over an ordered list of labeled qubits.

    Operations mutate the register in place and return it, so protocol code
    can chain calls.  A register is single-owner: never share one between
    concurrently running sessions.
    """

    def __init__(self, qubits: Sequence[QubitId], amps: np.ndarray,
                 max_qubits: int = DEFAULT_MAX_QUBITS) -> None:
        qubits = list(qubits)
        if len(set(qubits)) != len(qubits):
            raise RegisterError("duplicate qubit ids in register")
        if len(qubits) > max_qubits:
            raise RegisterError(f"register exceeds {max_qubits} qubits")
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        if amps.shape != (2 ** len(qubits),):
            raise RegisterError(
                f"expected {2 ** len(qubits)} amplitudes, got {amps.shape[0]}")
        self.qubits = qubits
        self.amps = amps
        self.max_qubits = max_qubits
        self._check_norm()

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def computational(cls, qubits: Sequence[QubitId], bits: str) -> "StateRegister":
        """Product state |bits> over the given qubits."""
        if len(bits) != len(qubits):
            raise RegisterError("bit string length must match qubit count")
        amps = np.zeros(2 ** len(qubits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(qubits, amps)

    def copy(self) -> "StateRegister":
        return StateRegister(list(self.qubits), self.amps.copy(), self.max_qubits)

    # ------------------------------------------------------------------
    # bookkeeping

    def __contains__(self, q: QubitId) -> bool:
        return q in self.qubits

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    def position(self, q: QubitId) -> int:
        try:
            return self.qubits.index(q)
        except ValueError:
            raise RegisterError(f"qubit {q!r} not in register") from None

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def _check_norm(self) -> None:
        if abs(np.vdot(self.amps, self.amps).real - 1.0) > ATOL:
            raise RegisterError(f"register norm drifted: |amps|^2 = {self.norm()**2}")

    def overlap(self, other: "StateRegister | np.ndarray") -> complex:
        """Inner product <other|self>; ``other`` must use the same qubit order."""
        vec = other.amps if isinstance(other, StateRegister) else np.asarray(other)
        return complex(np.vdot(vec, self.amps))

    def fidelity(self, other: "StateRegister | np.ndarray") -> float:
        """|<other|self>|^2, i.e. agreement up to global phase."""
        return abs(self.overlap(other)) ** 2

    # ------------------------------------------------------------------
    # unitary application

    @staticmethod
    def _inverse(perm: Sequence[int]) -> list[int]:
        inv = [0] * len(perm)
        for i, p in enumerate(perm):
            inv[p] = i
        return inv

    def _apply_matrix(self, mat: np.ndarray, positions: Sequence[int]) -> None:
        n = self.n_qubits
        k = len(positions)
        rest = [i for i in range(n) if i not in positions]
        perm = list(positions) + rest
        psi = self.amps.reshape((2,) * n).transpose(perm).reshape(2 ** k, -1)
        psi = mat @ psi
        self.amps = np.ascontiguousarray(
            psi.reshape((2,) * n).transpose(self._inverse(perm))).reshape(-1)

    def apply_single(self, q: QubitId, mat: np.ndarray) -> "StateRegister":
        self._apply_matrix(np.asarray(mat, dtype=complex), [self.position(q)])
        self._check_norm()
        return self

    def apply_pauli(self, q: QubitId, op: PauliOp) -> "StateRegister":
        if op is PauliOp.I:
            self.position(q)  # still faults on unknown qubit
            return self
        return self.apply_single(q, op.matrix)

    def apply_pair(self, control: QubitId, target: QubitId,
                   mat4: np.ndarray) -> "StateRegister":
        """Apply a 4x4 unitary on (control, target), control as the high bit."""
        if control == target:
            raise RegisterError("control and target must differ")
        self._apply_matrix(np.asarray(mat4, dtype=complex),
                           [self.position(control), self.position(target)])
        self._check_norm()
        return self

    def apply_controlled(self, control: QubitId, target: QubitId,
                         op: ControlledOp) -> "StateRegister":
        return self.apply_pair(control, target, op.matrix)

    def attach_map(self, q: QubitId, ancilla: QubitId,
                   images: tuple[np.ndarray, np.ndarray]) -> "StateRegister":
        """Adjoin a fresh ancilla and apply a basis map on (q, ancilla).

        ``images`` gives the two 4-dim image vectors of |0_q, 0_anc> and
        |1_q, 0_anc| in (q, ancilla) order.  The map is applied formally;
        if the result is not normalized (the images do not describe a
        physical interaction for this state) the register faults.
        """
        if ancilla in self.qubits:
            raise RegisterError(f"ancilla {ancilla!r} already in register")
        img0, img1 = (np.asarray(v, dtype=complex).reshape(4) for v in images)
        self.qubits = self.qubits + [ancilla]
        grown = np.zeros(2 * self.amps.size, dtype=complex)
        grown[0::2] = self.amps
        self.amps = grown
        mat = np.zeros((4, 4), dtype=complex)
        mat[:, 0] = img0
        mat[:, 2] = img1
        self._apply_matrix(mat, [self.position(q), self.position(ancilla)])
        self._check_norm()
        return self

    # ------------------------------------------------------------------
    # measurement

    def _subset_view(self, positions: Sequence[int]) -> tuple[np.ndarray, list[int]]:
        """Amplitudes as a (2^k, 2^rest) matrix with the subset axes first."""
        n = self.n_qubits
        rest = [i for i in range(n) if i not in positions]
        perm = list(positions) + rest
        psi = self.amps.reshape((2,) * n).transpose(perm).reshape(2 ** len(positions), -1)
        return psi, perm

    def _write_back(self, psi: np.ndarray, perm: Sequence[int]) -> None:
        self.amps = np.ascontiguousarray(
            psi.reshape((2,) * self.n_qubits).transpose(self._inverse(perm))).reshape(-1)

    @staticmethod
    def _sample(probs: Sequence[float], rng: np.random.Generator) -> int:
        total = float(np.sum(probs))
        if abs(total - 1.0) > ATOL:
            raise RegisterError(f"outcome probabilities sum to {total}")
        r = rng.random() * total
        acc = 0.0
        for i, p in enumerate(probs):
            acc += p
            if r < acc:
                return i
        return len(probs) - 1

    def measure_z(self, q: QubitId, rng: np.random.Generator) -> int:
        """Born-rule Z measurement; collapses and renormalizes in place."""
        psi, perm = self._subset_view([self.position(q)])
        probs = [float(np.vdot(psi[b], psi[b]).real) for b in (0, 1)]
        bit = self._sample(probs, rng)
        out = np.zeros_like(psi)
        out[bit] = psi[bit] / np.sqrt(probs[bit])
        self._write_back(out, perm)
        return bit

    def measure_x(self, q: QubitId, rng: np.random.Generator) -> XOutcome:
        """Born-rule measurement in the {|+>, |->} basis."""
        psi, perm = self._subset_view([self.position(q)])
        branches = [(psi[0] + psi[1]) / np.sqrt(2), (psi[0] - psi[1]) / np.sqrt(2)]
        probs = [float(np.vdot(v, v).real) for v in branches]
        pick = self._sample(probs, rng)
        v = branches[pick] / np.sqrt(probs[pick])
        sign = 1 if pick == 0 else -1
        out = np.empty_like(psi)
        out[0] = v / np.sqrt(2)
        out[1] = sign * v / np.sqrt(2)
        self._write_back(out, perm)
        return XOutcome.PLUS if pick == 0 else XOutcome.MINUS

    def measure_ghz(self, qs: Sequence[QubitId], rng: np.random.Generator) -> GhzOutcome:
        """Projective measurement in the complete entangled basis
        {(|x> +/- |xbar>)/sqrt(2) : x[0] = 0} over the listed qubits."""
        if len(qs) < 2:
            raise RegisterError("GHZ measurement needs at least two qubits")
        positions = [self.position(q) for q in qs]
        if len(set(positions)) != len(positions):
            raise RegisterError("repeated qubit in GHZ measurement")
        k = len(qs)
        psi, perm = self._subset_view(positions)
        mask = (1 << k) - 1
        outcomes: list[tuple[int, int]] = []
        probs: list[float] = []
        branches: list[np.ndarray] = []
        for x in range(1 << (k - 1)):
            xbar = x ^ mask
            for sign in (1, -1):
                v = (psi[x] + sign * psi[xbar]) / np.sqrt(2)
                outcomes.append((x, sign))
                probs.append(float(np.vdot(v, v).real))
                branches.append(v)
        pick = self._sample(probs, rng)
        x, sign = outcomes[pick]
        v = branches[pick] / np.sqrt(probs[pick])
        out = np.zeros_like(psi)
        out[x] = v / np.sqrt(2)
        out[x ^ mask] = sign * v / np.sqrt(2)
        self._write_back(out, perm)
        return GhzOutcome(format(x, f"0{k}b"), sign)

    def measure_bell(self, q1: QubitId, q2: QubitId,
                     rng: np.random.Generator) -> BellOutcome:
        """Projective measurement of a pair onto the four Bell states."""
        return BellOutcome.from_ghz(self.measure_ghz([q1, q2], rng))

    # ------------------------------------------------------------------
    # analysis helpers

    def ghz_x_joint_distribution(self, qs: Sequence[QubitId],
                                 pub: QubitId) -> dict[tuple[str, int, str], float]:
        """Exact joint outcome probabilities for an entangled-basis measurement
        of ``qs`` together with an X measurement of ``pub``.

        Keys are (pattern, sign, '+'/'-').  Used to generate decode tables
        without sampling.
        """
        positions = [self.position(q) for q in qs] + [self.position(pub)]
        if len(set(positions)) != len(positions):
            raise RegisterError("published qubit overlaps measured set")
        k = len(qs)
        psi, _ = self._subset_view(positions)
        psi = psi.reshape(1 << k, 2, -1)
        plus = (psi[:, 0, :] + psi[:, 1, :]) / np.sqrt(2)
        minus = (psi[:, 0, :] - psi[:, 1, :]) / np.sqrt(2)
        mask = (1 << k) - 1
        dist: dict[tuple[str, int, str], float] = {}
        for x in range(1 << (k - 1)):
            xbar = x ^ mask
            pattern = format(x, f"0{k}b")
            for sign in (1, -1):
                for pub_char, block in (("+", plus), ("-", minus)):
                    v = (block[x] + sign * block[xbar]) / np.sqrt(2)
                    dist[(pattern, sign, pub_char)] = float(np.vdot(v, v).real)
        return dist

    def remove_qubit(self, q: QubitId) -> "StateRegister":
        """Drop a qubit that is in a definite computational state (e.g. just
        measured in Z).  Faults if the qubit is still correlated."""
        pos = self.position(q)
        psi, _ = self._subset_view([pos])
        weights = [float(np.vdot(psi[b], psi[b]).real) for b in (0, 1)]
        level = int(weights[1] > weights[0])
        if weights[1 - level] > ATOL:
            raise RegisterError(f"qubit {q!r} is not separable in Z")
        kept = psi[level] / np.sqrt(weights[level])
        order = [i for i in range(self.n_qubits) if i != pos]
        self.qubits = [self.qubits[i] for i in order]
        # psi rows are already ordered (q, rest-in-original-order)
        self.amps = np.ascontiguousarray(kept)
        self._check_norm()
        return self

    def reduced_density(self, keep: Sequence[QubitId]) -> np.ndarray:
        """Reduced density matrix of the listed qubits (partial trace of the
        rest), in the order given."""
        positions = [self.position(q) for q in keep]
        psi, _ = self._subset_view(positions)
        return psi @ psi.conj().T


def make_bell(ids: Sequence[QubitId], which: BellOutcome = BellOutcome.PHI_PLUS,
              ) -> StateRegister:
    """Fresh two-qubit register in the selected Bell state."""
    if len(ids) != 2:
        raise RegisterError("a Bell pair needs exactly two qubits")
    amps = np.zeros(4, dtype=complex)
    x = int(which.pattern, 2)
    amps[x] = 1 / np.sqrt(2)
    amps[x ^ 0b11] = which.sign / np.sqrt(2)
    return StateRegister(ids, amps)


def make_ghz(ids: Sequence[QubitId]) -> StateRegister:
    """Fresh register in (|0...0> + |1...1>)/sqrt(2) over the given qubits."""
    if len(ids) < 2:
        raise RegisterError("a GHZ state needs at least two qubits")
    amps = np.zeros(2 ** len(ids), dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return StateRegister(ids, amps)


def compose(a: StateRegister, b: StateRegister) -> StateRegister:
    """Tensor product of two registers; qubit order is a's then b's."""
    if set(a.qubits) & set(b.qubits):
        raise RegisterError("registers share qubit ids")
    amps = np.multiply.outer(a.amps, b.amps).reshape(-1)
    return StateRegister(list(a.qubits) + list(b.qubits), amps,
                         max(a.max_qubits, b.max_qubits))


def ghz_vector(n: int) -> np.ndarray:
    """Plain amplitude vector of the n-qubit GHZ state."""
    amps = np.zeros(2 ** n, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return amps
