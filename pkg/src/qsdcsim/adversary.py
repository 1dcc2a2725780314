"""Attack models and the closed-form security numbers they are checked
against.

Four adversaries are modeled:

* masquerade -- an in-the-middle party on the server -> user authentication
  leg entangles an ancilla with the travelling particle and returns the
  ancilla in the user's place.  Detection per round follows the published
  per-key-value probabilities; averaged over uniform keys it is exactly 1/2
  for every parameter choice.
* one-way probe -- a Z measurement of the returning check particle.  It is
  never detected, and the Holevo quantity of the particle's reduced states
  is zero: the probe learns nothing about the key.
* two-way probe -- entangling Z-basis probes on both legs, parameterized by
  the probe-state overlap angle theta_eps.  The minimum detection
  probability, the probe's joint information, the key-estimation
  probability, and the key-retrieval probability all have closed forms,
  reproduced here and emitted as CSV curves.
* GHZ intercept -- a universal map on one sender's encoded qubit in flight.
  A recording (measurement-type) interception inflicts a symbol error rate
  of exactly 1/2 at the honest receiver while its Pauli guesses stay at
  chance (it cannot separate I from Z, nor X from Y).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .auth import round_gate
from .channels import AttackModel, ProtocolError
from .comms import Mode, decode_ops, decode_symbol, encode_symbol, symbol_width
from .qcore import (
    ControlledOp,
    PauliOp,
    QubitAllocator,
    QubitId,
    StateRegister,
    compose,
    make_bell,
    make_ghz,
)

ATOL = 1e-9


def _norm2(*values: complex) -> float:
    return float(sum(abs(v) ** 2 for v in values))


# ======================================================================
# masquerade attack (authentication forward leg)

@dataclass
class MasqueradeParams:
    """Amplitudes of the universal two-qubit map the impostor applies to the
    travelling particle u and a fresh ancilla a.

    Row 0 is the image of |0_u>, row 1 of |1_u>, each over the basis
    (|0_u 0_a>, |0_u 1_a>, |1_u 0_a>, |1_u 1_a>); each row must be
    normalized.
    """

    alpha0: complex
    beta0: complex
    gamma0: complex
    delta0: complex
    alpha1: complex
    beta1: complex
    gamma1: complex
    delta1: complex

    def validate(self) -> "MasqueradeParams":
        for row in (self.row0, self.row1):
            if abs(_norm2(*row) - 1.0) > ATOL:
                raise ProtocolError("masquerade rows must be normalized")
        return self

    @property
    def row0(self) -> tuple[complex, complex, complex, complex]:
        return (self.alpha0, self.beta0, self.gamma0, self.delta0)

    @property
    def row1(self) -> tuple[complex, complex, complex, complex]:
        return (self.alpha1, self.beta1, self.gamma1, self.delta1)

    def detection_probability(self, key_pair: tuple[int, int]) -> float:
        """Per-round detection probability for one key value.

        Rounds whose expected check bit is 0 (keys 00 and 11) are flagged
        with probability (|alpha1|^2+|gamma1|^2+|beta0|^2+|delta0|^2)/2;
        rounds expecting 1 (keys 01 and 10) with the complementary
        combination.
        """
        expected = key_pair[0] ^ key_pair[1]
        if expected == 0:
            return 0.5 * _norm2(self.alpha1, self.gamma1, self.beta0, self.delta0)
        return 0.5 * _norm2(self.alpha0, self.gamma0, self.beta1, self.delta1)

    def total_detection(self) -> float:
        """Detection probability averaged over the four key values; equals
        1/2 for every normalized parameter choice."""
        return sum(self.detection_probability(kp)
                   for kp in ((0, 0), (0, 1), (1, 0), (1, 1))) / 4.0

    @classmethod
    def identity(cls) -> "MasqueradeParams":
        return cls(1, 0, 0, 0, 0, 0, 1, 0)

    @classmethod
    def swap_like(cls) -> "MasqueradeParams":
        return cls(0, 0, 1, 0, 0, 1, 0, 0)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "MasqueradeParams":
        rows = rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4))
        rows /= np.linalg.norm(rows, axis=1, keepdims=True)
        return cls(*rows[0], *rows[1])


class MasqueradeAttack(AttackModel):
    """In-the-middle impostor: entangles its ancilla with the in-flight
    particle, keeps the particle, and returns the ancilla as the check."""

    kind = "masquerade"
    leg = "auth"

    def __init__(self, params: MasqueradeParams) -> None:
        self.params = params.validate()
        self._alloc = QubitAllocator()

    def on_auth_forward(self, reg: StateRegister, server_q: QubitId, u: QubitId,
                        rng: np.random.Generator) -> Optional[QubitId]:
        ancilla = self._alloc.new("attacker")
        reg.attach_map(u, ancilla, (np.array(self.params.row0),
                                    np.array(self.params.row1)))
        return ancilla


def masquerade_tap(params: MasqueradeParams) -> MasqueradeAttack:
    """Channel tap for the impersonation attack; faults on bad amplitudes."""
    return MasqueradeAttack(params)


def masquerade_check_distribution(params: MasqueradeParams) -> float:
    """Exact probability that the returned ancilla measures 1 after the
    server's decode, from the state-vector path the tap itself uses."""
    alloc = QubitAllocator()
    q, u = alloc.new("server"), alloc.new("u1")
    reg = make_bell([q, u])
    tap = MasqueradeAttack(params)
    check = tap.on_auth_forward(reg, q, u, np.random.default_rng(0))
    reg.apply_controlled(q, check, ControlledOp.C0)
    rho = reg.reduced_density([check])
    return float(rho[1, 1].real)


@dataclass
class MasqueradeStats:
    rounds: int
    rejected: int
    per_key: dict[tuple[int, int], tuple[int, int]]  # key -> (rounds, rejects)

    @property
    def rejection_rate(self) -> float:
        return self.rejected / self.rounds if self.rounds else 0.0


def masquerade_monte_carlo(params: MasqueradeParams, rounds: int,
                           rng: np.random.Generator) -> MasqueradeStats:
    """Monte Carlo over authentication rounds with uniformly random key
    pairs.  The pre-measurement state is key-independent, so it is prepared
    once and each round draws a key and a Born-rule measurement."""
    p1 = masquerade_check_distribution(params)
    keys = rng.integers(0, 2, size=(rounds, 2))
    measured = (rng.random(rounds) < p1).astype(int)
    expected = keys[:, 0] ^ keys[:, 1]
    rejects = measured != expected
    per_key: dict[tuple[int, int], tuple[int, int]] = {}
    for k1 in (0, 1):
        for k2 in (0, 1):
            mask = (keys[:, 0] == k1) & (keys[:, 1] == k2)
            per_key[(k1, k2)] = (int(mask.sum()), int(rejects[mask].sum()))
    return MasqueradeStats(rounds, int(rejects.sum()), per_key)


# ======================================================================
# one-way probe (authentication return leg)

class OneWayProbe(AttackModel):
    """Measures the returning check particle in Z.  Undetectable, and the
    Holevo bound says the observed bits carry no key information."""

    kind = "oneway"
    leg = "auth"

    def __init__(self) -> None:
        self.observed: list[int] = []

    def on_auth_return(self, reg: StateRegister, n: QubitId,
                       rng: np.random.Generator) -> None:
        self.observed.append(reg.measure_z(n, rng))


@dataclass
class HolevoReport:
    chi_bits: float
    mixture_eigenvalues: np.ndarray
    per_key_eigenvalues: dict[str, np.ndarray]


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-Tr(rho log2 rho) from the eigenvalue spectrum."""
    eigs = np.linalg.eigvalsh(rho)
    eigs = eigs[eigs > 1e-15]
    return float(-np.sum(eigs * np.log2(eigs)))


def _transit_state(key_pair: tuple[int, int]) -> StateRegister:
    """Joint (q, u, n) state while the check particle travels back."""
    alloc = QubitAllocator()
    q, u, n = alloc.new("server"), alloc.new("u1"), alloc.new("u1")
    k1, k2 = key_pair
    reg = compose(make_bell([q, u]),
                  StateRegister.computational([n], str(k1 ^ k2)))
    reg.apply_controlled(u, n, round_gate(k1))
    return reg


def holevo_one_way() -> HolevoReport:
    """Holevo quantity of the returning check particle over the four key
    values: every reduced state is I/2, so chi vanishes."""
    keys = [(0, 0), (0, 1), (1, 0), (1, 1)]
    per_key: dict[str, np.ndarray] = {}
    rhos = []
    for kp in keys:
        reg = _transit_state(kp)
        rho = reg.reduced_density([reg.qubits[2]])
        rhos.append(rho)
        per_key[f"{kp[0]}{kp[1]}"] = np.linalg.eigvalsh(rho)
    mixture = sum(rhos) / len(rhos)
    chi = von_neumann_entropy(mixture) - sum(
        von_neumann_entropy(r) for r in rhos) / len(rhos)
    return HolevoReport(chi, np.linalg.eigvalsh(mixture), per_key)


# ======================================================================
# two-way probe (both authentication legs)

@dataclass
class TwoWayParams:
    """Probe configuration: overlap angle of the recording states, the
    guess-correlation fraction, and the number of key bits at stake."""

    theta_eps: float
    correlation: float = 1.0
    key_bits: int = 16

    def validate(self) -> "TwoWayParams":
        if not 0.0 <= self.theta_eps <= np.pi:
            raise ProtocolError("theta_eps must lie in [0, pi]")
        if not 0.0 <= self.correlation <= 1.0:
            raise ProtocolError("correlation must lie in [0, 1]")
        if self.key_bits < 2 or self.key_bits % 2:
            raise ProtocolError("key_bits must be even and >= 2")
        return self

    @property
    def total(self) -> float:
        return two_way_detection(self.theta_eps)


def two_way_detection(theta_eps: float) -> float:
    """Minimum probability per round of flagging the two-way probe:
    (1 - cos theta)/4, from 0 at theta=0 to 1/2 at theta=pi."""
    if not 0.0 <= theta_eps <= np.pi:
        raise ProtocolError("theta_eps must lie in [0, pi]")
    return 0.25 * (1.0 - float(np.cos(theta_eps)))


def _sin_from_total(total: float) -> float:
    if not 0.0 <= total <= 0.5:
        raise ProtocolError("detection total must lie in [0, 0.5]")
    return float(np.sqrt(max(0.0, 8.0 * total - 16.0 * total ** 2)))


def two_way_joint_info(total: float) -> float:
    """Joint information (bits) the probe gains at detection level
    ``total``; symmetric about 0.25 where it peaks at 0.5 bit."""
    s = _sin_from_total(total)
    info = 0.0
    for term in (1.0 + s, 1.0 - s):
        if term > 0.0:
            info += term * np.log2(term)
    return 0.25 * info


def estimation_prob(theta_eps: float, correlation: float) -> float:
    """Key-estimation probability (sin theta (3P - 1) + 2)/8; independent of
    theta at P = 1/3 and maximal at P = 1."""
    if not 0.0 <= correlation <= 1.0:
        raise ProtocolError("correlation must lie in [0, 1]")
    if not 0.0 <= theta_eps <= np.pi:
        raise ProtocolError("theta_eps must lie in [0, pi]")
    return (np.sin(theta_eps) * (3.0 * correlation - 1.0) + 2.0) / 8.0


def estimation_prob_mixture(theta_eps: float, correlation: float) -> float:
    """Branch-weighted form of the estimation probability,
    (1 + sin theta * P)/4.  Coincides with :func:`estimation_prob` at
    P = 1 and at theta = 0; elsewhere the two published forms disagree and
    the simplified form is taken as authoritative."""
    if not 0.0 <= correlation <= 1.0:
        raise ProtocolError("correlation must lie in [0, 1]")
    s = float(np.sin(theta_eps))
    plus = 0.5 * (1.0 + s) * (0.5 * correlation + 0.25 * (1.0 - correlation))
    minus = 0.5 * (1.0 - s) * 0.25 * (1.0 - correlation)
    return plus + minus


def p_e_max(total: float) -> float:
    """Maximum key-estimation probability at detection level ``total``:
    (sqrt(8 T - 16 T^2) + 1)/4."""
    return 0.25 * (_sin_from_total(total) + 1.0)


def p_e_retrieve(p_e_m: float, total: float, key_bits: int) -> float:
    """Probability of retrieving all key bits: [p_e_m (1 - total)]^(N/2).

    The two factors sweep independently (the security curves explore the
    full square); chain through :func:`p_e_max` for the physical curve.
    """
    if key_bits < 2 or key_bits % 2:
        raise ProtocolError("key_bits must be even and >= 2")
    if not 0.0 <= p_e_m <= 1.0 or not 0.0 <= total <= 1.0:
        raise ProtocolError("factors must lie in [0, 1]")
    return float((p_e_m * (1.0 - total)) ** (key_bits // 2))


def p_e_retrieve_physical(total: float, key_bits: int) -> float:
    """Retrieval probability with the estimation factor at its physical
    maximum for the given detection level."""
    return p_e_retrieve(p_e_max(total), total, key_bits)


def _probe_images(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Recording map |z> -> |z>|e_z> with <e_0|e_1> = cos theta."""
    e0 = np.array([1.0, 0.0], dtype=complex)
    e1 = np.array([np.cos(theta), np.sin(theta)], dtype=complex)
    img0 = np.kron(np.array([1, 0], dtype=complex), e0)
    img1 = np.kron(np.array([0, 1], dtype=complex), e1)
    return img0, img1


class TwoWayAttack(AttackModel):
    """Representative state-level two-way probe: Z-basis recording maps on
    both legs with overlap angle theta_eps.  Its Monte Carlo detection rate
    matches the closed-form minimum (1 - cos theta)/4."""

    kind = "twoway"
    leg = "auth"

    def __init__(self, params: TwoWayParams) -> None:
        self.params = params.validate()
        self._alloc = QubitAllocator()

    def on_auth_forward(self, reg: StateRegister, server_q: QubitId, u: QubitId,
                        rng: np.random.Generator) -> Optional[QubitId]:
        reg.attach_map(u, self._alloc.new("attacker"),
                       _probe_images(self.params.theta_eps))
        return None

    def on_auth_return(self, reg: StateRegister, n: QubitId,
                       rng: np.random.Generator) -> None:
        reg.attach_map(n, self._alloc.new("attacker"),
                       _probe_images(self.params.theta_eps))


def two_way_tap(params: TwoWayParams) -> TwoWayAttack:
    return TwoWayAttack(params)


# ======================================================================
# GHZ intercept attack (message leg)

def _state2(vec) -> np.ndarray:
    arr = np.asarray(vec, dtype=complex).reshape(2)
    if abs(np.vdot(arr, arr).real - 1.0) > ATOL:
        raise ProtocolError("ancilla recording states must be normalized")
    return arr


@dataclass
class InterceptParams:
    """Universal map on one in-flight GHZ qubit plus a qubit ancilla:
    |0>|A> -> alpha |0>|e00> + beta |1>|e01>,
    |1>|A> -> beta_p |0>|e10> + alpha_p |1>|e11>,
    with |alpha|^2 + |beta|^2 = |alpha_p|^2 + |beta_p|^2 = 1."""

    alpha: complex
    beta: complex
    alpha_p: complex
    beta_p: complex
    e00: np.ndarray = field(default_factory=lambda: np.array([1, 0], dtype=complex))
    e01: np.ndarray = field(default_factory=lambda: np.array([1, 0], dtype=complex))
    e10: np.ndarray = field(default_factory=lambda: np.array([1, 0], dtype=complex))
    e11: np.ndarray = field(default_factory=lambda: np.array([1, 0], dtype=complex))

    def validate(self) -> "InterceptParams":
        if abs(_norm2(self.alpha, self.beta) - 1.0) > ATOL:
            raise ProtocolError("|alpha|^2 + |beta|^2 must equal 1")
        if abs(_norm2(self.alpha_p, self.beta_p) - 1.0) > ATOL:
            raise ProtocolError("|alpha'|^2 + |beta'|^2 must equal 1")
        for name in ("e00", "e01", "e10", "e11"):
            setattr(self, name, _state2(getattr(self, name)))
        return self

    def images(self) -> tuple[np.ndarray, np.ndarray]:
        zero = np.array([1, 0], dtype=complex)
        one = np.array([0, 1], dtype=complex)
        img0 = self.alpha * np.kron(zero, self.e00) + self.beta * np.kron(one, self.e01)
        img1 = self.beta_p * np.kron(zero, self.e10) + self.alpha_p * np.kron(one, self.e11)
        return img0, img1

    @classmethod
    def trivial(cls) -> "InterceptParams":
        """Product ancilla: no which-path record, no disturbance."""
        return cls(1, 0, 1, 0)

    @classmethod
    def random_recording(cls, rng: np.random.Generator) -> "InterceptParams":
        """Nontrivial measurement-type interception: the ancilla records the
        qubit's Z value in a random orthonormal basis, with random phases.
        Any member of this family inflicts a symbol error rate of 1/2."""
        gauss = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        basis, _ = np.linalg.qr(gauss)
        phase0, phase1 = np.exp(2j * np.pi * rng.random(2))
        return cls(phase0, 0, phase1, 0,
                   e00=basis[:, 0], e01=basis[:, 0],
                   e10=basis[:, 1], e11=basis[:, 1])


class InterceptAttack(AttackModel):
    """Tap on one sender's encoded qubit: applies the universal map, then
    measures its ancilla in Z and guesses the sender's Pauli."""

    kind = "intercept"
    leg = "message"

    def __init__(self, params: InterceptParams) -> None:
        self.params = params.validate()
        self._alloc = QubitAllocator()
        self.observed: list[int] = []
        self.guesses: list[str] = []

    def on_message_qubit(self, reg: StateRegister, qubit: QubitId,
                         rng: np.random.Generator) -> None:
        ancilla = self._alloc.new("attacker")
        reg.attach_map(qubit, ancilla, self.params.images())
        bit = reg.measure_z(ancilla, rng)
        reg.remove_qubit(ancilla)
        self.observed.append(bit)
        self.guesses.append("I" if bit == 0 else "X")


def ghz_intercept_tap(params: InterceptParams) -> InterceptAttack:
    return InterceptAttack(params)


@dataclass
class InterceptStats:
    symbols: int
    symbol_errors: int
    records: list[tuple[int, str]]  # (ancilla bit, first sender's Pauli)

    @property
    def error_rate(self) -> float:
        return self.symbol_errors / self.symbols if self.symbols else 0.0

    def best_guess_accuracy(self) -> float:
        """Accuracy of the best deterministic ancilla-bit -> Pauli strategy,
        chosen after the fact (an upper bound on any fixed strategy)."""
        if not self.records:
            return 0.0
        counts: dict[tuple[int, str], int] = {}
        for bit, op in self.records:
            counts[(bit, op)] = counts.get((bit, op), 0) + 1
        hits = 0
        for bit in (0, 1):
            by_op = [counts.get((bit, op.value), 0) for op in PauliOp]
            hits += max(by_op) if by_op else 0
        return hits / len(self.records)


def intercept_monte_carlo(n_users: int, mode: Mode | str, params: InterceptParams,
                          symbols: int, rng: np.random.Generator) -> InterceptStats:
    """Symbol error rate at the honest receiver with the tap on u1's qubit.

    Uses fresh GHZ allocations directly (no authentication phase) so large
    symbol counts stay fast; the full-session path exercises the same tap.
    """
    mode = Mode(mode)
    width = symbol_width(n_users)
    users = [QubitId(f"u{k + 1}", 0) for k in range(n_users)]
    server = QubitId("server", 0)
    senders, receiver = users[:-1], users[-1]
    tap = InterceptAttack(params)
    errors = 0
    records: list[tuple[int, str]] = []
    for _ in range(symbols):
        bits = "".join(str(b) for b in rng.integers(0, 2, size=width))
        reg = make_ghz(users + [server])
        ops = encode_symbol(bits, n_users)
        for sender, op in zip(senders, ops):
            reg.apply_pauli(sender, op)
        tap.on_message_qubit(reg, senders[0], rng)
        if mode is Mode.PARTIAL:
            measured, pub_q = senders + [receiver], server
        else:
            measured, pub_q = senders + [server], receiver
        outcome = reg.measure_ghz(measured, rng)
        pub = reg.measure_x(pub_q, rng)
        decoded = decode_symbol(mode, outcome, pub, n_users)
        if decoded != bits:
            errors += 1
        records.append((tap.observed[-1], ops[0].value))
    return InterceptStats(symbols, errors, records)


# ======================================================================
# security curves (CSV emitters)

CURVE_STEP = 0.005  # 0.5% steps

RETRIEVE_N_VALUES = (2, 4, 8, 16)
SWEEP_P_E_M = (0.125, 0.25, 0.375, 0.5)
SWEEP_TOTAL = (0.0, 0.125, 0.25, 0.5, 0.625, 0.75, 0.875)


def _total_grid() -> np.ndarray:
    return np.round(np.arange(0.0, 0.5 + CURVE_STEP / 2, CURVE_STEP), 10)


def render_security_curves() -> dict[str, str]:
    """The four curve files as CSV text, keyed by file name."""
    out: dict[str, str] = {}

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["total", "joint_info_bits"])
    for t in _total_grid():
        writer.writerow([f"{t:.4f}", f"{two_way_joint_info(float(t)):.10g}"])
    out["fig2a.csv"] = buf.getvalue()

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["total", "p_e_max"])
    for t in _total_grid():
        writer.writerow([f"{t:.4f}", f"{p_e_max(float(t)):.10g}"])
    out["fig2b.csv"] = buf.getvalue()

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["total", "n", "p_e_retrieve"])
    for t in _total_grid():
        for n in RETRIEVE_N_VALUES:
            writer.writerow([f"{t:.4f}", n,
                             f"{p_e_retrieve_physical(float(t), n):.10g}"])
    out["fig2c.csv"] = buf.getvalue()

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["p_e_m", "total", "n", "p_e_retrieve"])
    for pem in SWEEP_P_E_M:
        for t in SWEEP_TOTAL:
            for n in RETRIEVE_N_VALUES:
                writer.writerow([f"{pem:.4f}", f"{t:.4f}", n,
                                 f"{p_e_retrieve(pem, t, n):.10g}"])
    out["fig2de.csv"] = buf.getvalue()
    return out


def write_security_curves(out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in render_security_curves().items():
        path = out_dir / name
        path.write_text(text)
        paths.append(path)
    return paths


@dataclass
class SpotCheck:
    name: str
    computed: float
    expected: float
    rel_tol: float
    passed: bool
    note: str = ""


def _spot(name: str, computed: float, expected: float,
          rel_tol: float = 0.01, note: str = "") -> SpotCheck:
    if expected == 0.0:
        passed = abs(computed) <= rel_tol
    else:
        passed = abs(computed - expected) / abs(expected) <= rel_tol
    return SpotCheck(name, computed, expected, rel_tol, passed, note)


def spot_value_summary() -> list[SpotCheck]:
    """Reference spot values for the security curves, with pass/fail at the
    documented tolerances (1% relative unless noted)."""
    checks = [
        _spot("joint_info(total=0.25)", two_way_joint_info(0.25), 0.5, 1e-9),
        _spot("p_e_retrieve_physical(total=0, n=16)",
              p_e_retrieve_physical(0.0, 16), 1.53e-5),
        _spot("p_e_retrieve_physical(total=0.125, n=16)",
              p_e_retrieve_physical(0.125, 16), 7.7e-4),
        _spot("p_e_retrieve_physical(total=0.25, n=16)",
              p_e_retrieve_physical(0.25, 16), 3.91e-4),
        _spot("p_e_retrieve_physical(total=0.5, n=16)",
              p_e_retrieve_physical(0.5, 16), 5.96e-8),
        _spot("p_e_retrieve_physical(total=0, n=2)",
              p_e_retrieve_physical(0.0, 2), 0.25),
        _spot("p_e_retrieve_physical(total=0.125, n=2)",
              p_e_retrieve_physical(0.125, 2), 4.08e-1),
        _spot("p_e_retrieve_physical(total=0.25, n=2)",
              p_e_retrieve_physical(0.25, 2), 0.375,
              note="reference figure repeats 4.08e-1 here; the closed form "
                   "gives 0.375 and is asserted instead (documented waiver)"),
        _spot("p_e_retrieve_physical(total=0.5, n=2)",
              p_e_retrieve_physical(0.5, 2), 0.125),
    ]
    for n, expected in zip(RETRIEVE_N_VALUES, (0.5, 0.25, 0.0625, 3.91e-3)):
        checks.append(_spot(f"p_e_retrieve(p_e_m=0.5, total=0, n={n})",
                            p_e_retrieve(0.5, 0.0, n), expected))
    checks.append(_spot("p_e_retrieve(p_e_m=0.125, total=0.5, n=16)",
                        p_e_retrieve(0.125, 0.5, 16), 2.32e-10))
    checks.append(_spot("p_e_retrieve(p_e_m=0.5, total=0.625, n=16)",
                        p_e_retrieve(0.5, 0.625, 16), 1.53e-6))
    checks.append(_spot("p_e_retrieve(p_e_m=0.125, total=0.875, n=8)",
                        p_e_retrieve(0.125, 0.875, 8), 5.96e-8))
    return checks
