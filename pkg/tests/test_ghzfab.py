import numpy as np
import pytest

from qsdcsim.channels import ProtocolError
from qsdcsim.comms import Session
from qsdcsim.ghzfab import allocate_ghz, extend_epr
from qsdcsim.qcore import QubitId, StateRegister, ghz_vector, make_bell


def pair(user, k=0):
    return make_bell([QubitId("server", k), QubitId(user, k)])


def reorder(reg: StateRegister, order: list[QubitId]) -> np.ndarray:
    """Amplitudes of ``reg`` rewritten in the given qubit order."""
    perm = [reg.position(q) for q in order]
    return reg.amps.reshape((2,) * reg.n_qubits).transpose(perm).reshape(-1)


def test_extend_two_pairs_to_three_party_ghz():
    rng = np.random.default_rng(0)
    iq = make_bell([QubitId("u1", 0), QubitId("server", 0)])
    qj = make_bell([QubitId("server", 1), QubitId("u2", 0)])
    out = extend_epr(iq, qj, (QubitId("server", 0), QubitId("server", 1)), rng)
    assert out.n_qubits == 3
    assert abs(out.fidelity(ghz_vector(3)) - 1) < 1e-9


def test_extension_is_deterministic_over_many_seeds():
    # the measured fusion ancilla is corrected, so every seed lands on GHZ
    for seed in range(40):
        rng = np.random.default_rng(seed)
        iq = make_bell([QubitId("u1", 0), QubitId("server", 0)])
        qj = make_bell([QubitId("server", 1), QubitId("u2", 0)])
        out = extend_epr(iq, qj, (QubitId("server", 0), QubitId("server", 1)), rng)
        assert abs(out.fidelity(ghz_vector(3)) - 1) < 1e-9


def test_chaining_a_third_pair_gives_four_party_ghz():
    from qsdcsim.ghzfab import _fuse

    rng = np.random.default_rng(1)
    iq = make_bell([QubitId("u1", 0), QubitId("server", 0)])
    qj = make_bell([QubitId("server", 1), QubitId("u2", 0)])
    ql = make_bell([QubitId("server", 2), QubitId("u3", 0)])
    three = extend_epr(iq, qj, (QubitId("server", 0), QubitId("server", 1)), rng)
    four = _fuse(three, QubitId("server", 0), ql,
                 QubitId("server", 2), QubitId("u3", 0), rng)
    assert four.n_qubits == 4
    assert abs(four.fidelity(ghz_vector(4)) - 1) < 1e-9


def test_single_pair_is_the_two_party_case():
    assert abs(pair("u1").fidelity(ghz_vector(2)) - 1) < 1e-9


def test_extension_order_independent_up_to_relabeling():
    from qsdcsim.ghzfab import _fuse

    def build(order, seed):
        rng = np.random.default_rng(seed)
        anchor = QubitId("server", 0)
        reg = make_bell([QubitId("u1", 0), anchor])
        pairs = {
            "u2": make_bell([QubitId("server", 1), QubitId("u2", 0)]),
            "u3": make_bell([QubitId("server", 2), QubitId("u3", 0)]),
        }
        serv = {"u2": QubitId("server", 1), "u3": QubitId("server", 2)}
        for user in order:
            reg = _fuse(reg, anchor, pairs[user], serv[user], QubitId(user, 0), rng)
        return reg

    canonical = [QubitId("u1", 0), QubitId("server", 0),
                 QubitId("u2", 0), QubitId("u3", 0)]
    a = reorder(build(["u2", "u3"], seed=5), canonical)
    b = reorder(build(["u3", "u2"], seed=6), canonical)
    assert np.allclose(a, b, atol=1e-9)


def test_extend_rejects_non_bell_inputs():
    rng = np.random.default_rng(2)
    not_bell = StateRegister.computational(
        [QubitId("u1", 0), QubitId("server", 0)], "00")
    good = make_bell([QubitId("server", 1), QubitId("u2", 0)])
    with pytest.raises(ProtocolError):
        extend_epr(not_bell, good, (QubitId("server", 0), QubitId("server", 1)), rng)
    with pytest.raises(ProtocolError):
        extend_epr(good, good, (QubitId("server", 9), QubitId("server", 1)), rng)


@pytest.mark.parametrize("n_users", [2, 3, 4, 5, 6])
def test_allocation_reaches_ghz_for_all_sizes(n_users):
    session = Session(n_users, "partial", seed=10, auth_rounds=3,
                      sample_fraction=0.0)
    session.authenticate_all()
    for _ in range(3):
        allocation = allocate_ghz(session, session.users, session.rng)
        reg = allocation.register
        assert reg.n_qubits == n_users + 1
        assert abs(reg.fidelity(ghz_vector(n_users + 1)) - 1) < 1e-9
        owners = {q.owner for q in allocation.qubit_map.values()}
        assert owners == set(session.users) | {"server"}


def test_allocation_requires_authentication():
    session = Session(2, "partial", seed=11, auth_rounds=2, sample_fraction=0.0)
    with pytest.raises(ProtocolError):
        allocate_ghz(session, session.users, session.rng)


def test_allocation_fails_fast_when_stock_is_exhausted():
    session = Session(2, "partial", seed=12, auth_rounds=1, sample_fraction=0.0)
    session.authenticate_all()
    allocate_ghz(session, session.users, session.rng)
    with pytest.raises(ProtocolError):
        allocate_ghz(session, session.users, session.rng)
