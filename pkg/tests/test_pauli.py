import numpy as np
import pytest

from magicbias.oracle import _1Q, gate_unitary, pauli_matrix
from magicbias.pauli import CliffordGate, PauliString, commutes, conjugate, multiply, weight

LETTERS = "IXYZ"
ALL_2Q = [PauliString.from_support(2, {0: a, 1: b}) for a in LETTERS for b in LETTERS]
GATES_2Q = [
    CliffordGate("CNOT", 0, 1),
    CliffordGate("CNOT", 1, 0),
    CliffordGate("CZ", 0, 1),
    CliffordGate("H", 0),
    CliffordGate("S", 1),
    CliffordGate("SDG", 0),
    CliffordGate("X", 0),
    CliffordGate("Y", 1),
    CliffordGate("Z", 0),
]


def single(q, letter, n=8):
    return PauliString.single(n, q, letter)


def test_xz_product_phase():
    # X1 * Z1 = -i Y1
    prod = multiply(single(0, "X", 1), single(0, "Z", 1))
    assert np.allclose(pauli_matrix(prod), -1j * _1Q["Y"])
    assert str(prod) == "-iY1"


def test_square_is_phase_only():
    for p in ALL_2Q:
        sq = p * p
        assert sq.x == 0 and sq.z == 0


def test_qubitwise_product():
    a = PauliString.parse("+X1Z2", 2)
    b = PauliString.parse("+Z1X2", 2)
    prod = a * b
    assert prod.letter(0) == "Y" and prod.letter(1) == "Y"


def test_multiply_matches_dense_exhaustive():
    for a in ALL_2Q:
        for b in ALL_2Q:
            assert np.allclose(pauli_matrix(a * b), pauli_matrix(a) @ pauli_matrix(b))


def test_multiply_associative_identity():
    rng = np.random.default_rng(3)
    ident = PauliString.identity(5)
    for _ in range(200):
        ps = [
            PauliString(5, int(rng.integers(0, 32)), int(rng.integers(0, 32)),
                        int(rng.integers(0, 4)))
            for _ in range(3)
        ]
        a, b, c = ps
        assert (a * b) * c == a * (b * c)
        assert a * ident == a and ident * a == a


def test_size_mismatch_errors():
    with pytest.raises(ValueError):
        multiply(PauliString(2), PauliString(3))
    with pytest.raises(ValueError):
        commutes(PauliString(2), PauliString(3))


def test_commutes_examples():
    assert not commutes(single(0, "X", 2), single(0, "Z", 2))
    assert commutes(single(0, "X", 2), single(1, "Z", 2))
    yy = PauliString.parse("+Y1Y2", 2)
    xx = PauliString.parse("+X1X2", 2)
    assert commutes(yy, xx)


def test_weight_examples():
    assert weight(PauliString.identity(7)) == 0
    assert weight(PauliString.parse("+Z5Y7", 7)) == 2
    assert weight(PauliString.parse("+X1Z4Z5", 7)) == 3


def test_conjugate_textbook_rules():
    # CNOT copies X from control, Z from target; CZ maps X_c -> X_c Z_t; S: X -> Y
    cx = conjugate(single(0, "X", 2), CliffordGate("CNOT", 0, 1))
    assert str(cx) == "+X1X2"
    cz = conjugate(single(0, "X", 2), CliffordGate("CZ", 0, 1))
    assert str(cz) == "+X1Z2"
    s = conjugate(single(0, "X", 1), CliffordGate("S", 0))
    assert str(s) == "+Y1"


def test_conjugate_matches_dense_exhaustive():
    for g in GATES_2Q:
        u = gate_unitary(g, 2)
        for p in ALL_2Q:
            for phase in range(4):
                pp = PauliString(2, p.x, p.z, phase)
                got = pauli_matrix(conjugate(pp, g))
                want = u @ pauli_matrix(pp) @ u.conj().T
                assert np.allclose(got, want), (g, pp)


def test_conjugate_is_automorphism_and_preserves_commutation():
    rng = np.random.default_rng(11)
    n = 14
    gates = [
        CliffordGate("CNOT", 3, 9),
        CliffordGate("CZ", 0, 13),
        CliffordGate("H", 7),
        CliffordGate("S", 2),
        CliffordGate("SDG", 12),
    ]
    for _ in range(300):
        a = PauliString(n, int(rng.integers(0, 2**n)), int(rng.integers(0, 2**n)),
                        int(rng.integers(0, 4)))
        b = PauliString(n, int(rng.integers(0, 2**n)), int(rng.integers(0, 2**n)),
                        int(rng.integers(0, 4)))
        g = gates[int(rng.integers(0, len(gates)))]
        assert conjugate(a * b, g) == conjugate(a, g) * conjugate(b, g)
        assert commutes(a, b) == commutes(conjugate(a, g), conjugate(b, g))


@pytest.mark.parametrize(
    "gate_kind,letters",
    [("CNOT", "Z"), ("CNOT", "X"), ("CZ", "Z")],
)
def test_high_rate_sets_preserved_under_two_qubit_gates(gate_kind, letters):
    # the CNOT permutes both maximal single-letter sets within themselves;
    # the CZ fixes the Z-type set (its X-set image is the mixed set instead)
    g = CliffordGate(gate_kind, 0, 1)
    members = {
        (p.x, p.z)
        for p in [
            PauliString.parse(f"+{letters}1", 2),
            PauliString.parse(f"+{letters}2", 2),
            PauliString.parse(f"+{letters}1{letters}2", 2),
        ]
    }
    for x, z in members:
        img = conjugate(PauliString(2, x, z), g)
        assert (img.x, img.z) in members


def test_parse_and_str_roundtrip():
    for text in ("+X1Z4Z5", "-iY2", "+Z2Z5Z7", "-X3Y6"):
        assert str(PauliString.parse(text, 7)) == text


def test_phase_tracked_mod4():
    p = PauliString(3, 1, 1, 7)
    assert p.phase == 3


def test_restrict_embed_roundtrip():
    p = PauliString.parse("+X1Z4Z5", 7)
    sub = p.restrict((0, 3, 4))
    assert str(sub) == "+X1Z2Z3"
    back = sub.embed(7, (0, 3, 4))
    assert back == p
