"""Dense reference simulators (test oracles).

Exact statevector evolution for small registers and exact superoperator
channels for toy circuits.  Production sweeps never import this module;
it exists so every fast-path claim has an independent dense check.
Vectorization convention: row-major vec, vec(A rho B) = (A kron B^T) vec(rho).
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, Gate, Measure, NonClifford, Prepare
from .pauli import CliffordGate, PauliString

_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    "TDG": np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=complex),
}

_PREP = {
    "Z+": np.array([1, 0], dtype=complex),
    "Z-": np.array([0, 1], dtype=complex),
    "X+": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "Y+": np.array([1, 1j], dtype=complex) / np.sqrt(2),
}

# stabilizer of the magic state |T> = T|+>: (X+Y)/sqrt(2)
W_OP = (_1Q["X"] + _1Q["Y"]) / np.sqrt(2)
T_STATE = _1Q["T"] @ _PREP["X+"]

MAX_DENSE_QUBITS = 12


def kron_all(mats) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def pauli_matrix(p: PauliString) -> np.ndarray:
    """Dense matrix of a PauliString, including its exact phase."""
    mats = []
    extra = 0
    for q in range(p.n - 1, -1, -1):  # qubit 0 = least significant axis
        letter = p.letter(q)
        mats.append(_1Q[letter])
        if letter == "Y":
            extra += 1  # canonical form X^xZ^z supplies XZ = -iY per Y site
    return (1j ** ((p.phase - extra) % 4)) * kron_all(mats)


class DenseState:
    """2^k statevector with gate/projector application on qubit subsets."""

    def __init__(self, n: int):
        if n > MAX_DENSE_QUBITS:
            raise ValueError(f"dense register capped at {MAX_DENSE_QUBITS} qubits")
        self.n = n
        self.vec = np.zeros(2**n, dtype=complex)
        self.vec[0] = 1.0

    def copy(self) -> "DenseState":
        out = DenseState.__new__(DenseState)
        out.n = self.n
        out.vec = self.vec.copy()
        return out

    def _tensor(self) -> np.ndarray:
        return self.vec.reshape([2] * self.n)

    def apply_matrix(self, mat: np.ndarray, qubits: tuple[int, ...]) -> None:
        """Apply a 2^m x 2^m matrix on the listed qubits (first listed
        qubit = most significant index of the matrix)."""
        m = len(qubits)
        tensor = self._tensor()
        # internal axis for qubit q is (n-1-q) under little-endian state order
        axes = [self.n - 1 - q for q in qubits]
        rest = [a for a in range(self.n) if a not in axes]
        perm = axes + rest
        moved = np.transpose(tensor, perm).reshape(2**m, -1)
        moved = mat @ moved
        moved = moved.reshape([2] * self.n)
        inv = np.argsort(perm)
        self.vec = np.transpose(moved, inv).reshape(-1)

    def apply_gate(self, gate: CliffordGate) -> None:
        if gate.kind == "CNOT":
            mat = np.array(
                [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
            )
            self.apply_matrix(mat, (gate.q0, gate.q1))
        elif gate.kind == "CZ":
            mat = np.diag([1, 1, 1, -1]).astype(complex)
            self.apply_matrix(mat, (gate.q0, gate.q1))
        else:
            self.apply_matrix(_1Q[gate.kind], (gate.q0,))

    def apply_pauli(self, p: PauliString) -> None:
        for q in range(p.n):
            letter = p.letter(q)
            if letter != "I":
                self.apply_matrix(_1Q[letter], (q,))
        ys = (p.x & p.z).bit_count()
        self.vec *= 1j ** ((p.phase - ys) % 4)

    def prepare(self, qubit: int, basis: str) -> None:
        """Project qubit onto |0> (assumes it is unentangled/fresh) and
        load the requested single-qubit state."""
        tensor = self._tensor()
        axis = self.n - 1 - qubit
        slc = [slice(None)] * self.n
        slc[axis] = 1
        tensor[tuple(slc)] = 0.0
        norm = np.linalg.norm(tensor)
        if norm == 0:
            raise ValueError("preparation on entangled qubit")
        self.vec = tensor.reshape(-1) / norm
        amp = _PREP[basis]
        mat = np.array([[amp[0], 0], [amp[1], 0]], dtype=complex)
        mat[:, 1] = [-np.conj(amp[1]), np.conj(amp[0])]
        self.apply_matrix(mat, (qubit,))

    def expectation(self, op: PauliString) -> float:
        mat = pauli_matrix(op)
        val = np.vdot(self.vec, mat @ self.vec)
        return float(np.real(val))

    def measure_probability(self, qubit: int, basis: str, outcome: int) -> float:
        proj = projector_1q(basis, outcome)
        state = self.copy()
        state.apply_matrix(proj, (qubit,))
        return float(np.real(np.vdot(state.vec, state.vec)))

    def project(self, mat: np.ndarray, qubits: tuple[int, ...]) -> float:
        """Apply a (possibly non-unitary) projector; returns the survival
        probability and renormalizes (state unchanged if survival is 0)."""
        saved = self.vec.copy()
        self.apply_matrix(mat, qubits)
        p = float(np.real(np.vdot(self.vec, self.vec)))
        if p > 1e-300:
            self.vec /= np.sqrt(p)
        else:
            self.vec = saved
        return p


def projector_1q(basis: str, outcome: int) -> np.ndarray:
    op = _1Q[basis]
    sign = 1 - 2 * outcome
    return (np.eye(2, dtype=complex) + sign * op) / 2


def projector_onto(op: np.ndarray, sign: int) -> np.ndarray:
    return (np.eye(op.shape[0], dtype=complex) + sign * op) / 2


def run_ideal(circuit: Circuit, nonclifford_ops: dict[str, np.ndarray] | None = None) -> DenseState:
    """Run preparations and gates of a circuit with no noise and no
    measurements (measure events are skipped).  NonClifford events are
    applied from the supplied dense map."""
    state = DenseState(circuit.n_qubits)
    for event in circuit.events:
        if isinstance(event, Prepare):
            state.prepare(event.qubit, event.basis)
        elif isinstance(event, Gate):
            state.apply_gate(event.gate)
        elif isinstance(event, NonClifford):
            if nonclifford_ops is None or event.label not in nonclifford_ops:
                raise ValueError(f"no dense body supplied for {event.label!r}")
            state.apply_matrix(nonclifford_ops[event.label], event.qubits)
    return state


# -- superoperator machinery (toy-scale exact channels) ---------------------


def unitary_superop(u: np.ndarray) -> np.ndarray:
    return np.kron(u, np.conj(u))


def kraus_superop(kraus: list[np.ndarray]) -> np.ndarray:
    d = kraus[0].shape[0]
    out = np.zeros((d * d, d * d), dtype=complex)
    for k in kraus:
        out += np.kron(k, np.conj(k))
    return out


def pauli_channel_superop(n: int, probs: dict[PauliString, float]) -> np.ndarray:
    d = 2**n
    out = np.zeros((d * d, d * d), dtype=complex)
    total = 0.0
    for p, w in probs.items():
        total += w
        out += w * unitary_superop(pauli_matrix(p))
    out += (1.0 - total) * np.eye(d * d, dtype=complex)
    return out


def embed_unitary(u: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Lift a small unitary to the full register (qubit 0 = least
    significant bit of the state index)."""
    state = DenseState(n)
    d = 2**n
    out = np.zeros((d, d), dtype=complex)
    for col in range(d):
        state.vec = np.zeros(d, dtype=complex)
        state.vec[col] = 1.0
        state.apply_matrix(u, qubits)
        out[:, col] = state.vec
    return out


def gate_unitary(gate: CliffordGate, n: int) -> np.ndarray:
    tmp = DenseState(n)
    d = 2**n
    out = np.zeros((d, d), dtype=complex)
    for col in range(d):
        tmp.vec = np.zeros(d, dtype=complex)
        tmp.vec[col] = 1.0
        tmp.apply_gate(gate)
        out[:, col] = tmp.vec
    return out


def channel_of_subcircuit(
    circuit: Circuit,
    site_probs: dict[PauliString, float],
    truncate_order: int | None = None,
) -> np.ndarray:
    """Exact superoperator of the circuit's gate sequence with the given
    two-qubit Pauli channel applied after every fault site.

    With `truncate_order=None` each site carries the full channel (all
    fault orders).  With a finite order k, the result is the truncated sum
    over configurations with at most k faulty sites, survivor factors kept
    exactly -- the same series the enumeration layer computes.
    """
    n = circuit.n_qubits
    if n > 6:
        raise ValueError("superoperator oracle capped at 6 qubits")
    gates: list[tuple[np.ndarray, bool]] = []
    for i, event in enumerate(circuit.events):
        if isinstance(event, Gate):
            u = gate_unitary(event.gate, n)
            gates.append((u, i in circuit.fault_sites))
        elif isinstance(event, (Measure, Prepare)):
            raise ValueError("subcircuit oracle handles unitary segments only")
    d = 2**n
    p_tot = sum(site_probs.values())
    if truncate_order is None:
        out = np.eye(d * d, dtype=complex)
        for i, (u, noisy) in enumerate(gates):
            out = unitary_superop(u) @ out
            if noisy:
                out = _site_channel(circuit, i, site_probs, n) @ out
        return out
    # truncated: sum over fault configurations of order <= k
    noisy_ids = [i for i, (_, f) in enumerate(gates) if f]
    from itertools import combinations, product

    paulis = list(site_probs.keys())
    out = np.zeros((d * d, d * d), dtype=complex)
    n_sites = len(noisy_ids)
    for k in range(truncate_order + 1):
        for combo in combinations(range(n_sites), k):
            for choice in product(paulis, repeat=k):
                weight = (1 - p_tot) ** (n_sites - k)
                for p2 in choice:
                    weight *= site_probs[p2]
                op = np.eye(d * d, dtype=complex)
                it = dict(zip(combo, choice))
                for gi, (u, noisy) in enumerate(gates):
                    op = unitary_superop(u) @ op
                    if noisy:
                        s = noisy_ids.index(gi)
                        if s in it:
                            full = _embed_fault(circuit, gi, it[s], n)
                            op = unitary_superop(full) @ op
                out += weight * op
    return out


def _gate_event_index(circuit: Circuit, gate_pos: int) -> int:
    count = -1
    for i, event in enumerate(circuit.events):
        if isinstance(event, Gate):
            count += 1
            if count == gate_pos:
                return i
    raise ValueError("gate position out of range")


def _embed_fault(circuit: Circuit, gate_pos: int, p2: PauliString, n: int) -> np.ndarray:
    event_idx = _gate_event_index(circuit, gate_pos)
    control, target = circuit.site_qubits(event_idx)
    full = p2.embed(n, (control, target))
    return pauli_matrix(full)


def _site_channel(circuit: Circuit, gate_pos: int, site_probs, n: int) -> np.ndarray:
    d = 2**n
    chan = (1 - sum(site_probs.values())) * np.eye(d * d, dtype=complex)
    for p2, w in site_probs.items():
        chan += w * unitary_superop(_embed_fault(circuit, gate_pos, p2, n))
    return chan
