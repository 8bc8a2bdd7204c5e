"""Ordered circuit representation and Pauli fault propagation.

A circuit is a flat event list: gates, preparations, labeled measurements,
labeled cut points (time slices where the running error frame is
snapshotted), and opaque ideal non-Clifford elements.  Faults are Pauli
errors inserted after designated CNOT events; propagation conjugates them
forward and records measurement flips and cut residuals.  Effects compose
linearly (residuals multiply, flips XOR), which the enumeration layer
exploits heavily.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .pauli import CliffordGate, PauliString, conjugate

PREP_BASES = ("Z+", "Z-", "X+", "Y+")
MEAS_BASES = ("Z", "X")


@dataclass(frozen=True)
class Gate:
    gate: CliffordGate


@dataclass(frozen=True)
class Prepare:
    qubit: int
    basis: str = "Z+"


@dataclass(frozen=True)
class Measure:
    qubit: int
    basis: str
    label: str


@dataclass(frozen=True)
class Cut:
    """Named time slice; the residual on `qubits` is harvested here."""

    label: str
    qubits: tuple[int, ...]


@dataclass(frozen=True)
class NonClifford:
    """Opaque ideal element (e.g. the controlled phase body of the magic
    state check).  Physical Pauli propagation is not defined through it;
    a Cut must sit immediately before it so the logical evaluator can take
    over.  The engine passes frames through unchanged."""

    label: str
    qubits: tuple[int, ...]


Event = Gate | Prepare | Measure | Cut | NonClifford


@dataclass
class Circuit:
    n_qubits: int
    events: list[Event] = field(default_factory=list)
    fault_sites: list[int] = field(default_factory=list)

    # -- construction helpers ---------------------------------------------

    def add(self, event: Event) -> int:
        self.events.append(event)
        return len(self.events) - 1

    def prepare(self, qubit: int, basis: str = "Z+") -> int:
        if basis not in PREP_BASES:
            raise ValueError(f"bad preparation basis {basis!r}")
        return self.add(Prepare(qubit, basis))

    def gate(self, kind: str, q0: int, q1: int = -1, *, noisy: bool = False) -> int:
        idx = self.add(Gate(CliffordGate(kind, q0, q1)))
        if noisy:
            if kind != "CNOT":
                raise ValueError("only CNOTs carry noise")
            self.fault_sites.append(idx)
        return idx

    def cnot(self, control: int, target: int, *, noisy: bool = True) -> int:
        return self.gate("CNOT", control, target, noisy=noisy)

    def measure(self, qubit: int, basis: str, label: str) -> int:
        if basis not in MEAS_BASES:
            raise ValueError(f"bad measurement basis {basis!r}")
        return self.add(Measure(qubit, basis, label))

    def cut(self, label: str, qubits: tuple[int, ...]) -> int:
        return self.add(Cut(label, tuple(qubits)))

    def nonclifford(self, label: str, qubits: tuple[int, ...]) -> int:
        return self.add(NonClifford(label, tuple(qubits)))

    # -- structure queries ------------------------------------------------

    @property
    def measurement_labels(self) -> list[str]:
        return [e.label for e in self.events if isinstance(e, Measure)]

    @property
    def cut_labels(self) -> list[str]:
        return [e.label for e in self.events if isinstance(e, Cut)]

    def site_qubits(self, site: int) -> tuple[int, int]:
        event = self.events[site]
        if not isinstance(event, Gate) or event.gate.kind != "CNOT":
            raise ValueError(f"event {site} is not a CNOT")
        return event.gate.q0, event.gate.q1

    def validate(self) -> None:
        labels = self.measurement_labels + self.cut_labels
        if len(labels) != len(set(labels)):
            raise ValueError("duplicate labels")
        for site in self.fault_sites:
            self.site_qubits(site)
        live = [False] * self.n_qubits
        for i, event in enumerate(self.events):
            if isinstance(event, Prepare):
                live[event.qubit] = True
            elif isinstance(event, Measure):
                if not live[event.qubit]:
                    raise ValueError(f"measuring unprepared qubit {event.qubit}")
                live[event.qubit] = False
            elif isinstance(event, Gate):
                for q in event.gate.qubits:
                    if not live[q]:
                        raise ValueError(f"gate at event {i} touches dead qubit {q}")
            elif isinstance(event, NonClifford):
                if i == 0 or not isinstance(self.events[i - 1], Cut):
                    raise ValueError(
                        f"nonclifford {event.label!r} lacks an immediately preceding cut"
                    )

    def dump(self) -> str:
        """Stable one-event-per-line dump for transcription review."""
        lines = []
        for i, event in enumerate(self.events):
            if isinstance(event, Gate):
                g = event.gate
                qubits = ",".join(str(q + 1) for q in g.qubits)
                star = " *" if i in self.fault_sites else ""
                lines.append(f"{i:4d}  {g.kind}({qubits}){star}")
            elif isinstance(event, Prepare):
                lines.append(f"{i:4d}  prep({event.qubit + 1}, {event.basis})")
            elif isinstance(event, Measure):
                lines.append(f"{i:4d}  meas({event.qubit + 1}, {event.basis}) -> {event.label}")
            elif isinstance(event, Cut):
                lines.append(f"{i:4d}  cut {event.label}")
            else:
                lines.append(f"{i:4d}  nonclifford {event.label}")
        return "\n".join(lines)


@dataclass(frozen=True)
class PropagatedEffect:
    """Footprint of one (or a composition of) fault(s): the residual Pauli
    at every cut label plus a flip bit per measurement label."""

    residuals: dict[str, PauliString]
    flips: dict[str, int]

    def compose(self, other: "PropagatedEffect") -> "PropagatedEffect":
        if self.residuals.keys() != other.residuals.keys() or self.flips.keys() != other.flips.keys():
            raise ValueError("effects come from different circuits")
        return PropagatedEffect(
            {k: v * other.residuals[k] for k, v in self.residuals.items()},
            {k: v ^ other.flips[k] for k, v in self.flips.items()},
        )


def compose_effects(effects: list[PropagatedEffect]) -> PropagatedEffect:
    if not effects:
        raise ValueError("nothing to compose")
    out = effects[0]
    for e in effects[1:]:
        out = out.compose(e)
    return out


_OBS = {"Z": "Z", "X": "X"}


def insert_error(circuit: Circuit, position: int, error: PauliString) -> PropagatedEffect:
    """Propagate `error`, inserted just before event index `position`,
    to the end of the circuit.

    Cut and measurement labels located before the insertion point appear
    with identity residual / zero flip so that effects from different
    positions stay composable.
    """
    if error.n != circuit.n_qubits:
        raise ValueError("error size mismatch")
    residuals: dict[str, PauliString] = {}
    flips: dict[str, int] = {}
    frame = error
    for i, event in enumerate(circuit.events):
        before = i < position
        if isinstance(event, Gate):
            if not before:
                frame = conjugate(frame, event.gate)
        elif isinstance(event, Measure):
            if before:
                flips[event.label] = 0
            else:
                obs = PauliString.single(circuit.n_qubits, event.qubit, _OBS[event.basis])
                flips[event.label] = 0 if frame.commutes(obs) else 1
                # measured qubit is consumed; drop its error component
                keep = ~(1 << event.qubit)
                frame = PauliString(frame.n, frame.x & keep, frame.z & keep, frame.phase)
        elif isinstance(event, Prepare):
            if not before:
                keep = ~(1 << event.qubit)
                frame = PauliString(frame.n, frame.x & keep, frame.z & keep, frame.phase)
        elif isinstance(event, Cut):
            if before:
                residuals[event.label] = PauliString(len(event.qubits))
            else:
                residuals[event.label] = frame.restrict(event.qubits)
        # NonClifford: frame passes through unchanged by model; the cut
        # immediately before it lets the evaluator correct for the
        # logical-class part exactly.
    return PropagatedEffect(residuals, flips)


def propagate_fault(circuit: Circuit, site: int, error2: PauliString) -> PropagatedEffect:
    """Propagate a two-qubit Pauli fault attached after the CNOT at
    fault-site event index `site` (noise follows the ideal gate)."""
    if error2.n != 2:
        raise ValueError("fault must be a two-qubit Pauli")
    control, target = circuit.site_qubits(site)
    embedded = error2.embed(circuit.n_qubits, (control, target))
    return insert_error(circuit, site + 1, embedded)


def two_qubit_paulis(include_identity: bool = False) -> list[PauliString]:
    """The 15 non-identity two-qubit Paulis in a fixed scan order."""
    out = []
    letters = "IXZY"
    for a in letters:
        for b in letters:
            if a == b == "I" and not include_identity:
                continue
            out.append(PauliString.from_support(2, {0: a, 1: b}))
    return out


def precompute_effect_table(circuit: Circuit) -> dict[tuple[int, int], PropagatedEffect]:
    """Effect of every (fault site, two-qubit Pauli index) pair.

    Pauli index runs over `two_qubit_paulis()` order; downstream
    enumeration composes these entries instead of re-propagating.
    """
    table = {}
    paulis = two_qubit_paulis()
    for site in circuit.fault_sites:
        for k, p in enumerate(paulis):
            table[(site, k)] = propagate_fault(circuit, site, p)
    return table
