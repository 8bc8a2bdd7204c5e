"""The [[7,1,3]] Steane code: generators, decoder, logical frame reduction,
transversal menus, and the circuit library (encoders, logical checks,
flagged error detection / correction rounds).

Qubit labeling follows the paper convention fixed by the identities
Z_L = Z2 Z5 Z7 and Z1 Z3 Z7 = Z5 * Z_red: the three faces are
red = {1,3,5,7}, green = {2,3,6,7}, blue = {4,5,6,7} (1-based).
Every transcribed circuit is validated behaviorally in the test suite
(dense-oracle stabilization, fault-spread anchors) rather than trusted.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .circuit import Circuit
from .pauli import CliffordGate, PauliString

# -- code geometry (0-based bit positions; paper labels are 1-based) --------

RED = (0, 2, 4, 6)
GREEN = (1, 2, 5, 6)
BLUE = (3, 4, 5, 6)
FACES = (RED, GREEN, BLUE)
FACE_NAMES = ("red", "green", "blue")

LOGICAL_SUPPORT = (1, 4, 6)  # Z_L = Z2 Z5 Z7; X_L = X2 X5 X7


def _xop(support, n=7):
    return PauliString.from_support(n, {q: "X" for q in support})


def _zop(support, n=7):
    return PauliString.from_support(n, {q: "Z" for q in support})


X_GENS = tuple(_xop(f) for f in FACES)
Z_GENS = tuple(_zop(f) for f in FACES)
GENERATORS = X_GENS + Z_GENS  # syndrome bit order: X-red,X-green,X-blue,Z-red,Z-green,Z-blue
X_LOGICAL = _xop(LOGICAL_SUPPORT)
Z_LOGICAL = _zop(LOGICAL_SUPPORT)
Y_LOGICAL = PauliString.from_support(7, {q: "Y" for q in LOGICAL_SUPPORT})

LOGICAL_REPS = {"I": PauliString(7), "X": X_LOGICAL, "Z": Z_LOGICAL, "Y": Y_LOGICAL}


@dataclass(frozen=True)
class CodeSpec:
    x_gens: tuple[PauliString, ...] = X_GENS
    z_gens: tuple[PauliString, ...] = Z_GENS
    x_logical: PauliString = X_LOGICAL
    z_logical: PauliString = Z_LOGICAL


@functools.lru_cache(maxsize=1)
def stabilizer_group() -> tuple[PauliString, ...]:
    """All 64 stabilizer elements (phases included as generated)."""
    out = []
    for mask in range(64):
        p = PauliString(7)
        for i in range(6):
            if mask & (1 << i):
                p = p * GENERATORS[i]
        out.append(p)
    return tuple(out)


def syndrome(e: PauliString) -> int:
    """6-bit syndrome; bit g set iff e anticommutes with GENERATORS[g]."""
    s = 0
    for i, g in enumerate(GENERATORS):
        if not e.commutes(g):
            s |= 1 << i
    return s


def reduced_weight(e: PauliString, allow_logical_z: bool = False) -> int:
    """Minimum weight over the stabilizer coset of e (optionally also
    modulo Z_L, the notion relevant on |0>_L)."""
    reps = stabilizer_group()
    w = min((e * s).weight() for s in reps)
    if allow_logical_z:
        w = min(w, min((e * s * Z_LOGICAL).weight() for s in reps))
    return w


def _pauli_sort_key(p: PauliString):
    # lexicographic by (qubit index, X<Y<Z) over the support
    rank = {"X": 0, "Y": 1, "Z": 2}
    return [(q, rank[p.letter(q)]) for q in range(7) if (p.support >> q) & 1]


@functools.lru_cache(maxsize=1)
def decoder_table() -> tuple[PauliString, ...]:
    """Minimum-weight coset representative for each of the 64 syndromes.

    Ties between equal-weight representatives are broken lexicographically
    by (qubit index, X<Y<Z), which makes the table reproducible.
    """
    table: list[PauliString | None] = [None] * 64
    candidates = [PauliString(7)]
    letters = "XYZ"
    for q in range(7):
        for a in letters:
            candidates.append(PauliString.from_support(7, {q: a}))
    for q1 in range(7):
        for q2 in range(q1 + 1, 7):
            for a in letters:
                for b in letters:
                    candidates.append(PauliString.from_support(7, {q1: a, q2: b}))
    candidates.sort(key=lambda p: (p.weight(), _pauli_sort_key(p)))
    for p in candidates:
        s = syndrome(p)
        if table[s] is None:
            table[s] = PauliString(7, p.x, p.z)  # drop phase: corrections are applied as +P
    assert all(entry is not None for entry in table)
    return tuple(table)


def decode(s: int) -> PauliString:
    return decoder_table()[s & 63]


# pure-X correction from the 3-bit Z-generator syndrome (Hamming-perfect)
@functools.lru_cache(maxsize=1)
def x_correction_table() -> tuple[PauliString, ...]:
    out = [PauliString(7)] * 8
    for q in range(7):
        bits = sum(1 << i for i, f in enumerate(FACES) if q in f)
        out[bits] = PauliString.from_support(7, {q: "X"})
    return tuple(out)


def z_syndrome_of_xbits(xbits: int) -> int:
    """3-bit Z-generator syndrome of a pure-X error pattern."""
    s = 0
    for i, f in enumerate(FACES):
        par = 0
        for q in f:
            par ^= (xbits >> q) & 1
        s |= par << i
    return s


@dataclass(frozen=True)
class FrameReduction:
    syndrome: int
    logical_class: str  # I, X, Y or Z
    phase: int  # i-power such that e = i^phase * rep(s) * stabilizer * L

    @property
    def coset_rep(self) -> PauliString:
        return decode(self.syndrome)


def logical_frame_reduce(e: PauliString) -> FrameReduction:
    """Decompose e as coset-rep(s) * stabilizer * logical-class.

    The logical class of the zero-syndrome part is read off from its
    commutation with X_L and Z_L.
    """
    s = syndrome(e)
    rest = decode(s).inverse() * e  # trivial-syndrome remainder
    anti_zl = 0 if rest.commutes(Z_LOGICAL) else 1  # X-content
    anti_xl = 0 if rest.commutes(X_LOGICAL) else 1  # Z-content
    cls = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[(anti_zl, anti_xl)]
    stab_part = rest * LOGICAL_REPS[cls].inverse()
    # stab_part must be a stabilizer element up to phase; extract that phase
    for st in stabilizer_group():
        if st.x == stab_part.x and st.z == stab_part.z:
            phase = (stab_part.phase - st.phase) & 3
            break
    else:  # pragma: no cover
        raise AssertionError("frame reduction left a non-stabilizer remainder")
    return FrameReduction(s, cls, phase)


# -- transversal menus -------------------------------------------------------

# Physical S^x7 acts as logical S-dagger on this code, so the logical S is
# the qubit-wise SDG (dense-oracle pinned in tests).
_LOGICAL_TO_PHYSICAL = {"I": "", "X": "X", "H": "H", "S": "d", "S†": "S"}
_PHYS_LETTER = {"X": "X", "H": "H", "S": "S", "d": "SDG"}


def transversal(op: str) -> list[CliffordGate]:
    """Qubit-wise gate list realizing the requested *logical* operator.

    `op` is a product of logical letters from {I, X, H, S, S†}, applied
    right-to-left (operator convention): transversal("S†H") applies H
    first, then logical S-dagger.
    """
    seq: list[str] = []
    i = 0
    while i < len(op):
        tok = op[i]
        if i + 1 < len(op) and op[i + 1] == "†":
            tok += "†"
            i += 1
        i += 1
        if tok not in _LOGICAL_TO_PHYSICAL:
            raise ValueError(f"unsupported transversal operator {tok!r}")
        phys = _LOGICAL_TO_PHYSICAL[tok]
        if phys:
            seq.append(phys)
    gates = []
    for tok in reversed(seq):  # rightmost logical factor acts first
        for q in range(7):
            gates.append(CliffordGate(_PHYS_LETTER[tok], q))
    return gates


def apply_physical_letters(circuit: Circuit, letters: str, data: tuple[int, ...]) -> None:
    """Append per-qubit physical gates, leftmost letter first, to all seven
    data qubits (the raw App-style notation like "HS" = S then H is handled
    by the caller handing the letters in application order)."""
    for kind in letters:
        mapped = {"X": "X", "H": "H", "S": "S", "d": "SDG"}[kind]
        for q in data:
            circuit.gate(mapped, q)


# -- circuit library ---------------------------------------------------------

# |0>_L encoder: 8 CNOTs, |+> on paper qubits {2,3,5}.  The late CNOT
# (5->7) makes a Y7 fault on the earlier (2->7) spread to Z5 Y7.
ENC0_PLUS = (1, 2, 4)
ENC0_CNOTS = ((1, 0), (2, 0), (1, 6), (2, 5), (4, 6), (4, 5), (4, 3), (0, 3))

# |T> encoder: carrier is paper qubit 1 holding the unencoded magic state;
# a fault there before fan-out becomes a logical error (hence the T_m check).
ENCT_CARRIER = 0
ENCT_PLUS = (1, 2, 5)
ENCT_CNOTS = (
    (0, 3), (0, 4),            # carrier fan-out along X_L rep {1,4,5}
    (2, 0), (2, 4), (2, 6),    # pivot 3 row {1,3,5,7}
    (5, 3), (5, 4), (5, 6),    # pivot 6 row {4,5,6,7}
    (1, 2), (1, 5), (1, 6),    # pivot 2 row {2,3,6,7}
)

ZERO_CHECK_SUPPORT = LOGICAL_SUPPORT  # 0_m measures Z2 Z5 Z7
TM_CHECK_SUPPORT = LOGICAL_SUPPORT    # controlled-X_L acts on {2,5,7}


def append_encode_zero(c: Circuit, data: tuple[int, ...], noisy: bool) -> None:
    for q in range(7):
        c.prepare(data[q], "X+" if q in ENC0_PLUS else "Z+")
    for ctl, tgt in ENC0_CNOTS:
        c.cnot(data[ctl], data[tgt], noisy=noisy)


def append_encode_t(c: Circuit, data: tuple[int, ...], noisy: bool) -> None:
    """Non-fault-tolerant magic state encoder.  The carrier preparation is
    modeled as an ideal |T> source; only CNOT faults are in the noise model."""
    for q in range(7):
        # the carrier physically holds T|+>; for Pauli-frame propagation the
        # preparation basis is irrelevant, and the dense tests insert the T.
        c.prepare(data[q], "X+" if (q in ENCT_PLUS or q == ENCT_CARRIER) else "Z+")
    for ctl, tgt in ENCT_CNOTS:
        c.cnot(data[ctl], data[tgt], noisy=noisy)


def append_zero_check(c: Circuit, data: tuple[int, ...], anc: int, label: str, noisy: bool) -> None:
    """Goto-style logical check for |0>_L: one ancilla reads the Z_L parity
    and is post-selected on +1, catching X content on the logical support."""
    c.prepare(anc, "Z+")
    for q in ZERO_CHECK_SUPPORT:
        c.cnot(data[q], anc, noisy=noisy)
    c.measure(anc, "Z", label)


def append_tm_check(
    c: Circuit,
    data: tuple[int, ...],
    anc: int,
    flag: int,
    cut_label: str,
    body_label: str,
    check_label: str,
    flag_label: str,
    noisy: bool,
) -> None:
    """Logical (X_L+Y_L)/sqrt(2) check on the magic block.

    The controlled phase body (controlled transversal-S part plus the
    controlled phase) is ideal and non-Clifford: it enters as an opaque
    event behind a cut.  The controlled-X_L part is three real CNOTs whose
    faults propagate normally; a flag CNOT placed after the first of them
    catches ancilla hooks that would otherwise build X_L on the data.
    """
    c.prepare(anc, "X+")
    c.prepare(flag, "Z+")
    c.cut(cut_label, data)
    c.nonclifford(body_label, data + (anc,))
    q1, q2, q3 = (data[q] for q in TM_CHECK_SUPPORT)
    c.cnot(anc, q1, noisy=noisy)
    c.cnot(anc, flag, noisy=noisy)
    c.cnot(anc, q2, noisy=noisy)
    c.cnot(anc, q3, noisy=noisy)
    c.measure(flag, "Z", flag_label)
    c.measure(anc, "X", check_label)


def append_ed_round(
    c: Circuit,
    data: tuple[int, ...],
    ancillas: tuple[int, ...],
    prefix: str,
    noisy: bool,
) -> list[str]:
    """Flagged error-detection round (the modified scheme).

    One syndrome ancilla plus one flag per generator, flag window covering
    the two middle data CNOTs.  Exhaustive property, verified in tests: no
    single CNOT fault (correlated two-qubit errors included) leaves a
    data error of reduced weight two or more without flipping at least one
    of the twelve measured bits.
    """
    if len(ancillas) != 12:
        raise ValueError("ed round needs 12 ancillas")
    labels = []
    it = iter(ancillas)
    for i, face in enumerate(FACES):
        a, f = next(it), next(it)
        q = [data[s] for s in face]
        c.prepare(a, "X+")
        c.prepare(f, "Z+")
        c.cnot(a, q[0], noisy=noisy)
        c.cnot(a, f, noisy=noisy)
        c.cnot(a, q[1], noisy=noisy)
        c.cnot(a, q[2], noisy=noisy)
        c.cnot(a, f, noisy=noisy)
        c.cnot(a, q[3], noisy=noisy)
        la, lf = f"{prefix}_x{FACE_NAMES[i]}", f"{prefix}_x{FACE_NAMES[i]}f"
        c.measure(a, "X", la)
        c.measure(f, "Z", lf)
        labels += [la, lf]
    for i, face in enumerate(FACES):
        b, g = next(it), next(it)
        q = [data[s] for s in face]
        c.prepare(b, "Z+")
        c.prepare(g, "X+")
        c.cnot(q[0], b, noisy=noisy)
        c.cnot(g, b, noisy=noisy)
        c.cnot(q[1], b, noisy=noisy)
        c.cnot(q[2], b, noisy=noisy)
        c.cnot(g, b, noisy=noisy)
        c.cnot(q[3], b, noisy=noisy)
        lb, lg = f"{prefix}_z{FACE_NAMES[i]}", f"{prefix}_z{FACE_NAMES[i]}f"
        c.measure(b, "Z", lb)
        c.measure(g, "X", lg)
        labels += [lb, lg]
    return labels


# Error-correction round: the unmodified flagged scheme.  Each color uses
# an X-ancilla / Z-ancilla pair that mutually flag through two a->b CNOTs.
# In the blue and green blocks the last two data CNOTs sit outside the flag
# window, which is exactly what lets the correlated flag fault of the final
# block spread as X6 Z7 with every measurement trivial; the red ordering is
# the one under which the mid-round ancilla Y fault reproduces the
# X1 Z4 Z5 post-correction residual.
EC_ORDERS = {"red": (4, 0, 2, 6), "blue": (3, 4, 5, 6), "green": (1, 2, 5, 6)}
EC_COLOR_ORDER = ("red", "blue", "green")
# event grammar per color: ("a", k) = CNOT(ancilla -> qubit k of the order),
# ("b", k) = CNOT(qubit k -> Z-ancilla), ("F",) = flag CNOT a -> b
EC_BLOCK_EVENTS = {
    "red": (("b", 0), ("a", 0), ("b", 1), ("a", 1), ("b", 2), ("F",),
            ("a", 2), ("a", 3), ("b", 3), ("F",)),
    "blue": (("b", 0), ("F",), ("a", 0), ("b", 1), ("a", 1), ("b", 2),
             ("a", 3), ("F",), ("a", 2), ("b", 3)),
    "green": (("b", 0), ("F",), ("a", 0), ("b", 1), ("a", 1), ("b", 2),
              ("a", 3), ("F",), ("a", 2), ("b", 3)),
}


def append_ec_round(
    c: Circuit,
    data: tuple[int, ...],
    ancillas: tuple[int, ...],
    prefix: str,
    noisy: bool,
) -> list[str]:
    if len(ancillas) != 6:
        raise ValueError("ec round needs 6 ancillas")
    labels = []
    it = iter(ancillas)
    for color in EC_COLOR_ORDER:
        a, b = next(it), next(it)
        s = [data[q] for q in EC_ORDERS[color]]
        c.prepare(a, "X+")
        c.prepare(b, "Z+")
        for ev in EC_BLOCK_EVENTS[color]:
            if ev[0] == "F":
                c.cnot(a, b, noisy=noisy)
            elif ev[0] == "a":
                c.cnot(a, s[ev[1]], noisy=noisy)
            else:
                c.cnot(s[ev[1]], b, noisy=noisy)
        la, lb = f"{prefix}_x{color}", f"{prefix}_z{color}"
        c.measure(a, "X", la)
        c.measure(b, "Z", lb)
        labels += [la, lb]
    return labels


# measured-bit order of the EC round, for syndrome assembly: the X-ancilla
# of color c reports the X-generator (flipped by Z errors), the Z-ancilla
# the Z-generator.  Map to the canonical 6-bit syndrome order.
def ec_bit_to_generator_index() -> dict[str, int]:
    gen_index = {}
    for color in EC_COLOR_ORDER:
        i = FACE_NAMES.index(color)
        gen_index[f"x{color}"] = i       # X-generator bit
        gen_index[f"z{color}"] = 3 + i   # Z-generator bit
    return gen_index


def serialize_tables() -> str:
    """Human-auditable dump of the generator and decoder tables."""
    lines = ["# Steane code tables", "# generators (syndrome bit order)"]
    for i, g in enumerate(GENERATORS):
        lines.append(f"g{i}: {g}")
    lines.append(f"X_L: {X_LOGICAL}")
    lines.append(f"Z_L: {Z_LOGICAL}")
    lines.append("# decoder: syndrome bits (g0..g5) -> correction")
    for s in range(64):
        lines.append(f"{s:06b} -> {decode(s)}")
    return "\n".join(lines) + "\n"
