"""n-qubit Pauli algebra in symplectic (bit-vector) form.

A Pauli operator is stored as ``i**phase * X^xbits * Z^zbits`` with the
X-part to the left of the Z-part and phase an integer mod 4.  Under this
convention ``Y = i * X * Z``, so the operator with ``x=z=1, phase=0`` is
``XZ = -i Y``.  Bit vectors are plain Python ints (qubit q <-> bit q),
which gives word-packed XOR/AND/popcount for any n <= 64.
"""

from __future__ import annotations

from dataclasses import dataclass


_LETTER = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_SIGN = {0: "+", 1: "+i", 2: "-", 3: "-i"}


@dataclass(frozen=True)
class PauliString:
    """Immutable n-qubit Pauli operator.

    Attributes:
        n: qubit count (qubits are indexed 0..n-1 internally).
        x: packed X-component bits.
        z: packed Z-component bits.
        phase: power of i in front of the canonical X..Z ordering, mod 4.
    """

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("bit vector exceeds qubit count")
        object.__setattr__(self, "phase", self.phase & 3)

    # -- constructors ---------------------------------------------------

    @staticmethod
    def identity(n: int) -> "PauliString":
        return PauliString(n)

    @staticmethod
    def single(n: int, qubit: int, letter: str) -> "PauliString":
        """Single-qubit Pauli; ``letter`` in I/X/Y/Z.  Y carries phase +1
        so that the operator equals the textbook Y exactly."""
        if not 0 <= qubit < n:
            raise ValueError(f"qubit {qubit} out of range for n={n}")
        letter = letter.upper()
        if letter == "I":
            return PauliString(n)
        if letter == "X":
            return PauliString(n, x=1 << qubit)
        if letter == "Z":
            return PauliString(n, z=1 << qubit)
        if letter == "Y":
            return PauliString(n, x=1 << qubit, z=1 << qubit, phase=1)
        raise ValueError(f"unknown Pauli letter {letter!r}")

    @staticmethod
    def from_support(n: int, letters: dict[int, str]) -> "PauliString":
        """Build a Pauli from a {qubit: letter} map (textbook phases)."""
        p = PauliString(n)
        for q, letter in letters.items():
            p = p * PauliString.single(n, q, letter)
        return p

    @staticmethod
    def parse(text: str, n: int) -> "PauliString":
        """Parse the canonical text form, e.g. ``+X1Z4Z5`` (1-based)."""
        s = text.strip()
        phase = 0
        for prefix, ph in (("+i", 1), ("-i", 3), ("+", 0), ("-", 2)):
            if s.startswith(prefix):
                phase = ph
                s = s[len(prefix):]
                break
        p = PauliString(n, phase=phase)
        i = 0
        while i < len(s):
            letter = s[i]
            i += 1
            j = i
            while j < len(s) and s[j].isdigit():
                j += 1
            if j == i:
                raise ValueError(f"missing qubit index in {text!r}")
            q = int(s[i:j]) - 1
            p = p * PauliString.single(n, q, letter)
            i = j
        return p

    # -- queries ---------------------------------------------------------

    def letter(self, qubit: int) -> str:
        return _LETTER[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    @property
    def support(self) -> int:
        return self.x | self.z

    def weight(self) -> int:
        """Number of qubits acted on non-trivially."""
        return (self.x | self.z).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0 and self.phase == 0

    def commutes(self, other: "PauliString") -> bool:
        """Symplectic inner product: even overlap count <=> commuting."""
        if self.n != other.n:
            raise ValueError("size mismatch")
        return ((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) % 2 == 0

    # -- group operations -------------------------------------------------

    def __mul__(self, other: "PauliString") -> "PauliString":
        """Group product a*b with exact phase.

        Moving other's X-part past self's Z-part contributes
        (-1)^{|z_a & x_b|}.
        """
        if self.n != other.n:
            raise ValueError("size mismatch")
        phase = (self.phase + other.phase + 2 * ((self.z & other.x).bit_count() & 1)) & 3
        return PauliString(self.n, self.x ^ other.x, self.z ^ other.z, phase)

    def inverse(self) -> "PauliString":
        # P^2 = i^{2*(p + |x&z|)}; solve for the inverse phase directly.
        sq_phase = (2 * self.phase + 2 * ((self.x & self.z).bit_count() & 1)) & 3
        return PauliString(self.n, self.x, self.z, (sq_phase - self.phase) & 3)

    def restrict(self, qubits: tuple[int, ...]) -> "PauliString":
        """Restriction to a qubit subset, re-indexed 0..len-1.  The global
        phase is carried over (exact whenever the complement is identity,
        which holds at every cut we harvest)."""
        x = z = 0
        for i, q in enumerate(qubits):
            x |= ((self.x >> q) & 1) << i
            z |= ((self.z >> q) & 1) << i
        return PauliString(len(qubits), x, z, self.phase)

    def embed(self, n: int, qubits: tuple[int, ...]) -> "PauliString":
        """Embed this Pauli into an n-qubit register at the given sites."""
        x = z = 0
        for i, q in enumerate(qubits):
            x |= ((self.x >> i) & 1) << q
            z |= ((self.z >> i) & 1) << q
        return PauliString(n, x, z, self.phase)

    # -- formatting -------------------------------------------------------

    def __str__(self) -> str:
        ys = (self.x & self.z).bit_count()
        sign = _SIGN[(self.phase - ys) & 3]
        body = "".join(
            f"{self.letter(q)}{q + 1}" for q in range(self.n) if (self.support >> q) & 1
        )
        return sign + (body or "I")

    def __repr__(self) -> str:
        return f"PauliString({self})"


@dataclass(frozen=True)
class CliffordGate:
    """One-or-two-qubit Clifford gate used for error conjugation.

    kind: one of CNOT, CZ, H, S, SDG, X, Y, Z.  Two-qubit kinds use
    (control/first, target/second) = (q0, q1).
    """

    kind: str
    q0: int
    q1: int = -1

    TWO_QUBIT = frozenset({"CNOT", "CZ"})
    ONE_QUBIT = frozenset({"H", "S", "SDG", "X", "Y", "Z"})

    def __post_init__(self):
        if self.kind in self.TWO_QUBIT:
            if self.q1 < 0 or self.q0 == self.q1:
                raise ValueError(f"{self.kind} needs two distinct qubits")
        elif self.kind in self.ONE_QUBIT:
            if self.q1 != -1:
                raise ValueError(f"{self.kind} takes one qubit")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.q0, self.q1) if self.kind in self.TWO_QUBIT else (self.q0,)


def conjugate(p: PauliString, g: CliffordGate) -> PauliString:
    """Return g * p * g^dagger with exact phase tracking.

    Update rules in the canonical i^p X^x Z^z convention (X block left of
    the Z block, so no Y-letter bookkeeping is needed):
      CNOT(c,t): x_t ^= x_c, z_c ^= z_t, no phase change
      CZ(a,b):   z_a ^= x_b, z_b ^= x_a, sign (-1)^{x_a x_b}
      H: swap x,z; sign (-1)^{xz}
      S: z ^= x, phase += x;  SDG: z ^= x, phase -= x
      X/Y/Z: phase flips where p anticommutes.
    """
    for q in g.qubits:
        if not 0 <= q < p.n:
            raise ValueError(f"gate qubit {q} out of range")
    x, z, phase = p.x, p.z, p.phase
    if g.kind == "CNOT":
        c, t = 1 << g.q0, 1 << g.q1
        xc = (x >> g.q0) & 1
        zt = (z >> g.q1) & 1
        if xc:
            x ^= t
        if zt:
            z ^= c
    elif g.kind == "CZ":
        a, b = 1 << g.q0, 1 << g.q1
        xa = (x >> g.q0) & 1
        xb = (x >> g.q1) & 1
        phase = (phase + 2 * (xa & xb)) & 3
        if xb:
            z ^= a
        if xa:
            z ^= b
    elif g.kind == "H":
        q = 1 << g.q0
        xq, zq = (x >> g.q0) & 1, (z >> g.q0) & 1
        phase = (phase + 2 * (xq & zq)) & 3
        if xq != zq:
            x ^= q
            z ^= q
    elif g.kind == "S":
        q = 1 << g.q0
        xq = (x >> g.q0) & 1
        phase = (phase + xq) & 3
        if xq:
            z ^= q
    elif g.kind == "SDG":
        q = 1 << g.q0
        xq = (x >> g.q0) & 1
        phase = (phase - xq) & 3
        if xq:
            z ^= q
    elif g.kind in ("X", "Y", "Z"):
        err = PauliString.single(p.n, g.q0, g.kind)
        if not p.commutes(err):
            phase = (phase + 2) & 3
    else:  # pragma: no cover - constructor forbids
        raise ValueError(g.kind)
    return PauliString(p.n, x, z, phase)


def multiply(a: PauliString, b: PauliString) -> PauliString:
    return a * b


def commutes(a: PauliString, b: PauliString) -> bool:
    return a.commutes(b)


def weight(p: PauliString) -> int:
    return p.weight()
