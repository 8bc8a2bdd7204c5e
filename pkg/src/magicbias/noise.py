"""Biased Pauli noise channels and bias-set algebra.

A noise channel is parameterized by a maximal commuting high-rate set Q,
a bias eta = P(Q) / P(Q^C), and a total error rate p.  Every high-rate
error gets probability p*eta/((eta+1)|Q|), every low-rate error
p/((eta+1)|Q^C|); eta = inf zeroes the low-rate part exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .pauli import CliffordGate, PauliString, conjugate

DEPOL_ETA_KEY = "depol"
INF_ETA_KEY = "inf"


def _all_paulis(n: int) -> list[PauliString]:
    out = []
    for x in range(2**n):
        for z in range(2**n):
            if x == 0 and z == 0:
                continue
            out.append(PauliString(n, x, z))
    return out


@dataclass(frozen=True)
class BiasSet:
    """Maximal commuting high-rate set, generated by n independent
    commuting Paulis; |members| = 2^n - 1."""

    n: int
    generators: tuple[PauliString, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.generators) != self.n:
            raise ValueError("need n generators")
        for i, g in enumerate(self.generators):
            for h in self.generators[i + 1:]:
                if not g.commutes(h):
                    raise ValueError("bias-set generators must commute")

    @property
    def members(self) -> frozenset[tuple[int, int]]:
        out = set()
        for mask in range(1, 2**self.n):
            p = PauliString(self.n)
            for i in range(self.n):
                if mask & (1 << i):
                    p = p * self.generators[i]
            out.add((p.x, p.z))
        if len(out) != 2**self.n - 1:
            raise ValueError("generators are not independent")
        return frozenset(out)

    def contains(self, p: PauliString) -> bool:
        return (p.x, p.z) in self.members

    def complement_size(self) -> int:
        return 4**self.n - 2**self.n


def two_qubit_set(name: str) -> BiasSet:
    """Named presets on the (control, target) pair of a CNOT."""
    presets = {
        "Z": ("Z1", "Z2"),
        "X": ("X1", "X2"),
        "Y": ("Y1", "Y2"),
        "M": ("Z1", "X2"),  # mixed set {Z1, X2, Z1X2}: Z-biased CZ seen as CNOT
    }
    if name not in presets:
        raise ValueError(f"unknown bias preset {name!r}")
    gens = tuple(PauliString.parse("+" + g, 2) for g in presets[name])
    return BiasSet(2, gens, name=name)


@dataclass(frozen=True)
class NoiseSpec:
    bias_set: BiasSet
    eta: float  # math.inf allowed
    p: float

    def __post_init__(self):
        if not (0 <= self.p < 1):
            raise ValueError("total error rate must lie in [0, 1)")
        if not (self.eta >= 0):
            raise ValueError("eta must be non-negative")

    def rates(self) -> tuple[float, float]:
        """(per-high-rate-Pauli, per-low-rate-Pauli) probabilities."""
        q = 2**self.bias_set.n - 1
        qc = self.bias_set.complement_size()
        if math.isinf(self.eta):
            return self.p / q, 0.0
        return (
            self.p * self.eta / ((self.eta + 1) * q),
            self.p / ((self.eta + 1) * qc),
        )


FaultDistribution = dict[PauliString, float]


def channel_probs(spec: NoiseSpec) -> FaultDistribution:
    hi, lo = spec.rates()
    out = {}
    for p in _all_paulis(spec.bias_set.n):
        out[PauliString(p.n, p.x, p.z)] = hi if spec.bias_set.contains(p) else lo
    return out


def bias_of(dist: FaultDistribution, bias_set: BiasSet) -> float:
    num = den = 0.0
    total = 0.0
    for p, w in dist.items():
        total += w
        if bias_set.contains(p):
            num += w
        else:
            den += w
    if total == 0:
        raise ValueError("bias of the all-zero distribution is undefined")
    if den == 0:
        return math.inf if num > 0 else 0.0
    return num / den


def conjugate_distribution(dist: FaultDistribution, g: CliffordGate) -> FaultDistribution:
    out: FaultDistribution = {}
    for p, w in dist.items():
        q = conjugate(p, g)
        key = PauliString(q.n, q.x, q.z)  # probability transport is phase-blind
        out[key] = out.get(key, 0.0) + w
    return out


def conjugate_set(s: BiasSet, g: CliffordGate) -> BiasSet:
    gens = tuple(
        PauliString(p.n, cp.x, cp.z)
        for p in s.generators
        for cp in [conjugate(p, g)]
    )
    return BiasSet(s.n, gens, name=f"{s.name}'")


def config_weight(
    k: int, probs: list[float], n_total_sites: int, p: float
) -> float:
    """Probability of a configuration with k faulty sites carrying the
    listed per-Pauli probabilities; survivor factors kept exactly."""
    if k != len(probs):
        raise ValueError("one probability per faulty site")
    w = (1.0 - p) ** (n_total_sites - k)
    for q in probs:
        w *= q
    return w


def parse_eta(value) -> float:
    """CLI spelling of eta: a number, "inf", or "depol" (the two-qubit
    depolarizing point |Q|/|Q^C| = 0.25)."""
    if isinstance(value, str):
        if value == INF_ETA_KEY:
            return math.inf
        if value == DEPOL_ETA_KEY:
            return 0.25
        return float(value)
    return float(value)
