"""Logical process tomography: expectation assembly, Pauli-transfer-matrix
reconstruction through the generalized inverse, and noise metric extraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gadget import BASES, STATES

BLOCH = {"0": (0.0, 0.0, 1.0), "1": (0.0, 0.0, -1.0), "+": (1.0, 0.0, 0.0), "+Y": (0.0, 1.0, 0.0)}

SQ2 = 1.0 / math.sqrt(2.0)
IDEAL_T_PTM = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, SQ2, -SQ2, 0.0],
        [0.0, SQ2, SQ2, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
)


@dataclass(frozen=True)
class TomographySetup:
    adaptive: bool = True

    @property
    def circuits(self) -> list[tuple[str, str, int]]:
        branches = (0, 1)
        return [(s, b, br) for s in STATES for b in BASES for br in branches]

    @property
    def circuit_count(self) -> int:
        return 12 if self.adaptive else 24


@dataclass
class CircuitTally:
    """Accumulated masses for one (state, basis, branch) circuit."""

    reject: float = 0.0
    other: float = 0.0
    leak: float = 0.0
    out0: float = 0.0
    out1: float = 0.0

    @property
    def accept(self) -> float:
        return self.out0 + self.out1

    @property
    def total(self) -> float:
        return self.reject + self.other + self.leak + self.accept


def expectation_vectors(
    tallies: dict[tuple[str, str, int], CircuitTally]
) -> dict[tuple[str, str], float]:
    """Per (state, basis) logical expectation, conditioned on acceptance and
    non-leakage; the two magic-outcome branches combine with their natural
    accepted masses (identical arithmetic in adaptive and non-adaptive mode)."""
    out = {}
    for s in STATES:
        for b in BASES:
            num = den = 0.0
            for br in (0, 1):
                t = tallies[(s, b, br)]
                num += t.out0 - t.out1
                den += t.out0 + t.out1
            if den <= 0.0:
                raise ValueError(f"no accepted mass for ({s},{b})")
            out[(s, b)] = num / den
    return out


def reconstruct_ptm(expectations: dict[tuple[str, str], float]) -> np.ndarray:
    """Least-squares PTM from the 12 expectation values.

    The first row is (1,0,0,0) by trace preservation; each expectation is
    <a> = R[a, :] . (1, r_s), solved rowwise through the Moore-Penrose
    pseudoinverse of the overcomplete state design."""
    design = np.array([[1.0, *BLOCH[s]] for s in STATES])  # (4 states, 4)
    pinv = np.linalg.pinv(design)
    if np.linalg.matrix_rank(design) != 4:
        raise AssertionError("state design lost rank")
    ptm = np.zeros((4, 4))
    ptm[0, 0] = 1.0
    for i, basis in enumerate(BASES):
        y = np.array([expectations[(s, basis)] for s in STATES])
        ptm[1 + i, :] = pinv @ y
    return ptm


@dataclass
class NoiseMetrics:
    r_proc: float
    r_avg: float
    pauli_rates: tuple[float, float, float]  # (p_XL, p_YL, p_ZL)
    eta_zl: float
    eta_xl: float
    eta_yl: float
    offdiag_residual: float
    accept_rate: float = math.nan
    leak_rate: float = math.nan

    def as_dict(self) -> dict[str, float]:
        return {
            "r_proc": self.r_proc,
            "r_avg": self.r_avg,
            "p_XL": self.pauli_rates[0],
            "p_YL": self.pauli_rates[1],
            "p_ZL": self.pauli_rates[2],
            "eta_ZL": self.eta_zl,
            "eta_XL": self.eta_xl,
            "eta_YL": self.eta_yl,
            "offdiag_residual": self.offdiag_residual,
            "accept_rate": self.accept_rate,
            "leak_rate": self.leak_rate,
        }


def _ratio(num: float, den: float) -> float:
    if den <= 0.0:
        return math.inf if num > 0.0 else math.nan
    return num / den


def extract_noise(ptm: np.ndarray, tol: float = 1e-9) -> NoiseMetrics:
    """Noise channel E = R . R_T^{-1}; Pauli-twirled rates from E's diagonal.

    Off-diagonal content is summarized as a norm, not folded into rates."""
    noise = ptm @ np.linalg.inv(IDEAL_T_PTM)
    lam = np.diag(noise)[1:]
    p_i = (1.0 + lam.sum()) / 4.0
    px = (1.0 + lam[0] - lam[1] - lam[2]) / 4.0
    py = (1.0 - lam[0] + lam[1] - lam[2]) / 4.0
    pz = (1.0 - lam[0] - lam[1] + lam[2]) / 4.0
    for rate in (px, py, pz):
        if rate < -tol:
            raise ValueError(f"negative twirled rate {rate}: reconstruction inconsistent")
    off = noise - np.diag(np.diag(noise))
    off[0, :] = 0.0
    r_proc = 1.0 - p_i
    return NoiseMetrics(
        r_proc=r_proc,
        r_avg=(2.0 / 3.0) * r_proc,
        pauli_rates=(px, py, pz),
        eta_zl=_ratio(pz, px + py),
        eta_xl=_ratio(px, py + pz),
        eta_yl=_ratio(py, px + pz),
        offdiag_residual=float(np.linalg.norm(off)),
    )


def forward_model_expectations(noise_ptm: np.ndarray) -> dict[tuple[str, str], float]:
    """Expectations the ideal tomography would produce for the channel
    noise_ptm . T; the independent forward oracle for round-trip tests."""
    total = noise_ptm @ IDEAL_T_PTM
    out = {}
    for s in STATES:
        vec = np.array([1.0, *BLOCH[s]])
        img = total @ vec
        for i, b in enumerate(BASES):
            out[(s, b)] = img[1 + i]
    return out


def pauli_channel_ptm(px: float, py: float, pz: float) -> np.ndarray:
    lam_x = 1.0 - 2.0 * (py + pz)
    lam_y = 1.0 - 2.0 * (px + pz)
    lam_z = 1.0 - 2.0 * (px + py)
    return np.diag([1.0, lam_x, lam_y, lam_z])
