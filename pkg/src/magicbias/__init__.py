"""Exhaustive fault-propagation simulator for logical process tomography of
a magic-state-injected T gate in the [[7,1,3]] Steane code, quantifying how
biased physical CNOT noise turns into logical noise bias."""

from .circuit import Circuit, PropagatedEffect, compose_effects, precompute_effect_table, propagate_fault
from .gadget import GadgetConfig, NoisyFlags, TomographyId, build_gadget_circuit, enumerate_gadget
from .noise import BiasSet, NoiseSpec, bias_of, channel_probs, two_qubit_set
from .pauli import CliffordGate, PauliString, commutes, conjugate, multiply, weight
from .tomography import NoiseMetrics, expectation_vectors, extract_noise, reconstruct_ptm

__all__ = [
    "Circuit",
    "PropagatedEffect",
    "compose_effects",
    "precompute_effect_table",
    "propagate_fault",
    "GadgetConfig",
    "NoisyFlags",
    "TomographyId",
    "build_gadget_circuit",
    "enumerate_gadget",
    "BiasSet",
    "NoiseSpec",
    "bias_of",
    "channel_probs",
    "two_qubit_set",
    "CliffordGate",
    "PauliString",
    "commutes",
    "conjugate",
    "multiply",
    "weight",
    "NoiseMetrics",
    "expectation_vectors",
    "extract_noise",
    "reconstruct_ptm",
]

__version__ = "0.1.0"
