"""Tomography-gadget assembly, exact logical evaluation, and exhaustive
truncated fault enumeration.

The full circuit is the fault-tolerant T-gate tomography gadget: rotated
|0>_L preparation (encoder + logical check + flagged error detection),
magic state preparation (encoder + logical check + flagged error
detection), a transversal injection CNOT, the magic-block transversal Z
readout, the basis-choice transversal Clifford applied before error
correction, a flagged error-correction round, and the final transversal Z
readout.

Every fault's propagated footprint is compiled to two 64-bit words
(measurement flips plus syndrome/logical-parity fields at three cut
points); composing faults is a pair of XORs, and the branch outcome is a
pure function of the composed words plus a handful of lookup tables.
Tallies are binned by fault order and per-bias-set high-rate counts, so a
single enumeration serves every (bias set, eta, p) grid point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import code
from .circuit import Circuit, Cut, insert_error, propagate_fault, two_qubit_paulis
from .noise import BiasSet, NoiseSpec, two_qubit_set
from .pauli import PauliString

COMP = tuple(range(7))
MAGIC = tuple(range(7, 14))

STATES = ("0", "1", "+", "+Y")
BASES = ("X", "Y", "Z")

# physical per-qubit letter sequences, in application order
# ("d" = S-dagger gate; physical S^x7 is logical S-dagger and vice versa)
CL_PHYSICAL = {"0": "", "1": "X", "+": "H", "+Y": "Hd"}
CPRIME_PHYSICAL = {
    0: {"X": "H", "Y": "SH", "Z": ""},
    1: {"X": "dH", "Y": "H", "Z": "d"},
}

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_SDG = _S.conj()
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_PAULI2 = (np.eye(2, dtype=complex), _X, _Z, _X @ _Z)  # class order I,X,Z,Y

# logical action of one physical letter applied transversally
_LOGICAL_OF_LETTER = {"X": _X, "H": _H, "S": _SDG, "d": _S}


def logical_of_letters(letters: str) -> np.ndarray:
    out = np.eye(2, dtype=complex)
    for letter in letters:  # leftmost applied first
        out = _LOGICAL_OF_LETTER[letter] @ out
    return out


T_STATE = np.array([1, np.exp(1j * np.pi / 4)], dtype=complex) / np.sqrt(2)
ZT_STATE = np.array([1, -np.exp(1j * np.pi / 4)], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class NoisyFlags:
    stabilizer_state_prep: bool = True
    magic_prep: bool = True
    injection_cnot: bool = True
    error_correction: bool = True

    def key(self) -> str:
        return "".join("1" if b else "0" for b in (
            self.stabilizer_state_prep, self.magic_prep,
            self.injection_cnot, self.error_correction))


@dataclass(frozen=True)
class TomographyId:
    state: str
    basis: str
    branch: int

    def __post_init__(self):
        if self.state not in STATES or self.basis not in BASES or self.branch not in (0, 1):
            raise ValueError(f"bad tomography id {self}")

    def key(self) -> str:
        return f"{self.state}|{self.basis}|{self.branch}"


@dataclass(frozen=True)
class GadgetConfig:
    noisy_flags: NoisyFlags = NoisyFlags()
    truncation_order: int = 3
    tomography_id: TomographyId = TomographyId("0", "Z", 0)
    noise: NoiseSpec | None = None

    def __post_init__(self):
        if self.truncation_order < 0:
            raise ValueError("truncation order must be >= 0")


@dataclass
class GadgetCircuit:
    circuit: Circuit
    tomo: TomographyId
    flags: NoisyFlags
    strip_positions: dict[str, int]  # cut label -> event index just after the cut
    meas_cut_position: int  # event index of the magic pre-measurement cut


def build_gadget_circuit(cfg: GadgetConfig) -> GadgetCircuit:
    """Assemble the tomography circuit for one (state, basis, branch)."""
    t = cfg.tomography_id
    flags = cfg.noisy_flags
    c = Circuit(47)
    anc = iter(range(14, 47))

    # computational block: FT |0>_L prep, then the state-choice rotation
    code.append_encode_zero(c, COMP, flags.stabilizer_state_prep)
    code.append_zero_check(c, COMP, next(anc), "zero_check", flags.stabilizer_state_prep)
    code.append_ed_round(c, COMP, tuple(next(anc) for _ in range(12)), "edc",
                         flags.stabilizer_state_prep)
    code.apply_physical_letters(c, CL_PHYSICAL[t.state], COMP)
    comp_cut = c.cut("comp", COMP)

    # magic block: encoder, logical check, error detection
    code.append_encode_t(c, MAGIC, flags.magic_prep)
    code.append_tm_check(c, MAGIC, next(anc), next(anc), "magic_pre_tm", "tm_body",
                         "tm_check", "tm_flag", flags.magic_prep)
    code.append_ed_round(c, MAGIC, tuple(next(anc) for _ in range(12)), "edm",
                         flags.magic_prep)
    post_cut = c.cut("magic_post_tm", MAGIC)

    # transversal injection CNOT, computational block controlling
    for i in range(7):
        c.cnot(COMP[i], MAGIC[i], noisy=flags.injection_cnot)

    meas_cut = c.cut("magic_meas", MAGIC)
    for i in range(7):
        c.measure(MAGIC[i], "Z", f"mout{i}")

    # measurement-basis rotation (with the adaptive S folded in) before EC
    code.apply_physical_letters(c, CPRIME_PHYSICAL[t.branch][t.basis], COMP)
    c.cut("comp_pre_ec", COMP)
    code.append_ec_round(c, COMP, tuple(next(anc) for _ in range(6)), "ec",
                         flags.error_correction)

    c.cut("comp_final", COMP)
    for i in range(7):
        c.measure(COMP[i], "Z", f"fout{i}")

    c.validate()
    strips = {
        "comp": comp_cut + 1,
        "magic_pre_tm": _find_cut(c, "magic_pre_tm") + 1,
        "magic_post_tm": post_cut + 1,
    }
    return GadgetCircuit(c, t, flags, strips, meas_cut)


def _find_cut(c: Circuit, label: str) -> int:
    for i, e in enumerate(c.events):
        if isinstance(e, Cut) and e.label == label:
            return i
    raise ValueError(label)


# -- packed effect words -----------------------------------------------------
#
# word0 (measurement flips):
#   bit 0       zero_check
#   bits 1-12   computational-block ED bits
#   bit 13      tm_flag
#   bits 14-25  magic-block ED bits
#   bit 26      tm_check
#   bits 27-33  magic transversal readout (qubit order)
#   bits 34-39  EC bits in canonical generator order
#   bits 40-46  final transversal readout
# word1 (cut fields, 8 bits each: 6-bit syndrome, anti-Z_L, anti-X_L):
#   bits 0-7    comp cut, bits 8-15 magic pre-T_m, bits 16-23 magic post-T_m

REJECT_MASK = np.uint64((1 << 26) - 1)
_ED_ORDER = []
for _n in code.FACE_NAMES:
    _ED_ORDER += [f"x{_n}", f"x{_n}f"]
for _n in code.FACE_NAMES:
    _ED_ORDER += [f"z{_n}", f"z{_n}f"]


def _measurement_bit_map() -> dict[str, int]:
    bits = {"zero_check": 0}
    for i, suffix in enumerate(_ED_ORDER):
        bits[f"edc_{suffix}"] = 1 + i
    bits["tm_flag"] = 13
    for i, suffix in enumerate(_ED_ORDER):
        bits[f"edm_{suffix}"] = 14 + i
    bits["tm_check"] = 26
    for q in range(7):
        bits[f"mout{q}"] = 27 + q
    for suffix, gen in code.ec_bit_to_generator_index().items():
        bits[f"ec_{suffix}"] = 34 + gen
    for q in range(7):
        bits[f"fout{q}"] = 40 + q
    return bits


MEAS_BITS = _measurement_bit_map()
_CUT_OFFSET = {"comp": 0, "magic_pre_tm": 8, "magic_post_tm": 16}


def _cut_field(residual: PauliString) -> int:
    s = code.syndrome(residual)
    azl = 0 if residual.commutes(code.Z_LOGICAL) else 1
    axl = 0 if residual.commutes(code.X_LOGICAL) else 1
    return s | (azl << 6) | (axl << 7)


def pack_effect(effect) -> tuple[int, int]:
    w0 = 0
    for label, flip in effect.flips.items():
        if flip:
            w0 |= 1 << MEAS_BITS[label]
    w1 = 0
    for label, off in _CUT_OFFSET.items():
        w1 |= _cut_field(effect.residuals[label]) << off
    return w0, w1


# -- lookup tables shared by every circuit ------------------------------------


def _class_table() -> np.ndarray:
    """field byte (synd | parities) -> logical class id (0 I, 1 X, 2 Z, 3 Y)."""
    out = np.zeros(256, dtype=np.int64)
    for f in range(256):
        s = f & 63
        rep = code.decode(s)
        azl = (f >> 6) & 1
        axl = (f >> 7) & 1
        razl = 0 if rep.commutes(code.Z_LOGICAL) else 1
        raxl = 0 if rep.commutes(code.X_LOGICAL) else 1
        out[f] = ((azl ^ razl)) | ((axl ^ raxl) << 1)
    return out


CLASS_TABLE = _class_table()
# class id encoding above: bit0 = anti-Z_L (X content), bit1 = anti-X_L (Z content)
#   0 -> I, 1 -> X, 2 -> Z, 3 -> Y
CLASS_NAMES = ("I", "X", "Z", "Y")


def _w_projection() -> tuple[np.ndarray, np.ndarray]:
    """Survival probability and post-state id for the magic check: project
    the class-displaced |T> onto the W = (X+Y)/sqrt(2) eigenspace selected
    by the (strip-corrected) check flip."""
    w_op = (_X + (1j * _X @ _Z)) / np.sqrt(2)
    surv = np.zeros((4, 2))
    state_id = np.zeros((4, 2), dtype=np.int64)
    for cls in range(4):
        psi = _PAULI2[cls] @ T_STATE
        for flip in (0, 1):
            proj = (np.eye(2) + (1 - 2 * flip) * w_op) / 2
            v = proj @ psi
            p = float(np.real(np.vdot(v, v)))
            for snap in (0.0, 0.5, 1.0):  # projections of Pauli-displaced |T> are exact
                if abs(p - snap) < 1e-12:
                    p = snap
            surv[cls, flip] = p
            if p > 1e-12:
                v = v / np.sqrt(p)
                state_id[cls, flip] = 0 if abs(np.vdot(T_STATE, v)) > 0.5 else 1
    return surv, state_id


TM_SURVIVAL, TM_STATE_ID = _w_projection()


def _readout_tables() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """7-bit x-pattern tables: magic-readout logical flip after the
    Hamming X-correction, final-readout Z-syndrome, final logical parity."""
    mflip = np.zeros(128, dtype=np.uint64)
    zsyn = np.zeros(128, dtype=np.int64)
    zlpar = np.zeros(128, dtype=np.uint64)
    zl_mask = 0
    for q in code.LOGICAL_SUPPORT:
        zl_mask |= 1 << q
    for pattern in range(128):
        s = code.z_syndrome_of_xbits(pattern)
        zsyn[pattern] = s
        corrected = pattern ^ code.x_correction_table()[s].x
        mflip[pattern] = bin(corrected & zl_mask).count("1") & 1
        zlpar[pattern] = bin(pattern & zl_mask).count("1") & 1
    return mflip, zsyn, zlpar


MAGIC_FLIP, ZSYND3, ZL_PARITY = _readout_tables()


# -- EC decode table (flag-conditioned, built constructively) -----------------


def _ec_only_circuit() -> Circuit:
    c = Circuit(13)
    for q in range(7):
        c.prepare(q, "Z+")
    code.append_ec_round(c, COMP, tuple(range(7, 13)), "ec", True)
    c.cut("end", COMP)
    c.validate()
    return c


def _ec_signature(effect) -> int:
    sig = 0
    for suffix, gen in code.ec_bit_to_generator_index().items():
        if effect.flips[f"ec_{suffix}"]:
            sig |= 1 << gen
    return sig


def _unsafe(x_resid: int) -> bool:
    """A post-correction x-pattern is fatal iff it hides logical X content:
    trivial Z-syndrome (no leak) with odd X_L parity."""
    return ZSYND3[x_resid] == 0 and bool(ZL_PARITY[x_resid])


def build_ec_decoder() -> dict[int, PauliString]:
    """Correction per 6-bit measured EC signature, CSS-factorized.

    The Z part of the correction comes from the three X-generator bits
    alone (standard Hamming decoding; Z residuals can never corrupt the
    transversal-Z readout).  The X part comes from the three Z-generator
    bits alone, conditioned constructively: its entry must leave every
    in-round order-1 fault and every single pre-round data error that can
    produce those bits either fully corrected, leaked at the final readout,
    or free of logical X content.  Keying the X correction on X-generator
    bits as well would let a pure-Z fault (high rate under Z bias) redirect
    the X correction chosen for an independent low-rate X error, opening a
    first-order-in-eta logical X channel that the code structure forbids.
    Ties prefer minimum weight then the base decoder's lexicographic order.
    """
    c = _ec_only_circuit()
    seed_pos = 7  # after the seven data preparations
    x_candidates: dict[int, set[int]] = {s: set() for s in range(8)}
    x_seeds: dict[int, set[int]] = {s: set() for s in range(8)}
    x_candidates[0].add(0)
    x_seeds[0].add(0)

    def xsig_of(eff) -> int:
        sig = 0
        for i, color in enumerate(code.FACE_NAMES):
            if eff.flips[f"ec_z{color}"]:
                sig |= 1 << i
        return sig

    for q in range(7):
        for letter in "XYZ":
            e = PauliString.from_support(7, {q: letter}).embed(c.n_qubits, COMP)
            eff = insert_error(c, seed_pos, e)
            x_candidates[xsig_of(eff)].add(eff.residuals["end"].x)
            x_seeds[xsig_of(eff)].add(eff.residuals["end"].x)
    for site in c.fault_sites:
        for p in two_qubit_paulis():
            eff = propagate_fault(c, site, p)
            x_candidates[xsig_of(eff)].add(eff.residuals["end"].x)

    def _exact(x_resid: int) -> bool:
        # residual x-pattern is an X-type stabilizer: fully corrected
        return ZSYND3[x_resid] == 0 and not ZL_PARITY[x_resid]

    x_table: dict[int, int] = {}
    for xsig in range(8):
        cands = x_candidates[xsig]
        options = sorted(
            {code.x_correction_table()[xsig].x} | cands,
            key=lambda xb: (bin(xb).count("1"), xb),
        )
        best = None
        for kx in options:
            if not all(not _unsafe((d ^ kx) & 127) for d in cands):
                continue  # fault tolerance is non-negotiable
            if not all(_exact((s ^ kx) & 127) for s in x_seeds[xsig]):
                continue  # incoming single errors must be corrected, not leaked
            best = kx
            break
        if best is None:
            for kx in options:  # fall back to safety alone
                if all(not _unsafe((d ^ kx) & 127) for d in cands):
                    best = kx
                    break
        if best is None:
            raise RuntimeError(f"no fault-tolerant X correction for Z-syndrome {xsig:03b}")
        x_table[xsig] = best

    table: dict[int, PauliString] = {}
    for sig in range(64):
        zsig = 0  # X-generator bits -> Z correction
        xsig = 0
        for i in range(3):
            if sig & (1 << i):
                zsig |= 1 << i
            if sig & (1 << (3 + i)):
                xsig |= 1 << i
        z_part = PauliString(7, 0, _z_correction_bits(zsig))
        table[sig] = PauliString(7, x_table[xsig], 0) * z_part
    return table


def _z_correction_bits(x_gen_bits: int) -> int:
    """Hamming qubit whose faces match the flipped X generators."""
    if x_gen_bits == 0:
        return 0
    for q in range(7):
        faces = sum(1 << i for i, f in enumerate(code.FACES) if q in f)
        if faces == x_gen_bits:
            return 1 << q
    raise ValueError(x_gen_bits)


# -- per-circuit compiled model ------------------------------------------------


@dataclass
class CompiledGadget:
    """Everything the vectorized evaluator needs for one tomography circuit."""

    gc: GadgetCircuit
    n_sites: int
    table_w0: np.ndarray  # (n_sites, 15) uint64
    table_w1: np.ndarray
    strip_w0: dict[str, np.ndarray]  # label -> (4,) uint64 per class
    strip_w1: dict[str, np.ndarray]
    dense: np.ndarray  # (2 magic_id, 4 cls_inj, 4 cls_comp, 2 m) -> (q0, q1)
    ec_final_x: np.ndarray  # (64,) uint64: x-bits of the EC correction
    ideal: tuple[float, float]  # zero-fault outcome distribution (out0, out1)


def _dense_table(tomo: TomographyId) -> np.ndarray:
    cl = logical_of_letters(CL_PHYSICAL[tomo.state])
    menu = logical_of_letters(CPRIME_PHYSICAL[tomo.branch][tomo.basis])
    out = np.zeros((2, 4, 4, 2, 2))
    for magic_id, magic_state in enumerate((T_STATE, ZT_STATE)):
        for cls_inj in range(4):
            psi_m = _PAULI2[cls_inj] @ magic_state
            for cls_comp in range(4):
                psi_c = _PAULI2[cls_comp] @ (cl @ np.array([1, 0], dtype=complex))
                joint = np.kron(psi_c, psi_m)  # index 2*c + m
                cnot = np.array(
                    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                    dtype=complex,
                )
                joint = cnot @ joint
                for m in (0, 1):
                    sub = np.array([joint[0 * 2 + m], joint[1 * 2 + m]])
                    v = menu @ sub
                    out[magic_id, cls_inj, cls_comp, m, 0] = abs(v[0]) ** 2
                    out[magic_id, cls_inj, cls_comp, m, 1] = abs(v[1]) ** 2
    return out


_EC_DECODER_CACHE: dict[int, PauliString] | None = None


def ec_decoder() -> dict[int, PauliString]:
    global _EC_DECODER_CACHE
    if _EC_DECODER_CACHE is None:
        _EC_DECODER_CACHE = build_ec_decoder()
    return _EC_DECODER_CACHE


_COMPILE_CACHE: dict[tuple[str, str], "CompiledGadget"] = {}


def compile_gadget(cfg: GadgetConfig) -> CompiledGadget:
    cache_key = (cfg.noisy_flags.key(), cfg.tomography_id.key())
    cached = _COMPILE_CACHE.get(cache_key)
    if cached is not None:
        return cached
    gc = build_gadget_circuit(cfg)
    c = gc.circuit
    sites = c.fault_sites
    paulis = two_qubit_paulis()
    t0 = np.zeros((len(sites), 15), dtype=np.uint64)
    t1 = np.zeros((len(sites), 15), dtype=np.uint64)
    # effects compose linearly, so per site only the four single-letter
    # generators need real propagation; the rest are XOR combinations
    gens = [PauliString.parse(s, 2) for s in ("+X1", "+Z1", "+X2", "+Z2")]
    for i, site in enumerate(sites):
        base = [pack_effect(propagate_fault(c, site, g)) for g in gens]
        for k, p in enumerate(paulis):
            w0 = w1 = 0
            for bit, (b0, b1) in zip(
                ((p.x & 1), (p.z & 1), (p.x >> 1) & 1, (p.z >> 1) & 1), base
            ):
                if bit:
                    w0 ^= b0
                    w1 ^= b1
            t0[i, k] = w0
            t1[i, k] = w1
    strip_w0 = {}
    strip_w1 = {}
    for label, pos in gc.strip_positions.items():
        block = COMP if label == "comp" else MAGIC
        s0 = np.zeros(4, dtype=np.uint64)
        s1 = np.zeros(4, dtype=np.uint64)
        for cls in (1, 2, 3):
            rep = code.LOGICAL_REPS[CLASS_NAMES[cls]].embed(c.n_qubits, block)
            w0, w1 = pack_effect(insert_error(c, pos, rep))
            s0[cls] = w0
            s1[cls] = w1
        strip_w0[label] = s0
        strip_w1[label] = s1
    ecx = np.zeros(64, dtype=np.uint64)
    for sig, corr in ec_decoder().items():
        ecx[sig] = corr.x
    compiled = CompiledGadget(
        gc=gc,
        n_sites=len(sites),
        table_w0=t0,
        table_w1=t1,
        strip_w0=strip_w0,
        strip_w1=strip_w1,
        dense=_dense_table(cfg.tomography_id),
        ec_final_x=ecx,
        ideal=(0.0, 0.0),
    )
    out = evaluate_words(
        compiled,
        np.zeros(1, dtype=np.uint64),
        np.zeros(1, dtype=np.uint64),
        cfg.tomography_id.branch,
    )
    compiled.ideal = (float(out["out0"][0]), float(out["out1"][0]))
    _COMPILE_CACHE[cache_key] = compiled
    return compiled


def evaluate_words(
    compiled: CompiledGadget, w0: np.ndarray, w1: np.ndarray, branch: int
) -> dict[str, np.ndarray]:
    """Vectorized branch-outcome evaluation.

    Returns weight-normalized fractions per configuration: reject, leak,
    out0, out1, other (mass whose recorded magic outcome belongs to the
    sibling branch circuit).
    """
    w0 = w0.copy()
    w1 = w1.copy()
    one = np.uint64(1)

    pre_field = (w1 >> np.uint64(8)) & np.uint64(0xFF)
    cls_pre = CLASS_TABLE[pre_field.astype(np.int64)]
    w0 ^= compiled.strip_w0["magic_pre_tm"][cls_pre]
    w1 ^= compiled.strip_w1["magic_pre_tm"][cls_pre]

    post_field = (w1 >> np.uint64(16)) & np.uint64(0xFF)
    cls_inj = CLASS_TABLE[post_field.astype(np.int64)]
    w0 ^= compiled.strip_w0["magic_post_tm"][cls_inj]
    w1 ^= compiled.strip_w1["magic_post_tm"][cls_inj]

    comp_field = w1 & np.uint64(0xFF)
    cls_comp = CLASS_TABLE[comp_field.astype(np.int64)]
    w0 ^= compiled.strip_w0["comp"][cls_comp]

    rejected = (w0 & REJECT_MASK) != 0
    tm_flip = ((w0 >> np.uint64(26)) & one).astype(np.int64)
    surv = TM_SURVIVAL[cls_pre, tm_flip]
    magic_id = TM_STATE_ID[cls_pre, tm_flip]

    r7 = ((w0 >> np.uint64(27)) & np.uint64(0x7F)).astype(np.int64)
    mflip = MAGIC_FLIP[r7].astype(np.int64)
    m_true = np.int64(branch) ^ mflip

    e6 = ((w0 >> np.uint64(34)) & np.uint64(0x3F)).astype(np.int64)
    f7 = (w0 >> np.uint64(40)) & np.uint64(0x7F)
    fx = (f7 ^ compiled.ec_final_x[e6]).astype(np.int64)
    leak = ZSYND3[fx] != 0
    lam = ZL_PARITY[fx].astype(np.int64)

    q = compiled.dense[magic_id, cls_inj, cls_comp, m_true]  # (M, 2)
    q0, q1 = q[:, 0], q[:, 1]
    in_mass = surv * (q0 + q1)

    alive = ~rejected
    f_reject = np.where(rejected, 1.0, 1.0 - surv)
    f_other = np.where(alive, surv - in_mass, 0.0)
    live = alive & ~leak
    rec0 = np.where(lam == 0, q0, q1)
    rec1 = np.where(lam == 0, q1, q0)
    out = {
        "reject": f_reject,
        "other": f_other,
        "leak": np.where(alive & leak, in_mass, 0.0),
        "out0": np.where(live, surv * rec0, 0.0),
        "out1": np.where(live, surv * rec1, 0.0),
    }
    return out


# -- binned enumeration --------------------------------------------------------

BUCKETS = ("reject", "other", "leak", "out0", "out1")
SET_NAMES = ("Z", "X", "Y", "M")
DEFAULT_SETS = tuple(two_qubit_set(n) for n in SET_NAMES)


@dataclass
class BinnedTally:
    """Outcome sums binned by (order k, high-rate multiplicities per bias
    set).  Sufficient to evaluate any (set, eta, p) grid point for every
    set the enumeration was binned over."""

    n_sites: int
    order: int
    sets: tuple[BiasSet, ...] = DEFAULT_SETS
    bins: dict[int, np.ndarray] = field(default_factory=dict)  # k -> (4^nsets, 5)

    def _set_index(self, set_name: str) -> int:
        for i, s in enumerate(self.sets):
            if s.name == set_name:
                return i
        raise KeyError(f"tally was not binned over set {set_name!r}")

    def grid_point(self, set_name: str, eta: float, p: float) -> dict[str, float]:
        set_idx = self._set_index(set_name)
        spec = NoiseSpec(self.sets[set_idx], eta, p)
        hi, lo = spec.rates()
        totals = {b: 0.0 for b in BUCKETS}
        for k, arr in sorted(self.bins.items()):
            base = (1.0 - p) ** (self.n_sites - k)
            for code_id in range(arr.shape[0]):
                row = arr[code_id]
                if not row.any():
                    continue
                h = (code_id >> (2 * set_idx)) & 3
                if h > k:
                    continue
                weight = base * hi**h * lo ** (k - h)
                if weight == 0.0:
                    continue
                for j, b in enumerate(BUCKETS):
                    totals[b] += weight * row[j]
        return totals


def membership_vectors(sets: tuple[BiasSet, ...]) -> np.ndarray:
    paulis = two_qubit_paulis()
    out = np.zeros((len(sets), 15), dtype=np.int64)
    for si, s in enumerate(sets):
        for k, p in enumerate(paulis):
            out[si, k] = 1 if s.contains(p) else 0
    return out


MEMBERSHIP = membership_vectors(DEFAULT_SETS)


def _bin_ids(k: int, membership: np.ndarray) -> np.ndarray:
    """Bin id per Pauli-choice tuple at order k (15^k entries)."""
    if k == 0:
        return np.zeros(1, dtype=np.int64)
    shape = (15,) * k
    ids = np.zeros(shape, dtype=np.int64)
    for si in range(membership.shape[0]):
        m = membership[si]
        h = np.zeros(shape, dtype=np.int64)
        for axis in range(k):
            view = [None] * k
            view[axis] = slice(None)
            h = h + m[tuple(view)]
        ids = ids | (h << (2 * si))
    return ids.ravel()


def enumerate_gadget(
    cfg: GadgetConfig,
    compiled: CompiledGadget | None = None,
    forced_w: tuple[int, int] = (0, 0),
    chunk: int = 512,
    bias_sets: tuple[BiasSet, ...] = DEFAULT_SETS,
) -> BinnedTally:
    """Deterministic exhaustive enumeration of all fault configurations of
    order <= cfg.truncation_order, accumulated into the binned tally."""
    if cfg.truncation_order >= 4:
        raise NotImplementedError("fault orders above 3 are out of scope")
    if compiled is None:
        compiled = compile_gadget(cfg)
    n = compiled.n_sites
    order = cfg.truncation_order
    branch = cfg.tomography_id.branch
    base_w0 = np.uint64(forced_w[0])
    base_w1 = np.uint64(forced_w[1])
    membership = (
        MEMBERSHIP if bias_sets is DEFAULT_SETS else membership_vectors(bias_sets)
    )
    n_bins = 4 ** len(bias_sets)
    tally = BinnedTally(n_sites=n, order=order, sets=bias_sets)

    def accumulate(k: int, w0: np.ndarray, w1: np.ndarray, ids: np.ndarray):
        res = evaluate_words(compiled, w0 ^ base_w0, w1 ^ base_w1, branch)
        arr = tally.bins.setdefault(k, np.zeros((n_bins, len(BUCKETS))))
        for j, b in enumerate(BUCKETS):
            arr[:, j] += np.bincount(ids, weights=res[b], minlength=n_bins)

    accumulate(0, np.zeros(1, dtype=np.uint64), np.zeros(1, dtype=np.uint64),
               _bin_ids(0, membership))

    if order >= 1 and n >= 1:
        ids1 = _bin_ids(1, membership)
        w0 = compiled.table_w0.reshape(-1)
        w1 = compiled.table_w1.reshape(-1)
        accumulate(1, w0, w1, np.tile(ids1, n))

    if order >= 2 and n >= 2:
        ids2 = _bin_ids(2, membership)
        pairs = np.array(list(combinations(range(n), 2)), dtype=np.int64)
        for lo in range(0, len(pairs), chunk):
            pc = pairs[lo:lo + chunk]
            a0 = compiled.table_w0[pc[:, 0]][:, :, None]
            b0 = compiled.table_w0[pc[:, 1]][:, None, :]
            a1 = compiled.table_w1[pc[:, 0]][:, :, None]
            b1 = compiled.table_w1[pc[:, 1]][:, None, :]
            w0 = (a0 ^ b0).reshape(-1)
            w1 = (a1 ^ b1).reshape(-1)
            accumulate(2, w0, w1, np.tile(ids2, len(pc)))

    if order >= 3 and n >= 3:
        ids3 = _bin_ids(3, membership)
        triple_chunk = max(1, chunk // 8)
        triples = combinations(range(n), 3)
        batch = []
        for tri in triples:
            batch.append(tri)
            if len(batch) == triple_chunk:
                _accumulate_triples(compiled, np.array(batch), ids3, accumulate)
                batch = []
        if batch:
            _accumulate_triples(compiled, np.array(batch), ids3, accumulate)

    if order >= 4:
        raise NotImplementedError("fault orders above 3 are out of scope")
    return tally


def _accumulate_triples(compiled, tri, ids3, accumulate):
    a0 = compiled.table_w0[tri[:, 0]][:, :, None, None]
    b0 = compiled.table_w0[tri[:, 1]][:, None, :, None]
    c0 = compiled.table_w0[tri[:, 2]][:, None, None, :]
    a1 = compiled.table_w1[tri[:, 0]][:, :, None, None]
    b1 = compiled.table_w1[tri[:, 1]][:, None, :, None]
    c1 = compiled.table_w1[tri[:, 2]][:, None, None, :]
    w0 = (a0 ^ b0 ^ c0).reshape(-1)
    w1 = (a1 ^ b1 ^ c1).reshape(-1)
    accumulate(3, w0, w1, np.tile(ids3, len(tri)))


def estimate_configs(n_sites: int, order: int) -> int:
    total = 0
    for k in range(order + 1):
        total += math.comb(n_sites, k) * 15**k
    return total


def forced_displacement_word(gc: GadgetCircuit, pauli7: PauliString, where: str) -> tuple[int, int]:
    """Pack the footprint of a forced logical-frame displacement, e.g. an
    X_L inserted just before the magic-block transversal readout."""
    if where == "before_magic_readout":
        pos = gc.meas_cut_position
        embedded = pauli7.embed(gc.circuit.n_qubits, MAGIC)
    else:
        raise ValueError(where)
    return pack_effect(insert_error(gc.circuit, pos, embedded))
