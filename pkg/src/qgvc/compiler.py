"""Compile plaquette evolutions and cube Trotter steps into qudit circuits.

Every ``exp(-i tau (sum_Pi) XXXX)`` term is built from five blocks:
gating, X-parity basis change, the multiplexed Z rotation on one plaquette
wire, and the two inverses. Opposite cube faces share their control links and
touch disjoint plaquette links, so their term circuits are interleaved.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import su2
from .ir import Circuit, GateOp, ResourceReport, Wire, asap_depth, gcx, hgate, make_wires, rot
from .synthesis import (
    AngleTransform,
    ControlSequence,
    GatingSpec,
    SynthesisError,
    _emit_walk,
    _or_left,
    and_verifier,
    ccr_transform,
    combine_gate,
    or3_qutrit,
    sequencers,
)

# cube edges (vertex bits x, y, z); wire index = position in this list
CUBE_EDGES: tuple[tuple[tuple[int, int, int], tuple[int, int, int]], ...] = tuple(
    (v, tuple(v[a] + (a == ax) for a in range(3)))  # type: ignore[misc]
    for v in itertools.product((0, 1), repeat=3)
    for ax in range(3)
    if v[ax] == 0
)
LINK_NAMES = ("jlt", "ql", "jat", "jrt", "qr", "jlb", "jab", "jrb", "pr", "kat", "pl", "kab")

# plaquette links in pqrs order and control links in ijkl order, as link indices
FACE_TABLE: dict[str, tuple[tuple[int, ...], tuple[int, ...]]] = {
    "A": ((1, 6, 4, 2), (0, 5, 7, 3)),
    "Abar": ((10, 11, 8, 9), (3, 7, 5, 0)),
    "B": ((4, 7, 10, 3), (2, 6, 11, 9)),
    "Bbar": ((8, 5, 1, 0), (9, 11, 6, 2)),
    "C": ((0, 2, 3, 9), (8, 1, 4, 10)),
    "Cbar": ((7, 6, 5, 11), (10, 4, 1, 8)),
}
FACE_PAIRS: tuple[tuple[str, str], ...] = (("A", "Abar"), ("B", "Bbar"), ("C", "Cbar"))


@dataclass(frozen=True)
class FaceWires:
    plaquette: tuple[int, int, int, int]
    controls: tuple[int, int, int, int]
    aux: int
    name: str = ""


@dataclass(frozen=True)
class CubeWiring:
    """Twelve link wires followed by auxiliary wires."""

    n_aux: int = 2

    @property
    def n_links(self) -> int:
        return len(CUBE_EDGES)

    def face(self, name: str, aux: int) -> FaceWires:
        plaq, ctrl = FACE_TABLE[name]
        return FaceWires(plaq, ctrl, aux, name)  # type: ignore[arg-type]

    def wires(self, d: int, aux_dims: Sequence[int]) -> list[Wire]:
        labels = list(LINK_NAMES) + [f"aux{i}" for i in range(len(aux_dims))]
        return make_wires([d] * self.n_links + list(aux_dims), labels)

    @staticmethod
    def faces_with_link(link: int) -> list[str]:
        return [n for n, (p, c) in FACE_TABLE.items() if link in p]

    @staticmethod
    def opposite(a: str, b: str) -> bool:
        return (a, b) in FACE_PAIRS or (b, a) in FACE_PAIRS


@dataclass(frozen=True)
class EvolutionParams:
    g2: float
    t: float
    n_trotter: int = 1

    def __post_init__(self):
        if self.n_trotter < 1:
            raise ValueError("n_trotter must be >= 1")
        if self.g2 <= 0:
            raise ValueError("g2 must be positive")

    @property
    def tau(self) -> float:
        return -self.t / (self.g2 * self.n_trotter)

    @property
    def dt(self) -> float:
        return self.t / self.n_trotter


# term building blocks --------------------------------------------------------


def term_subspaces(pqrs: Sequence[int]) -> list[tuple[int, int]]:
    return [(x, x + 1) for x in pqrs]


def rotation_target(pqrs: Sequence[int]) -> int:
    """Position of the last plaquette link with the largest subspace index."""
    hi = max(pqrs)
    return max(i for i, x in enumerate(pqrs) if x == hi)


def spectator_level(sub: tuple[int, int], d: int) -> int:
    """A level outside ``sub``; qutrit OR gates detect it."""
    return next(v for v in range(d) if v not in sub)


def xparity_subroutine(pqrs: Sequence[int], plaquette: Sequence[int]) -> list[GateOp]:
    """H on each plaquette link, then a GCX fan-in of the parity onto the target.

    3 GCX and 4 H, depth 3. GCX controls sit on the upper level of the
    control link's subspace and flip the target within its own subspace.
    """
    subs = term_subspaces(pqrs)
    t = rotation_target(pqrs)
    a, b, c = [i for i in range(4) if i != t]
    w = list(plaquette)
    gates = [hgate(w[i], subs[i]) for i in range(4)]
    gates.append(gcx(w[a], subs[a][1], w[b], subs[b]))
    gates.append(gcx(w[c], subs[c][1], w[t], subs[t]))
    gates.append(gcx(w[b], subs[b][1], w[t], subs[t]))
    return gates


@lru_cache(maxsize=None)
def qutrit_sequence() -> ControlSequence:
    """Aux in {0, 1} times even-parity words of four qutrits (82 words)."""
    words = [(a,) + v for a in (0, 1) for v in itertools.product(range(3), repeat=4) if sum(v) % 2 == 0]
    return ControlSequence.of(words, (3, 3, 3, 3, 3))


@lru_cache(maxsize=None)
def general_sequence(d: int) -> ControlSequence:
    return ControlSequence.full((2, d, d, d, d))


@lru_cache(maxsize=None)
def _transform(seq: ControlSequence) -> AngleTransform:
    return ccr_transform(seq)


def _reversed_gates(gates: Sequence[GateOp]) -> list[GateOp]:
    # every gate in the gating and parity blocks is self-inverse
    return list(reversed(gates))


def term_angles(term: su2.GGGGTerm, seq: ControlSequence, tau: float, active_aux: int,
                decode=None) -> np.ndarray:
    """theta = 2 tau phi on words whose aux digit is ``active_aux`` and whose controls are in the sector."""
    phi = term.phi_map()
    out = np.zeros(len(seq))
    for i, w in enumerate(seq.words):
        if w[0] != active_aux:
            continue
        ctl = decode(w[1:]) if decode else w[1:]
        v = phi.get(tuple(ctl))
        if v is not None:
            out[i] = 2.0 * tau * v
    return out


def term_blocks(
    term: su2.GGGGTerm, d: int, tau: float, face: FaceWires, wires: list[Wire], style: str = "auto"
) -> list[tuple[str, list[GateOp]]]:
    """Named blocks of one term circuit, in application order."""
    style = resolve_style(style, d)
    pqrs = term.pqrs
    subs = term_subspaces(pqrs)
    t = rotation_target(pqrs)
    others = [i for i in range(4) if i != t]
    plaq = list(face.plaquette)
    xp = xparity_subroutine(pqrs, plaq)
    if style == "qutrit":
        detect = [spectator_level(subs[i], d) for i in others]
        gate = or3_qutrit([plaq[i] for i in others], detect, face.aux, wires)
        seq = qutrit_sequence()
        active = 0
    else:
        spec = GatingSpec(tuple(frozenset(subs[i]) for i in others), tuple(plaq[i] for i in others), face.aux)
        gate = and_verifier(spec, wires).circuit.gates
        seq = general_sequence(d)
        active = 1
    tr = _transform(seq)
    thetas = term_angles(term, seq, tau, active)
    betas = tr.solve(thetas)
    maps = sequencers(seq).value_maps
    cc = _emit_walk(wires, [face.aux] + list(face.controls), plaq[t], tr.g_words, betas, "Z",
                    subs[t], tr.corrections, maps).gates
    if style == "qutrit":
        # the OR only reads subspace membership, which the parity block preserves
        return [("gate", gate), ("xparity", xp), ("cc", cc), ("xparity_inv", _reversed_gates(xp)),
                ("gate_inv", _reversed_gates(gate))]
    return [("xparity", xp), ("gate", gate), ("cc", cc), ("gate_inv", _reversed_gates(gate)),
            ("xparity_inv", _reversed_gates(xp))]


def resolve_style(style: str, d: int) -> str:
    if style == "auto":
        return "qutrit" if d == 3 else "general"
    if style == "qutrit" and d != 3:
        raise SynthesisError("the qutrit style needs d = 3")
    if style not in ("qutrit", "general"):
        raise SynthesisError(f"unknown style {style}")
    return style


def aux_dim(d: int, style: str) -> int:
    return 3 if resolve_style(style, d) == "qutrit" else 4


def face_register(d: int, style: str = "auto") -> tuple[list[Wire], FaceWires]:
    """Nine-wire register: plaquette links, control links, aux."""
    labels = ["ql", "jab", "qr", "jat", "jlt", "jlb", "jrb", "jrt", "aux"]
    wires = make_wires([d] * 8 + [aux_dim(d, style)], labels)
    return wires, FaceWires((0, 1, 2, 3), (4, 5, 6, 7), 8, "single")


def _circuit_from_blocks(wires: list[Wire], blocks: Sequence[tuple[str, list[GateOp]]], prefix: str = "") -> Circuit:
    c = Circuit(wires)
    for name, gates in blocks:
        c.extend(gates, block=prefix + name)
    return c


def compile_term_evolution(
    term: su2.GGGGTerm, d: int, tau: float, style: str = "auto",
    wires: list[Wire] | None = None, face: FaceWires | None = None,
) -> Circuit:
    if len(term.pqrs) != 4 or max(term.pqrs) > d - 2:
        raise SynthesisError("term does not match dimension")
    if wires is None or face is None:
        wires, face = face_register(d, style)
    return _circuit_from_blocks(wires, term_blocks(term, d, tau, face, wires, style), f"{term.pqrs}:")


@lru_cache(maxsize=None)
def _operator(d: int) -> su2.PlaquetteOperator:
    return su2.build_plaquette_operator(d)


def compile_plaquette_evolution(
    d: int, tau: float, style: str = "auto", wires: list[Wire] | None = None, face: FaceWires | None = None
) -> Circuit:
    """All (d-1)^4 terms in increasing pqrs order."""
    if wires is None or face is None:
        wires, face = face_register(d, style)
    c = Circuit(wires)
    for term in _operator(d).terms:
        for name, gates in term_blocks(term, d, tau, face, wires, style):
            c.extend(gates, block=f"{term.pqrs}:{name}")
    return c


def _interleave(a: Sequence[GateOp], b: Sequence[GateOp]) -> list[GateOp]:
    out: list[GateOp] = []
    for x, y in itertools.zip_longest(a, b):
        if x is not None:
            out.append(x)
        if y is not None:
            out.append(y)
    return out


def compile_parallel_faces(
    face1: FaceWires, face2: FaceWires, d: int, tau: float, wires: list[Wire],
    style: str = "auto",
) -> Circuit:
    """Evolve two opposite faces with their term circuits interleaved block by block.

    The faces share control links only as GCX controls, so any interleaving
    equals running one face after the other. Lockstep interleaving never
    puts both faces on the same control wire in the same layer, because the
    second face lists the shared control links in reverse.
    """
    if face1.name and face2.name and not CubeWiring.opposite(face1.name, face2.name):
        raise SynthesisError(f"faces {face1.name} and {face2.name} are not opposite")
    if set(face1.plaquette) & set(face2.plaquette) or face1.aux == face2.aux:
        raise SynthesisError("paired faces must have disjoint plaquette links and aux wires")
    c = Circuit(wires)
    for term in _operator(d).terms:
        b1 = term_blocks(term, d, tau, face1, wires, style)
        b2 = term_blocks(term, d, tau, face2, wires, style)
        for (name, g1), (_, g2) in zip(b1, b2):
            c.extend(_interleave(g1, g2), block=f"{term.pqrs}:{name}")
    return c


def electric_angles(d: int, alpha: float) -> list[float]:
    """RZ angles on subspaces (m, m+1) giving phases exp(-i alpha j(j+1)) up to a global phase."""
    casimir = np.array([(v / 2) * (v / 2 + 1) for v in range(d)])
    target = -alpha * casimir
    # phase of level v: -a_{v-1}... each RZ_(m,m+1)(a) adds -a/2 to level m and +a/2 to level m+1
    n = d - 1
    A = np.zeros((d, n + 1))
    for m in range(n):
        A[m, m] -= 0.5
        A[m + 1, m] += 0.5
    A[:, n] = 1.0  # global phase column
    sol = np.linalg.solve(A, target) if d == n + 1 else np.linalg.lstsq(A, target, rcond=None)[0]
    return [float(x) for x in sol[:n]]


def compile_electric_step(d: int, g2: float, dt: float, links: Sequence[int], wires: list[Wire]) -> Circuit:
    """exp(-i (g2/2) dt sum E^2) with d-1 RZ gates per link."""
    angles = electric_angles(d, 0.5 * g2 * dt)
    c = Circuit(wires)
    gates = [rot("RZ", w, (m, m + 1), a) for m, a in enumerate(angles) for w in links]
    c.extend(gates, block="electric")
    return c


def compile_trotter_step(d: int, params: EvolutionParams, style: str = "auto",
                         wiring: CubeWiring | None = None) -> Circuit:
    """Electric step, then the opposite-face pairs (A, Abar), (B, Bbar), (C, Cbar)."""
    wiring = wiring or CubeWiring()
    ad = aux_dim(d, style)
    wires = wiring.wires(d, [ad, ad])
    n = wiring.n_links
    c = compile_electric_step(d, params.g2, params.dt, range(n), wires)
    for f1, f2 in FACE_PAIRS:
        pair = compile_parallel_faces(wiring.face(f1, n), wiring.face(f2, n + 1), d, params.tau, wires, style)
        off = len(c.gates)
        c.gates.extend(pair.gates)
        c.blocks.extend((f"{f1}{f2}:{nm}", s + off, e + off) for nm, s, e in pair.blocks)
    return c


# alternate decomposition with control-link gating ----------------------------


def gated_corners(pqrs: Sequence[int], d: int = 3) -> list[tuple[int, ...]]:
    """Allowed control levels per corner (ijkl)."""
    p, q, r, s = pqrs
    return [su2.control_set(x, y, d) for x, y in ((s, p), (p, q), (q, r), (r, s))]


def _parity_sequence(dims: tuple[int, ...], order: tuple[int, ...]) -> ControlSequence:
    od = (2,) + tuple(dims[i] for i in order)
    words = [
        (a,) + v
        for a in (0, 1)
        for v in itertools.product(*[range(x) for x in od[1:]])
        if sum(v) % 2 == 0
    ]
    return ControlSequence.of(words, od)


@lru_cache(maxsize=None)
def alternate_orders(pqrs: tuple[int, int, int, int]) -> tuple[tuple[int, ...], ...]:
    """Control-link orders whose parity-label sequence has a full-rank sign matrix."""
    sets = gated_corners(pqrs)
    if not any(len(s) == 2 for s in sets):
        return ((0, 1, 2, 3),)
    dims = tuple(len(s) if len(s) == 3 else 2 for s in sets)
    out = []
    for order in itertools.permutations(range(4)):
        seq = _parity_sequence(dims, order)
        if np.linalg.matrix_rank(ccr_transform(seq, correct=False).M) == len(seq):
            out.append(order)
    return tuple(out)


@lru_cache(maxsize=None)
def alternate_sequence(pqrs: tuple[int, int, int, int], order: tuple[int, ...] | None = None
                       ) -> tuple[ControlSequence, tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """Control sequence over parity labels of gated corners.

    A gated corner (two allowed levels) is labelled by the level parity, so
    only level 1 ever fires a GCX and an out-of-set level acts like an
    allowed level of the same parity. Ungated corners keep all three levels;
    with none gated the corrected 82-word sequence is used.
    Returns the sequence, the control order, and the allowed sets.
    """
    sets = tuple(tuple(s) for s in gated_corners(pqrs))
    if not any(len(s) == 2 for s in sets):
        return qutrit_sequence(), (0, 1, 2, 3), sets
    orders = alternate_orders(pqrs)
    if not orders:
        raise SynthesisError(f"no control order gives a full-rank sign matrix for {pqrs}")
    order = order or orders[0]
    dims = tuple(2 if len(s) == 2 else 3 for s in sets)
    return _parity_sequence(dims, order), order, sets


def _label_to_level(allowed: tuple[int, ...], label: int) -> int:
    if len(allowed) == 3:
        return label
    return next(v for v in allowed if v % 2 == label)


def reflected_pqrs(pqrs: Sequence[int]) -> tuple[int, int, int, int]:
    """Term on the opposite face whose corner sets agree link by link.

    Opposite faces list their shared control links in reverse, which maps
    corner (s, p) to corner (r', s') and so on; solving gives (r, q, p, s).
    """
    p, q, r, s = pqrs
    return (r, q, p, s)


def _alt_face_cc(term: su2.GGGGTerm, tau: float, face: FaceWires, wires: list[Wire],
                 order: tuple[int, ...] | None = None) -> list[GateOp]:
    pqrs = term.pqrs
    subs = term_subspaces(pqrs)
    t = rotation_target(pqrs)
    plaq = list(face.plaquette)
    seq, order, sets = alternate_sequence(pqrs, order)
    tr = _transform(seq)
    seq_maps = sequencers(seq).value_maps
    if seq is qutrit_sequence():
        thetas = term_angles(term, seq, tau, 0)
        ctrl_w = [face.aux] + list(face.controls)
        maps = seq_maps
    else:
        def to_ijkl(w):
            out_w = [0] * 4
            for k, ci in enumerate(order):
                out_w[ci] = _label_to_level(sets[ci], w[k])
            return tuple(out_w)

        thetas = term_angles(term, seq, tau, 0, to_ijkl)
        ctrl_w = [face.aux] + [face.controls[order[k]] for k in range(4)]
        # sequencer labels first, then parity labels to physical levels
        maps = [dict(seq_maps[0])] + [
            {lab: _label_to_level(sets[order[k]], seq_maps[k + 1].get(lab, lab)) for lab in range(2)}
            if len(sets[order[k]]) == 2 else dict(seq_maps[k + 1])
            for k in range(4)
        ]
    betas = tr.solve(thetas)
    return _emit_walk(wires, ctrl_w, plaq[t], tr.g_words, betas, "Z", subs[t], tr.corrections, maps).gates


_PAIR_ORDERS: dict[tuple, tuple[tuple[int, ...], tuple[int, ...], bool]] = {}


def _paired_orders(pqrs: tuple[int, int, int, int], f1: FaceWires, f2: FaceWires,
                   wires: list[Wire]) -> tuple[tuple[int, ...], tuple[int, ...], bool]:
    """Control orders for both faces, and whether face 2 runs its walk reversed.

    The walk unitary is diagonal on every input, so reversing its gate order
    leaves it unchanged. Depth depends on angles only through which gates
    exist, so placeholder angles are enough. Ties keep the earliest choice.
    """
    key = (pqrs, f1, f2)
    if key in _PAIR_ORDERS:
        return _PAIR_ORDERS[key]
    op = _operator(3)
    t1, t2 = op.term(pqrs), op.term(reflected_pqrs(pqrs))
    best = None
    for o1 in alternate_orders(t1.pqrs):
        a = _alt_face_cc(t1, 1.0, f1, wires, o1)
        for o2 in alternate_orders(t2.pqrs):
            b = _alt_face_cc(t2, 1.0, f2, wires, o2)
            for rev in (False, True):
                dep = asap_depth(_interleave(a, b[::-1] if rev else b))
                if best is None or dep < best[0]:
                    best = (dep, o1, o2, rev)
            if best[0] <= len(a):
                break
        if best[0] <= len(a):
            break
    _PAIR_ORDERS[key] = best[1:]
    return _PAIR_ORDERS[key]


def control_gate(pqrs: Sequence[int], controls: Sequence[int], ctrl_aux: tuple[int, int], copy_aux: int,
                 wires: list[Wire]) -> list[GateOp]:
    """OR over control links outside their allowed levels, plus one GCX copying the result."""
    d = 3
    sets = gated_corners(pqrs)
    gated = [i for i in range(4) if len(sets[i]) == 2]
    if not gated:
        return []
    ins = [controls[i] for i in gated]
    det = [next(v for v in range(d) if v not in sets[i]) for i in gated]
    out = ctrl_aux[1]
    if len(gated) == 4:
        g = _or_left(ins[:2], [{det[0]}, {det[1]}], ctrl_aux[0], wires)
        g += _or_left(ins[2:], [{det[2]}, {det[3]}], ctrl_aux[1], wires)
        g += combine_gate(ctrl_aux[0], ctrl_aux[1])
    elif len(gated) == 3:
        g = or3_qutrit(ins, det, out, wires)
    elif len(gated) == 2:
        g = _or_left(ins, [{det[0]}, {det[1]}], out, wires)
    else:
        raise SynthesisError(f"unexpected gated corner count {len(gated)}")
    return g + [gcx(out, 1, copy_aux, (0, 1))]


def alternate_term_blocks(
    terms: tuple[su2.GGGGTerm, su2.GGGGTerm], tau: float, faces: Sequence[FaceWires], wires: list[Wire],
    ctrl_aux: tuple[int, int], copy_aux: int,
) -> list[tuple[str, list[GateOp]]]:
    """Blocks for a term on face 1 and its reflected partner on face 2 (d = 3)."""
    d = 3
    f1, f2 = faces
    if tuple(f2.controls) != tuple(reversed(f1.controls)):
        raise SynthesisError("alternate pairing needs faces listing shared control links in reverse")
    if terms[1].pqrs != reflected_pqrs(terms[0].pqrs):
        raise SynthesisError("face-2 term must be the reflection of the face-1 term")
    cgate = control_gate(terms[0].pqrs, f1.controls, ctrl_aux, copy_aux, wires)
    parts = []
    for fi, (term, face) in enumerate(zip(terms, faces)):
        subs = term_subspaces(term.pqrs)
        t = rotation_target(term.pqrs)
        others = [i for i in range(4) if i != t]
        plaq = list(face.plaquette)
        detect = [spectator_level(subs[i], d) for i in others]
        pg = or3_qutrit([plaq[i] for i in others], detect, face.aux, wires)
        xp = xparity_subroutine(term.pqrs, plaq)
        comb = combine_gate(ctrl_aux[1] if fi == 0 else copy_aux, face.aux) if cgate else []
        parts.append((pg, xp, comb))
    (pg1, xp1, cb1), (pg2, xp2, cb2) = parts
    o1, o2, rev = _paired_orders(terms[0].pqrs, f1, f2, wires)
    cc1 = _alt_face_cc(terms[0], tau, f1, wires, o1)
    cc2 = _alt_face_cc(terms[1], tau, f2, wires, o2)
    if rev:
        cc2.reverse()
    out: list[tuple[str, list[GateOp]]] = [
        ("pgate", _interleave(pg1, pg2)),
        ("xparity", _interleave(xp1, xp2)),
    ]
    if cgate:
        out += [("cgate", cgate), ("combine", _interleave(cb1, cb2))]
    out.append(("cc", _interleave(cc1, cc2)))
    if cgate:
        out += [("combine_inv", _interleave(_reversed_gates(cb1), _reversed_gates(cb2))),
                ("cgate_inv", _reversed_gates(cgate))]
    out += [
        ("xparity_inv", _interleave(_reversed_gates(xp1), _reversed_gates(xp2))),
        ("pgate_inv", _interleave(_reversed_gates(pg1), _reversed_gates(pg2))),
    ]
    return out


def alternate_register(wiring: CubeWiring | None = None) -> list[Wire]:
    """12 links, two plaquette aux, two control-gating aux, one copy aux: 17 qutrits."""
    labels = list(LINK_NAMES) + ["aux_p0", "aux_p1", "aux_c0", "aux_c1", "aux_copy"]
    return make_wires([3] * 17, labels)


def compile_alternate_pair(face1: str, face2: str, tau: float) -> Circuit:
    """Alternate two-face plaquette evolution at d = 3 on the 17-qutrit register."""
    if not CubeWiring.opposite(face1, face2):
        raise SynthesisError(f"faces {face1} and {face2} are not opposite")
    wiring = CubeWiring()
    wires = alternate_register()
    faces = (wiring.face(face1, 12), wiring.face(face2, 13))
    op = _operator(3)
    c = Circuit(wires)
    for term in op.terms:
        pair = (term, op.term(reflected_pqrs(term.pqrs)))
        for name, gates in alternate_term_blocks(pair, tau, faces, wires, (14, 15), 16):
            c.extend(gates, block=f"{term.pqrs}:{name}")
    return c


def compile_alternate_term(term: su2.GGGGTerm, tau: float, face1: str = "A", face2: str = "Abar") -> Circuit:
    wiring = CubeWiring()
    wires = alternate_register()
    faces = (wiring.face(face1, 12), wiring.face(face2, 13))
    pair = (term, _operator(3).term(reflected_pqrs(term.pqrs)))
    c = Circuit(wires)
    for name, gates in alternate_term_blocks(pair, tau, faces, wires, (14, 15), 16):
        c.extend(gates, block=name)
    return c


# closed-form resource tables --------------------------------------------------


def qudit_resource_formulas(d: int) -> dict[str, ResourceReport]:
    """Upper-bound rows for the general-d decomposition of one plaquette."""
    if d < 2:
        raise ValueError("d must be >= 2")
    n = (d - 1) ** 4
    d4 = d**4
    return {
        "cc": ResourceReport(gcx=2 * d4 + 4, rz=2 * d4, x=1, h=0, depth=4 * d4 + 5),
        "and_gate": ResourceReport(gcx=10, rz=0, x=0, h=0, depth=10),
        "xparity": ResourceReport(gcx=3, rz=0, x=0, h=4, depth=3),
        "term": ResourceReport(gcx=2 * d4 + 30, rz=2 * d4, x=1, h=8, depth=4 * d4 + 31),
        "plaquette": ResourceReport(gcx=n * (2 * d4 + 30), rz=2 * n * d4, x=n, h=8 * n, depth=n * (4 * d4 + 31)),
    }


def compiled_depths(c: Circuit) -> dict[str, int]:
    from .ir import additive_depth

    return {"asap": asap_depth(c.gates), "additive": additive_depth(c)}
