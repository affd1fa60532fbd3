"""Decomposition of uniformly and conditionally controlled two-level rotations,
subspace-gating subcircuits, and peephole rewrites.

Multiplexed rotations are laid out along a Gray-ordered walk of the control
words: one rotation per word, one GCX between consecutive words, and a few
closing gates that undo the net target flips. The rotation angles follow from
a ``+-1`` sign matrix that records which GCX gates fire for each control word.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .ir import Circuit, GateOp, Wire, gcx, gray_sequence_mixed, make_wires, rot, xgate

Word = tuple[int, ...]


class SynthesisError(ValueError):
    pass


@dataclass(frozen=True)
class ControlSequence:
    words: tuple[Word, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        if not self.words:
            raise SynthesisError("empty control sequence")
        k = len(self.dims)
        seen = set()
        for w in self.words:
            if len(w) != k:
                raise SynthesisError(f"word {w} has wrong length")
            if any(not 0 <= x < d for x, d in zip(w, self.dims)):
                raise SynthesisError(f"word {w} does not fit dims {self.dims}")
            if w in seen:
                raise SynthesisError(f"duplicate word {w}")
            seen.add(w)

    @classmethod
    def of(cls, words: Iterable[Sequence[int]], dims: Sequence[int]) -> "ControlSequence":
        ws = sorted(tuple(int(x) for x in w) for w in words)
        return cls(tuple(ws), tuple(int(d) for d in dims))

    @classmethod
    def full(cls, dims: Sequence[int]) -> "ControlSequence":
        return cls(tuple(itertools.product(*[range(d) for d in dims])), tuple(dims))

    def __len__(self) -> int:
        return len(self.words)


@dataclass
class AngleTransform:
    """Everything needed to turn target angles into the emitted ones."""

    M: np.ndarray
    b_words: list[Word]
    g_words: list[Word]
    corrections: list[tuple[int, int, int]] = field(default_factory=list)

    def solve(self, thetas: Sequence[float]) -> np.ndarray:
        return np.linalg.solve(self.M, np.asarray(thetas, dtype=float))


# sign matrices -------------------------------------------------------------


def build_M(b_words: Sequence[Word], g_words: Sequence[Word]) -> np.ndarray:
    """Sign matrix with ``M[i, j] = prod_l (-1)^[0 < b_l <= g_l]``."""
    if len(b_words) != len(g_words):
        raise SynthesisError("b and g sequences differ in length")
    b = np.asarray(b_words, dtype=int)
    g = np.asarray(g_words, dtype=int)
    if b.shape != g.shape:
        raise SynthesisError("b and g words differ in length")
    hit = (b[:, None, :] > 0) & (b[:, None, :] <= g[None, :, :])
    return np.where(hit.sum(axis=2) % 2 == 1, -1, 1).astype(int)


def transition(prev: Word, new: Word) -> tuple[int, int]:
    """(wire, control value) of the GCX between two words differing in one digit."""
    diff = [i for i, (a, b) in enumerate(zip(prev, new)) if a != b]
    if len(diff) != 1:
        raise SynthesisError(f"{prev} -> {new} is not a single-digit step")
    w = diff[0]
    return w, max(prev[w], new[w])


def transitions(prev: Word, new: Word) -> list[tuple[int, int]]:
    """Like ``transition`` but allows several changed digits, one GCX each.

    Sparse control sets can force such jumps between neighbouring leaves.
    """
    diff = [i for i, (a, b) in enumerate(zip(prev, new)) if a != b]
    if not diff:
        raise SynthesisError(f"repeated word {new}")
    return [(w, max(prev[w], new[w])) for w in diff]


def fired_sign_matrix(rows: Sequence[Word], steps: Sequence[list[tuple[int, int]]]) -> np.ndarray:
    """Sign of every rotation for every physical control word.

    ``steps[j]`` lists the (wire, value) GCX gates that act between rotation
    ``j - 1`` and rotation ``j``; a row's sign flips once per gate it fires.
    """
    r = np.asarray(rows, dtype=int)
    parity = np.zeros(len(rows), dtype=int)
    out = np.empty((len(rows), len(steps)), dtype=int)
    for j, gates in enumerate(steps):
        for w, v in gates:
            parity ^= (r[:, w] == v).astype(int)
        out[:, j] = 1 - 2 * parity
    return out


def closing_gates(gcx_list: Sequence[tuple[int, int]], dims: Sequence[int]) -> list[tuple[str, int, int]]:
    """Gates that make every (wire, value) fire an even number of times.

    Returns ("GCX", wire, value) and ("X", -1, -1) items. A complete run of
    values 1..d-1 on a wire with d > 2 becomes a control-on-0 GCX plus X, and
    the X gates cancel pairwise.
    """
    odd: dict[int, set[int]] = {}
    for w, v in gcx_list:
        odd.setdefault(w, set()).symmetric_difference_update({v})
    out: list[tuple[str, int, int]] = []
    n_x = 0
    for w in sorted(odd):
        vals = odd[w]
        if not vals:
            continue
        d = dims[w]
        if d > 2 and vals == set(range(1, d)):
            out.append(("GCX", w, 0))
            n_x += 1
        else:
            out.extend(("GCX", w, v) for v in sorted(vals))
    if n_x % 2:
        out.append(("X", -1, -1))
    return out


# uniformly controlled rotations ---------------------------------------------


def _emit_walk(
    wires: list[Wire],
    ctrl_wires: Sequence[int],
    target: int,
    g_words: Sequence[Word],
    betas: Sequence[float],
    axis: str,
    subspace: tuple[int, int],
    corrections: Sequence[tuple[int, int, int]] = (),
    value_maps: Sequence[dict[int, int]] | None = None,
) -> Circuit:
    kind = {"Y": "RY", "Z": "RZ", "RY": "RY", "RZ": "RZ"}[axis]
    dims = [wires[w].dim for w in ctrl_wires]
    vm = value_maps or [dict() for _ in ctrl_wires]
    phys = lambda w, v: vm[w].get(v, v)  # noqa: E731
    corr: dict[int, list[tuple[int, int]]] = {}
    for col, w, v in corrections:
        corr.setdefault(col, []).append((w, v))
    c = Circuit(wires)
    fired: list[tuple[int, int]] = []
    for j, (word, beta) in enumerate(zip(g_words, betas)):
        if j:
            for w, v in transitions(g_words[j - 1], word):
                pv = phys(w, v)
                fired.append((w, pv))
                c.append(gcx(ctrl_wires[w], pv, target, subspace))
        pre = corr.get(j, [])
        for w, v in pre:
            c.append(gcx(ctrl_wires[w], v, target, subspace))
        c.append(rot(kind, target, subspace, beta))
        for w, v in reversed(pre):
            c.append(gcx(ctrl_wires[w], v, target, subspace))
    for kind_, w, v in closing_gates(fired, dims):
        if kind_ == "GCX":
            c.append(gcx(ctrl_wires[w], v, target, subspace))
        else:
            c.append(xgate(target, subspace))
    return c


def walk_steps(g_words: Sequence[Word],
               value_maps: Sequence[dict[int, int]] | None = None) -> list[list[tuple[int, int]]]:
    """Per-rotation lists of fired (wire, physical value) for ``fired_sign_matrix``."""
    k = len(g_words[0])
    vm = value_maps or [dict() for _ in range(k)]
    steps: list[list[tuple[int, int]]] = []
    for j in range(len(g_words)):
        if j == 0:
            steps.append([])
        else:
            steps.append([(w, vm[w].get(v, v)) for w, v in transitions(g_words[j - 1], g_words[j])])
    return steps


def _apply_corrections(M: np.ndarray, rows: Sequence[Word], corrections) -> np.ndarray:
    out = M.copy()
    r = np.asarray(rows, dtype=int)
    for col, w, v in corrections:
        out[r[:, w] == v, col] *= -1
    return out


def ucr_transform(dims: Sequence[int]) -> AngleTransform:
    seq = ControlSequence.full(dims)
    g = gray_sequence_mixed(dims)
    b = list(seq.words)
    M = fired_sign_matrix(b, walk_steps(g))
    return AngleTransform(M, b, g)


def ucr_synthesize(
    k: int,
    d: int | Sequence[int],
    axis: str,
    thetas: Sequence[float],
    subspace: tuple[int, int] = (0, 1),
    target_dim: int | None = None,
) -> Circuit:
    """Uniformly controlled rotation over all words of ``k`` control qudits.

    Wires 0..k-1 are the controls (first is most significant), wire k is the
    target. ``thetas`` is indexed by the control word in counting order.
    """
    dims = [d] * k if isinstance(d, int) else list(d)
    if len(dims) != k:
        raise SynthesisError("dims length must equal k")
    tr = ucr_transform(dims)
    if len(thetas) != len(tr.b_words):
        raise SynthesisError(f"expected {len(tr.b_words)} angles, got {len(thetas)}")
    betas = tr.solve(thetas)
    tdim = target_dim or max(max(dims), subspace[1] + 1)
    wires = make_wires(dims + [tdim], [f"c{i}" for i in range(k)] + ["t"])
    return _emit_walk(wires, list(range(k)), k, tr.g_words, betas, axis, subspace)


def ucr_formula(d: int, k: int) -> dict[str, int]:
    gcx_n = d**k if d % 2 == 0 else d**k + k - 1
    if d > 2 and d % 2 == 0:
        x = 1
    elif d % 2 == 1 and k % 2 == 1:
        x = 1
    else:
        x = 0
    return {"gcx": gcx_n, "rz": d**k, "x": x}


# sequencers ------------------------------------------------------------------


@dataclass
class SequencerResult:
    b_words: list[Word]  # aligned with the physical control words (rows)
    g_words: list[Word]  # rotation order (columns)
    g_physical: list[Word]  # physical word reached by each rotation
    value_maps: list[dict[int, int]]  # label -> physical value, per wire, from normalization


def sequencers(seq: ControlSequence) -> SequencerResult:
    """d-ary and Gray sequencers followed by the first-word normalizer."""
    words = list(seq.words)
    k = len(seq.dims)
    # node: (physical prefix, gray labels, dary labels)
    layer: list[tuple[Word, Word, Word]] = [((), (), ())]
    for depth in range(k):
        children_of: dict[Word, list[int]] = {}
        for w in words:
            children_of.setdefault(w[:depth], [])
            if w[depth] not in children_of[w[:depth]]:
                children_of[w[:depth]].append(w[depth])
        nxt: list[tuple[Word, Word, Word]] = []
        multi_seen = 0
        # single children left of every branch copy the first label to their right
        lead = 0
        for prefix, _, _ in layer:
            kids = sorted(children_of[prefix])
            if len(kids) > 1:
                lead = kids[0]
                break
        for prefix, glab, blab in layer:
            kids = sorted(children_of[prefix])
            if len(kids) == 1:
                g_label = nxt[-1][1][-1] if nxt else lead
                b_label = 0
                nxt.append((prefix + (kids[0],), glab + (g_label,), blab + (b_label,)))
                continue
            if multi_seen % 2 == 1:
                kids = kids[::-1]
            multi_seen += 1
            for x in kids:
                nxt.append((prefix + (x,), glab + (x,), blab + (x,)))
        layer = nxt
    phys_order = [p for p, _, _ in layer]
    g_tilde = [g for _, g, _ in layer]
    b_of = {p: b for p, _, b in layer}
    b_tilde = [b_of[w] for w in words]
    # normalizer: per-wire label swap sending the first Gray word to zeros
    first = g_tilde[0]
    swaps = [dict() if v == 0 else {0: v, v: 0} for v in first]
    sw = lambda word: tuple(s.get(x, x) for s, x in zip(swaps, word))  # noqa: E731
    b_first = b_tilde[0]
    bswaps = [dict() if v == 0 else {0: v, v: 0} for v in b_first]
    bsw = lambda word: tuple(s.get(x, x) for s, x in zip(bswaps, word))  # noqa: E731
    return SequencerResult(
        b_words=[bsw(b) for b in b_tilde],
        g_words=[sw(g) for g in g_tilde],
        g_physical=phys_order,
        value_maps=swaps,
    )


# conditionally controlled rotations -----------------------------------------


def _first_null_support(M: np.ndarray) -> list[int]:
    """Support of the nullspace vector attached to the first free column of rref(M)."""
    rows = [[Fraction(int(x)) for x in r] for r in M]
    n_r, n_c = len(rows), len(rows[0])
    pivots: list[int] = []
    r = 0
    for col in range(n_c):
        piv = next((i for i in range(r, n_r) if rows[i][col] != 0), None)
        if piv is None:
            free = col
            support = [free] + [p for i, p in enumerate(pivots) if rows[i][free] != 0]
            return sorted(support)
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n_r):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == n_r:
            break
    return []


def correct_singular_M(
    M: np.ndarray, rows: Sequence[Word], dims: Sequence[int]
) -> list[tuple[int, int, int]]:
    """Search column sign flips (GCX conjugations) until M has full rank.

    Candidate columns are the support of the nullspace vector belonging to the
    first free column of the reduced row echelon form, lowest index first;
    for each column, wires ascending then values ascending. A candidate is
    kept only when it raises the rank.
    """
    n = M.shape[0]
    if M.shape != (n, n):
        raise SynthesisError("M must be square")
    cur = M.astype(int).copy()
    r = np.asarray(rows, dtype=int)
    rank = np.linalg.matrix_rank(cur)
    found: list[tuple[int, int, int]] = []
    while rank < n:
        accepted = False
        for col in _first_null_support(cur):
            for w in range(len(dims)):
                for v in range(dims[w]):
                    mask = r[:, w] == v
                    if not mask.any():
                        continue
                    trial = cur.copy()
                    trial[mask, col] *= -1
                    new_rank = np.linalg.matrix_rank(trial)
                    if new_rank > rank:
                        cur, rank = trial, new_rank
                        found.append((col, w, v))
                        accepted = True
                        break
                if accepted:
                    break
            if accepted:
                break
        if not accepted:
            raise SynthesisError(f"correction search exhausted at rank {rank}/{n}")
    return found


def ccr_transform(seq: ControlSequence, correct: bool = True) -> AngleTransform:
    res = sequencers(seq)
    rows = list(seq.words)
    M = fired_sign_matrix(rows, walk_steps(res.g_words, value_maps=res.value_maps))
    corrections: list[tuple[int, int, int]] = []
    if correct and np.linalg.matrix_rank(M) < len(rows):
        corrections = correct_singular_M(M, rows, seq.dims)
        M = _apply_corrections(M, rows, corrections)
    return AngleTransform(M, res.b_words, res.g_words, corrections)


def ccr_synthesize(
    seq: ControlSequence,
    axis: str,
    thetas: Sequence[float],
    subspace: tuple[int, int] = (0, 1),
    target_dim: int | None = None,
    transform: AngleTransform | None = None,
) -> Circuit:
    """Rotation multiplexed over the words of ``seq`` only.

    Valid only when the control register is restricted to words of ``seq``;
    other inputs get some unspecified rotation.
    """
    if len(thetas) != len(seq):
        raise SynthesisError(f"expected {len(seq)} angles, got {len(thetas)}")
    tr = transform or ccr_transform(seq)
    if np.linalg.matrix_rank(tr.M) < len(seq):
        raise SynthesisError("sign matrix is singular")
    betas = tr.solve(thetas)
    res_maps = sequencers(seq).value_maps
    k = len(seq.dims)
    tdim = target_dim or max(max(seq.dims), subspace[1] + 1)
    wires = make_wires(list(seq.dims) + [tdim], [f"c{i}" for i in range(k)] + ["t"])
    return _emit_walk(wires, list(range(k)), k, tr.g_words, betas, axis, subspace,
                      tr.corrections, res_maps)


def ccr_gates(
    seq: ControlSequence,
    ctrl_wires: Sequence[int],
    target: int,
    wires: list[Wire],
    axis: str,
    thetas: Sequence[float],
    subspace: tuple[int, int],
    transform: AngleTransform | None = None,
) -> list[GateOp]:
    """Same as ``ccr_synthesize`` but placed on given wires of a larger register."""
    tr = transform or ccr_transform(seq)
    betas = tr.solve(thetas)
    maps = sequencers(seq).value_maps
    c = _emit_walk(wires, list(ctrl_wires), target, tr.g_words, betas, axis, subspace,
                   tr.corrections, maps)
    return c.gates


# gating subcircuits ----------------------------------------------------------

GATING_VARIANTS = ("AND", "OR", "OR3_QUTRIT", "OR_WIDE")


@dataclass(frozen=True)
class GatingSpec:
    levels: tuple[frozenset[int], ...]  # per guarded wire: accepted (AND) or detected (OR) levels
    guarded: tuple[int, ...]
    aux: int
    variant: str = "AND"

    def __post_init__(self):
        if self.variant not in GATING_VARIANTS:
            raise SynthesisError(f"unknown gating variant {self.variant}")
        if len(self.levels) != len(self.guarded):
            raise SynthesisError("one level set per guarded wire")


@dataclass
class GatingCircuit:
    spec: GatingSpec
    circuit: Circuit
    aux_flip: bool = False  # trailing X01 on aux from a De Morgan rewrite


def _ladder_pairs(k: int, final: int = 1) -> list[tuple[int, tuple[int, int]]]:
    # forward 0->2->3->...->k->final, then uncompute the intermediate hops
    fwd = []
    lvl = 0
    for i in range(k):
        nxt = final if i == k - 1 else i + 2
        fwd.append((i, (min(lvl, nxt), max(lvl, nxt))))
        lvl = nxt
    back = [fwd[i] for i in range(k - 2, -1, -1)]
    return fwd + back


def and_verifier(spec: GatingSpec, wires: list[Wire]) -> GatingCircuit:
    """Aux goes 0 -> 1 iff every guarded wire is in its accepted set.

    Each ladder element is one GCX per accepted level, all applying the same
    aux transposition.
    """
    k = len(spec.guarded)
    da = wires[spec.aux].dim
    if da <= k and k > 1:
        raise SynthesisError(f"aux dim {da} must exceed the number of guarded wires {k}")
    c = Circuit(wires)
    if k == 1:
        (lv,) = spec.levels
        for v in sorted(lv):
            c.append(gcx(spec.guarded[0], v, spec.aux, (0, 1)))
        return GatingCircuit(spec, c)
    for i, sub in _ladder_pairs(k):
        for v in sorted(spec.levels[i]):
            c.append(gcx(spec.guarded[i], v, spec.aux, sub))
    return GatingCircuit(spec, c)


def _or_left(guarded, detect, aux, wires) -> list[GateOp]:
    k = len(guarded)
    gates = []
    fwd = [(i, (0, i + 2)) for i in range(k - 1)] + [(k - 1, (0, 1))]
    back = [(i, (1, i + 2)) for i in range(k - 2, -1, -1)]
    for i, sub in fwd + back:
        for v in sorted(detect[i]):
            gates.append(gcx(guarded[i], v, aux, sub))
    return gates


def qudit_toffoli(d: int, wires: list[Wire] | None = None, c1: int = 0, c2: int = 1, target: int = 2,
                  v1: int = 1) -> Circuit:
    """Flip X01 on the target when c1 = v1 and c2 = 1.

    Uses 2d - 1 GCX. For d = 3 it is exact on every input; for larger d the
    second control must be confined to levels {0, 1, d - 1}.
    """
    wires = wires or make_wires([d, d, 2], ["c1", "c2", "t"])
    m = d - 1
    cyc = [(0, j) for j in range(2, m + 1)]
    c = Circuit(wires)
    c.append(gcx(c1, v1, target, (0, 1)))
    c.extend(gcx(c1, v1, c2, s) for s in cyc)
    c.append(gcx(c2, 0, target, (0, 1)))
    c.extend(gcx(c1, v1, c2, s) for s in reversed(cyc))
    c.append(gcx(c2, 0, target, (0, 1)))
    return c


def or3_qutrit(guarded: Sequence[int], detect: Sequence[int], aux: int, wires: list[Wire]) -> list[GateOp]:
    """Three-input qutrit OR: 6 GCX, one X01, depth 6.

    ``detect[i]`` is the level that counts as a hit on wire i.
    """
    a, b, c = guarded
    va, vb, vc = detect
    u1, u2 = sorted(set(range(3)) - {vc})
    return [
        gcx(a, va, aux, (0, 2)),
        gcx(b, vb, c, (u1, u2)),
        gcx(c, u1, aux, (0, 1)),
        gcx(b, vb, c, (u1, u2)),
        gcx(c, u2, aux, (0, 1)),
        xgate(aux, (0, 1)),
        gcx(a, va, aux, (1, 2)),
    ]


def combine_gate(a: int, b: int) -> list[GateOp]:
    """b ends in 1 iff a or b held 1 (inputs in {0, 1}); a is left dirty."""
    return [xgate(a, (1, 2)), gcx(b, 1, a, (1, 2)), gcx(a, 2, b, (0, 1))]


def or_gate(
    k: int,
    d: int,
    aux_dims: int | Sequence[int],
    variant: str = "OR",
    detect: int | Sequence[int] = 1,
) -> GatingCircuit:
    """Qudit OR writing 1 on the aux when any input equals its detect level.

    Register layout: k inputs of dim d, then the aux wire(s).
    """
    dets = [detect] * k if isinstance(detect, int) else list(detect)
    ad = [aux_dims] if isinstance(aux_dims, int) else list(aux_dims)
    guarded = tuple(range(k))
    if variant == "OR3_QUTRIT":
        if k != 3 or d != 3 or ad[0] != 3:
            raise SynthesisError("OR3_QUTRIT needs three qutrit inputs and a qutrit aux")
        wires = make_wires([3, 3, 3, 3], ["in0", "in1", "in2", "aux"])
        c = Circuit(wires, or3_qutrit(guarded, dets, 3, wires))
    elif variant == "OR":
        da = ad[0]
        wires = make_wires([d] * k + [da], [f"in{i}" for i in range(k)] + ["aux"])
        if da > k:
            c = Circuit(wires, _or_left(guarded, [{v} for v in dets], k, wires))
        elif da == k and k >= 2:
            c = Circuit(wires, _or_right(guarded, dets, k, wires, d))
        else:
            raise SynthesisError(f"OR with k={k} needs aux dim >= k, got {da}")
    elif variant == "OR_WIDE":
        if k != 4 or len(ad) != 2 or min(ad) < 3:
            raise SynthesisError("OR_WIDE is built for four inputs and two aux qudits of dim >= 3")
        wires = make_wires([d] * 4 + ad, [f"in{i}" for i in range(4)] + ["aux0", "aux1"])
        g = _or_left((0, 1), [{dets[0]}, {dets[1]}], 4, wires)
        g += _or_left((2, 3), [{dets[2]}, {dets[3]}], 5, wires)
        c = Circuit(wires, g + combine_gate(4, 5))
    else:
        raise SynthesisError(f"unsupported variant {variant}")
    levels = tuple(frozenset({v}) for v in dets)
    return GatingCircuit(GatingSpec(levels, guarded, k, variant), c)


def _or_right(guarded, dets, aux, wires, d) -> list[GateOp]:
    k = len(guarded)
    fwd = [(i, (0, i + 2)) for i in range(k - 2)]
    back = [(i, (1, i + 2)) for i in range(k - 3, -1, -1)]
    gates = [gcx(guarded[i], dets[i], aux, s) for i, s in fwd]
    # OR of the last two inputs on the aux 01 subspace: hit(b) + hit(c) + toffoli(b, c),
    # where the toffoli's leading gate cancels hit(b)
    b, c = guarded[k - 2], guarded[k - 1]
    vb, vc = dets[k - 2], dets[k - 1]
    # relabel c so that its detect level plays the role of 1 and level 0 stays 0 if possible
    tof = qudit_toffoli(d, wires, c1=b, c2=c, target=aux, v1=vb).gates[1:]
    if vc != 1:
        perm = {1: vc, vc: 1}
        tof = [_relabel_control(g, c, perm) for g in tof]
    gates += tof
    gates.append(gcx(c, vc, aux, (0, 1)))
    gates += [gcx(guarded[i], dets[i], aux, s) for i, s in back]
    return gates


def _relabel_control(g: GateOp, wire: int, perm: dict[int, int]) -> GateOp:
    ctrls = tuple((w, perm.get(v, v) if w == wire else v) for w, v in g.controls)
    if g.target == wire:
        i, j = (perm.get(x, x) for x in g.subspace)
        return replace(g, controls=ctrls, subspace=(min(i, j), max(i, j)))
    return replace(g, controls=ctrls)


def demorgan_dual(gc: GatingCircuit, wires: list[Wire] | None = None) -> GatingCircuit:
    """AND over accepted sets <-> X01 on aux after OR over the complements."""
    spec = gc.spec
    wires = wires or gc.circuit.wires
    comp = tuple(frozenset(range(wires[w].dim)) - lv for w, lv in zip(spec.guarded, spec.levels))
    if spec.variant == "AND" and not gc.aux_flip:
        new = GatingSpec(comp, spec.guarded, spec.aux, "OR")
        g = _or_left(spec.guarded, [sorted(c) for c in comp], spec.aux, wires)
        c = Circuit(wires, g + [xgate(spec.aux, (0, 1))])
        return GatingCircuit(new, c, aux_flip=True)
    if spec.variant == "OR" and gc.aux_flip:
        return and_verifier(GatingSpec(comp, spec.guarded, spec.aux, "AND"), wires)
    raise SynthesisError("input is not an AND gate or a De Morgan OR form")


# peephole rewrites -----------------------------------------------------------


def gcx_run_optimize(c: Circuit) -> Circuit:
    """Replace adjacent GCX runs over control values 1..d-1 by GCX(0) + X."""
    dims = c.dims
    out: list[GateOp] = []
    gates = c.gates
    i = 0
    while i < len(gates):
        g = gates[i]
        if g.kind == "GCX" and len(g.controls) == 1:
            w, _ = g.controls[0]
            d = dims[w]
            run = gates[i:i + d - 1]
            if d > 2 and len(run) == d - 1 and all(
                h.kind == "GCX" and len(h.controls) == 1 and h.controls[0][0] == w
                and h.target == g.target and h.subspace == g.subspace for h in run
            ) and sorted(h.controls[0][1] for h in run) == list(range(1, d)):
                out.append(gcx(w, 0, g.target, g.subspace))
                out.append(xgate(g.target, g.subspace))
                i += d - 1
                continue
        out.append(g)
        i += 1
    return Circuit(list(c.wires), out)


@dataclass
class HadamardReport:
    circuit: Circuit
    leftover: list[int]  # output positions of H gates that could not be absorbed


def hadamard_eliminate(c: Circuit) -> HadamardReport:
    """Push H gates through the circuit until they meet their partner.

    The frame maps wire -> H subspace. Gates are rewritten into the frame:
    GCX with both ends framed on matching upper levels flip direction, GCX
    with only the target framed become controlled phases, and rotations
    about Z and X trade places. Anything else flushes the involved H gates.
    """
    frame: dict[int, tuple[int, int]] = {}
    out: list[GateOp] = []
    leftover: list[int] = []

    def flush(w: int) -> None:
        s = frame.pop(w)
        leftover.append(len(out))
        out.append(GateOp("H", s, w))

    def ctrl_ok(w: int, v: int) -> bool:
        return w not in frame or v not in frame[w]

    for g in c.gates:
        if g.kind == "H":
            s = frame.get(g.target)
            if s == g.subspace:
                del frame[g.target]
            elif s is None:
                frame[g.target] = g.subspace
            else:
                flush(g.target)
                frame[g.target] = g.subspace
            continue
        t = g.target
        ft = frame.get(t)
        # controls first: framed controls on levels inside the frame are not expressible
        bad_ctrls = [w for w, v in g.controls if not ctrl_ok(w, v)]
        if g.kind in ("GCX", "X"):
            disjoint = ft is None or not set(ft) & set(g.subspace)
            if disjoint:
                for w in bad_ctrls:
                    flush(w)
                out.append(g)
                continue
            if ft == g.subspace:
                if g.kind == "GCX" and len(g.controls) == 1 and bad_ctrls:
                    w, v = g.controls[0]
                    fw = frame[w]
                    if v == fw[1]:
                        out.append(gcx(t, ft[1], w, fw))
                        continue
                if not bad_ctrls:
                    # X -> Z on the target subspace: a phase of -1 on the upper level
                    out.append(GateOp("PHASE", (ft[1], ft[1]), t, g.controls, math.pi))
                    continue
            for w in bad_ctrls:
                flush(w)
            flush(t)
            out.append(g)
            continue
        if g.kind in ("RZ", "RX", "RY"):
            for w in bad_ctrls:
                flush(w)
            if ft is None or not set(ft) & set(g.subspace):
                out.append(g)
            elif ft == g.subspace:
                if g.kind == "RZ":
                    out.append(replace(g, kind="RX"))
                elif g.kind == "RX":
                    out.append(replace(g, kind="RZ"))
                else:
                    out.append(replace(g, angle=-g.angle))  # type: ignore[operator]
            else:
                flush(t)
                out.append(g)
            continue
        if g.kind == "PHASE":
            for w in bad_ctrls:
                flush(w)
            if ft is not None and g.subspace[0] in ft:
                flush(t)
            out.append(g)
            continue
        raise SynthesisError(f"unhandled gate kind {g.kind}")
    for w in sorted(frame):
        flush(w)
    return HadamardReport(Circuit(list(c.wires), out, []), leftover)


# alternate decomposition of a controlled Z-string ---------------------------


def alt_paired_angle_decompose(
    n: int, k: int, phi: float, control_word: Sequence[int] | None = None, d: int = 3
) -> Circuit:
    """exp(-i phi P Z01^(k+1)) as 2^k sign-paired controlled RZ gates.

    P projects the first ``n`` wires onto ``control_word``; the Z string acts
    on the next k + 1 wires, whose 01 patterns on the first k select the sign.
    """
    word = list(control_word) if control_word is not None else [1] * n
    if len(word) != n:
        raise SynthesisError("control word length must equal n")
    dims = [d] * (n + k + 1)
    labels = [f"c{i}" for i in range(n)] + [f"z{i}" for i in range(k + 1)]
    c = Circuit(make_wires(dims, labels))
    last = n + k
    for bits in itertools.product((0, 1), repeat=k):
        sign = -1 if sum(bits) % 2 else 1
        ctrls = [(i, v) for i, v in enumerate(word)] + [(n + i, b) for i, b in enumerate(bits)]
        c.append(rot("RZ", last, (0, 1), 2 * phi * sign, ctrls))
    return c
