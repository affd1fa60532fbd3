import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgvc.compiler import qutrit_sequence
from qgvc.ir import Circuit, GateOp, gcx, hgate, make_wires, resource_report, rot
from qgvc.sim import StateVector, circuit_unitary
from qgvc.synthesis import (
    ControlSequence,
    GatingSpec,
    SynthesisError,
    alt_paired_angle_decompose,
    and_verifier,
    build_M,
    ccr_synthesize,
    ccr_transform,
    correct_singular_M,
    demorgan_dual,
    gcx_run_optimize,
    hadamard_eliminate,
    or_gate,
    qudit_toffoli,
    sequencers,
    ucr_formula,
    ucr_synthesize,
    ucr_transform,
)

from conftest import all_words, block_rotation
from strategies import circuits

D1 = [(0, 0), (0, 2), (1, 1), (2, 0), (2, 2)]


def _words(ws):
    return ["".join(map(str, w)) for w in ws]


def _ucr_reference(dims, tdim, axis, thetas, sub=(0, 1)):
    blocks = []
    for w, th in zip(itertools.product(*[range(d) for d in dims]), thetas):
        b = np.eye(tdim, dtype=complex)
        r = block_rotation(axis, th)
        b[np.ix_(sub, sub)] = r
        blocks.append(b)
    n = len(blocks) * tdim
    out = np.zeros((n, n), dtype=complex)
    for i, b in enumerate(blocks):
        out[i * tdim:(i + 1) * tdim, i * tdim:(i + 1) * tdim] = b
    return out


# M matrix -----------------------------------------------------------------


def test_build_M_qubit():
    assert build_M([(0,), (1,)], [(0,), (1,)]).tolist() == [[1, 1], [1, -1]]
    with pytest.raises(SynthesisError):
        build_M([(0,)], [(0,), (1,)])


def test_build_M_ququart_row():
    tr = ucr_transform([4, 4])
    M = build_M(tr.b_words, tr.g_words)
    i = tr.b_words.index((1, 3))
    assert i == 7
    col = {g: M[i, j] for j, g in enumerate(tr.g_words)}
    assert col[(0, 0)] == 1 and col[(1, 3)] == 1
    assert col[(0, 3)] == -1 and col[(1, 0)] == -1 and col[(3, 2)] == -1


@pytest.mark.parametrize("d,k", [(d, k) for d in (2, 3, 4) for k in (1, 2, 3)])
def test_full_gray_M_is_invertible(d, k):
    tr = ucr_transform([d] * k)
    assert np.linalg.matrix_rank(build_M(tr.b_words, tr.g_words)) == d**k


# UCR ----------------------------------------------------------------------


@pytest.mark.parametrize("d,k", [(d, k) for d in range(2, 6) for k in (1, 2, 3)])
def test_ucr_counts_match_closed_form(d, k):
    c = ucr_synthesize(k, d, "Z", np.linspace(-1, 1, d**k))
    rep = resource_report(c)
    f = ucr_formula(d, k)
    assert (rep.gcx, rep.rz, rep.x) == (f["gcx"], f["rz"], f["x"])


def test_ucr_examples():
    assert ucr_formula(3, 2) == {"gcx": 10, "rz": 9, "x": 0}
    assert ucr_formula(4, 2) == {"gcx": 16, "rz": 16, "x": 1}
    assert ucr_formula(2, 1) == {"gcx": 2, "rz": 2, "x": 0}
    with pytest.raises(SynthesisError):
        ucr_synthesize(2, 3, "Z", [0.1] * 8)


@pytest.mark.parametrize("d,k", [(d, k) for d in (2, 3, 4) for k in (1, 2)])
@pytest.mark.parametrize("axis", ["Z", "Y"])
def test_ucr_unitary(d, k, axis):
    rng = np.random.default_rng(100 * d + k)
    for _ in range(50 if k == 1 else 15):
        th = rng.uniform(-np.pi, np.pi, d**k)
        c = ucr_synthesize(k, d, axis, th)
        u = circuit_unitary(c)
        ref = _ucr_reference([d] * k, c.wires[-1].dim, axis, th)
        assert np.abs(u - ref).max() < 1e-10


def test_ucr_on_upper_subspace():
    th = np.array([0.3, -1.2, 0.8])
    c = ucr_synthesize(1, 3, "Y", th, subspace=(1, 2))
    ref = _ucr_reference([3], 3, "Y", th, sub=(1, 2))
    assert np.abs(circuit_unitary(c) - ref).max() < 1e-10


# sequencers and CCR ---------------------------------------------------------


def test_sparse_two_qutrit_sequencers():
    res = sequencers(ControlSequence.of(D1, (3, 3)))
    assert _words(res.g_words) == ["00", "02", "12", "22", "20"]
    assert _words(res.b_words) == ["00", "02", "10", "20", "22"]


def test_full_sequence_gives_gray_and_counting():
    res = sequencers(ControlSequence.full((3, 3)))
    assert _words(res.g_words) == ["00", "01", "02", "12", "11", "10", "20", "21", "22"]
    assert _words(res.b_words) == _words(all_words((3, 3)))


def test_mixed_dims_M_is_invertible():
    tr = ccr_transform(ControlSequence.full((2, 3)), correct=False)
    assert np.linalg.matrix_rank(tr.M) == 6


def test_empty_sequence_is_rejected():
    with pytest.raises(SynthesisError):
        ControlSequence.of([], (3,))


def _check_ccr(seq, axis, thetas, c):
    tdim = c.wires[-1].dim
    dims = c.dims
    u = circuit_unitary(c)
    st = [math.prod(dims[i + 1:]) for i in range(len(dims))]
    for w, th in zip(seq.words, thetas):
        r = block_rotation(axis, th)
        base = sum(x * s for x, s in zip(w, st))
        sub = u[base:base + tdim, base:base + tdim]
        want = np.eye(tdim, dtype=complex)
        want[:2, :2] = r
        col = u[:, base:base + tdim]
        assert np.abs(np.abs(col).sum() - np.abs(sub).sum()) < 1e-9
        assert np.abs(sub - want).max() < 1e-10


def test_five_word_sequence():
    seq = ControlSequence.of(D1, (3, 3))
    th = [0.1, -0.4, 0.9, 1.3, -2.0]
    c = ccr_synthesize(seq, "Z", th)
    rots = [i for i, g in enumerate(c.gates) if g.kind == "RZ"]
    assert len(rots) == 5
    assert sum(g.kind == "GCX" for g in c.gates[: rots[-1]]) == 4
    _check_ccr(seq, "Z", th, c)


@settings(max_examples=20, deadline=None)
@given(st.sets(st.sampled_from(all_words((3, 3))), min_size=1, max_size=9), st.integers(0, 10**6))
def test_ccr_random_subsets_of_two_qutrits(words, seed):
    seq = ControlSequence.of(words, (3, 3))
    tr = ccr_transform(seq)
    assert np.linalg.matrix_rank(tr.M) == len(seq)
    th = np.random.default_rng(seed).uniform(-np.pi, np.pi, len(seq))
    for axis in ("Z", "Y"):
        _check_ccr(seq, axis, th, ccr_synthesize(seq, axis, th, transform=tr))


def test_qutrit_82_word_sequence_needs_six_corrections():
    seq = qutrit_sequence()
    assert len(seq) == 82
    tr = ccr_transform(seq)
    assert len(tr.corrections) == 6
    assert np.linalg.matrix_rank(tr.M) == 82
    c = ccr_synthesize(seq, "Z", np.linspace(-1, 1, 82), transform=tr)
    rep = resource_report(c)
    assert (rep.gcx, rep.rz, rep.depth) == (94, 82, 176)
    plain = ccr_transform(seq, correct=False)
    assert np.linalg.matrix_rank(plain.M) < 82


def test_correction_search_on_invertible_matrix():
    tr = ucr_transform([3, 3])
    assert correct_singular_M(tr.M, tr.b_words, (3, 3)) == []


def test_correction_search_flips_only_matching_rows():
    seq = qutrit_sequence()
    plain = ccr_transform(seq, correct=False)
    tr = ccr_transform(seq)
    rows = np.asarray(seq.words)
    diff = plain.M != tr.M
    for col, w, v in tr.corrections:
        assert set(np.nonzero(diff[:, col])[0]) <= set(np.nonzero(rows[:, w] == v)[0])


# gating ---------------------------------------------------------------------


def _basis_out(c, word):
    sv = StateVector.basis(c.dims, word).run(c)
    k = int(np.argmax(np.abs(sv.flat())))
    assert abs(sv.flat()[k]) == pytest.approx(1.0)
    return tuple(int(x) for x in np.unravel_index(k, c.dims))


def test_and_verifier_truth_table():
    s = frozenset({0, 1})
    wires = make_wires([3, 3, 3, 4])
    gc = and_verifier(GatingSpec((s, s, s), (0, 1, 2), 3), wires)
    rep = resource_report(gc.circuit)
    assert (rep.gcx, rep.depth) == (10, 10)
    for w in all_words((3, 3, 3)):
        out = _basis_out(gc.circuit, w + (0,))
        assert out[:3] == w
        assert out[3] == (1 if all(x in s for x in w) else 0)


def test_and_verifier_single_level():
    gc = and_verifier(GatingSpec((frozenset({2}),), (0,), 1), make_wires([3, 2]))
    assert resource_report(gc.circuit).gcx == 1


def test_and_verifier_rejects_small_aux():
    s = frozenset({0})
    with pytest.raises(SynthesisError):
        and_verifier(GatingSpec((s, s, s), (0, 1, 2), 3), make_wires([3, 3, 3, 3]))


@pytest.mark.parametrize("d", [3, 4, 5])
def test_or_left(d):
    gc = or_gate(2, d, 3, "OR", detect=[2, 1])
    rep = resource_report(gc.circuit)
    assert (rep.gcx, rep.depth) == (3, 3)
    for w in all_words((d, d)):
        out = _basis_out(gc.circuit, w + (0,))
        assert out == w + (int(w[0] == 2 or w[1] == 1),)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_or_right_qutrit(k):
    gc = or_gate(k, 3, k, "OR", detect=[2] * k)
    n = resource_report(gc.circuit).gcx
    if k == 3:
        assert n == 4 * k - 5
    if k > 3:
        assert n <= 4 * k - 5
    for w in all_words((3,) * k):
        out = _basis_out(gc.circuit, w + (0,))
        assert out == w + (int(2 in w),)


def test_or_right_restricted_for_larger_d():
    d = 5
    gc = or_gate(2, d, 2, "OR", detect=[1, 1])
    for a in range(d):
        for b in (0, 1, d - 1):
            assert _basis_out(gc.circuit, (a, b, 0)) == (a, b, int(a == 1 or b == 1))


def test_or3_qutrit():
    gc = or_gate(3, 3, 3, "OR3_QUTRIT", detect=[2, 2, 0])
    rep = resource_report(gc.circuit)
    assert (rep.gcx, rep.x, rep.depth) == (6, 1, 6)
    for w in all_words((3, 3, 3)):
        hit = w[0] == 2 or w[1] == 2 or w[2] == 0
        assert _basis_out(gc.circuit, w + (0,)) == w + (int(hit),)


def test_or_wide():
    gc = or_gate(4, 3, [3, 3], "OR_WIDE", detect=2)
    rep = resource_report(gc.circuit)
    assert (rep.gcx, rep.x, rep.depth) == (8, 1, 6)
    assert rep.aux_wires == 2 or len(gc.circuit.wires) == 6
    for w in all_words((3,) * 4):
        out = _basis_out(gc.circuit, w + (0, 0))
        assert out[:4] == w and out[5] == int(2 in w)


def test_or_rejects_unsupported():
    with pytest.raises(SynthesisError):
        or_gate(3, 3, 2, "OR")
    with pytest.raises(SynthesisError):
        or_gate(2, 3, 3, "OR3_QUTRIT")


@pytest.mark.parametrize("d", [3, 4, 5])
def test_qudit_toffoli(d):
    c = qudit_toffoli(d)
    rep = resource_report(c)
    assert (rep.gcx, rep.depth) == (2 * d - 1, 2 * d - 1)
    allowed = range(d) if d == 3 else (0, 1, d - 1)
    for a in range(d):
        for b in allowed:
            for t in (0, 1):
                assert _basis_out(c, (a, b, t)) == (a, b, t ^ int(a == 1 and b == 1))


def test_demorgan():
    s = frozenset({0, 1})
    wires = make_wires([3, 3, 3])
    gc = and_verifier(GatingSpec((s, s), (0, 1), 2), wires)
    dual = demorgan_dual(gc)
    assert dual.spec.variant == "OR" and dual.spec.levels == (frozenset({2}), frozenset({2}))
    for w in all_words((3, 3)):
        assert _basis_out(dual.circuit, w + (0,)) == _basis_out(gc.circuit, w + (0,))
    back = demorgan_dual(dual)
    assert np.abs(circuit_unitary(back.circuit) - circuit_unitary(gc.circuit)).max() < 1e-12
    with pytest.raises(SynthesisError):
        demorgan_dual(back.__class__(dual.spec, dual.circuit, aux_flip=False))


# rewrites -------------------------------------------------------------------


def test_gcx_run_example():
    w = make_wires([3, 3])
    c = Circuit(w, [gcx(0, 1, 1, (0, 1)), gcx(0, 2, 1, (0, 1))])
    out = gcx_run_optimize(c)
    assert [(g.kind, g.controls) for g in out.gates] == [("GCX", ((0, 0),)), ("X", ())]
    assert np.abs(circuit_unitary(out) - circuit_unitary(c)).max() < 1e-12
    plain = Circuit(w, [gcx(0, 1, 1, (0, 1))])
    assert gcx_run_optimize(plain).gates == plain.gates


@settings(max_examples=40, deadline=None)
@given(circuits(max_wires=3, max_gates=15))
def test_gcx_run_optimize_preserves_unitary(c):
    assert np.abs(circuit_unitary(gcx_run_optimize(c)) - circuit_unitary(c)).max() < 1e-10


def test_hadamard_flip_example():
    w = make_wires([3, 3])
    c = Circuit(w, [hgate(0, (0, 1)), hgate(1, (0, 1)), gcx(0, 1, 1, (0, 1)),
                    hgate(0, (0, 1)), hgate(1, (0, 1))])
    rep = hadamard_eliminate(c)
    assert rep.leftover == []
    assert [(g.kind, g.target, g.controls) for g in rep.circuit.gates] == [("GCX", 0, ((1, 1),))]
    assert np.abs(circuit_unitary(rep.circuit) - circuit_unitary(c)).max() < 1e-12


def test_hadamard_free_circuit_unchanged():
    w = make_wires([3, 3])
    c = Circuit(w, [gcx(0, 1, 1, (0, 1)), rot("RZ", 1, (0, 1), 0.3)])
    assert hadamard_eliminate(c).circuit.gates == c.gates


@settings(max_examples=60, deadline=None)
@given(circuits(max_wires=3, max_gates=15, kinds=("GCX", "H", "RZ", "RX", "X", "PHASE")))
def test_hadamard_eliminate_preserves_unitary(c):
    rep = hadamard_eliminate(c)
    assert np.abs(circuit_unitary(rep.circuit) - circuit_unitary(c)).max() < 1e-10
    assert sum(g.kind == "H" for g in rep.circuit.gates) == len(rep.leftover)


def test_alt_paired_counts():
    c = alt_paired_angle_decompose(1, 2, 0.4)
    angles = [g.angle for g in c.gates]
    assert len(angles) == 4 and sum(a > 0 for a in angles) == 2
    assert len(alt_paired_angle_decompose(2, 0, 0.4).gates) == 1


def test_alt_paired_matches_z_string():
    phi = 0.37
    c = alt_paired_angle_decompose(1, 2, phi, [1])
    u = circuit_unitary(c)
    st = [27, 9, 3, 1]
    for zs in itertools.product((0, 1), repeat=3):
        for ctl in range(3):
            k = ctl * 27 + sum(z * s for z, s in zip(zs, st[1:]))
            sign = np.prod([1 - 2 * z for z in zs])
            want = np.exp(-1j * phi * sign) if ctl == 1 else 1.0
            assert abs(u[k, k] - want) < 1e-12
    assert np.abs(u - np.diag(np.diag(u))).max() < 1e-14


@settings(max_examples=20, deadline=None)
@given(st.sets(st.sampled_from(all_words((2, 3, 3))), min_size=1, max_size=18), st.integers(0, 10**6))
def test_ccr_random_subsets_mixed_dims(words, seed):
    seq = ControlSequence.of(words, (2, 3, 3))
    th = np.random.default_rng(seed).uniform(-np.pi, np.pi, len(seq))
    _check_ccr(seq, "Z", th, ccr_synthesize(seq, "Z", th))


def test_sparse_leaf_jump_fires_one_gcx_per_digit():
    seq = ControlSequence.of([(0, 0), (0, 1), (0, 2), (1, 0), (1, 1)], (3, 3))
    th = [0.2, -0.3, 0.5, 1.1, -0.9]
    c = ccr_synthesize(seq, "Z", th)
    _check_ccr(seq, "Z", th, c)
