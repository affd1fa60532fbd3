"""Statevector simulation over mixed-radix qudit registers.

Two storage layouts share one gate semantics: a dense amplitude array indexed
by the mixed-radix word (wire 0 most significant) and a sparse layout holding
only non-zero amplitudes. The sparse layout is what makes repeated Trotter
steps on the 14-qutrit cube register cheap, since the state never leaves a
few thousand basis words.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ir import Circuit, GateOp

UNITARY_CAP = 3**9


def gate_matrix(g: GateOp) -> np.ndarray:
    """2x2 block acting on the gate's (i, j) levels."""
    if g.kind in ("GCX", "X"):
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if g.kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    half = 0.5 * float(g.angle)  # type: ignore[arg-type]
    c, s = math.cos(half), math.sin(half)
    if g.kind == "RZ":
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]])
    if g.kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if g.kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]])
    raise ValueError(f"no 2x2 block for {g.kind}")


def thread_count() -> int:
    raw = os.environ.get("QGVC_THREADS")
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


class StateVector:
    """Dense amplitudes, reshaped to the register dimensions for slicing."""

    def __init__(self, dims: Sequence[int], amps: np.ndarray | None = None):
        self.dims = tuple(int(d) for d in dims)
        size = math.prod(self.dims)
        if amps is None:
            amps = np.zeros(size, dtype=complex)
            amps[0] = 1.0
        amps = np.asarray(amps, dtype=complex)
        if amps.size != size:
            raise ValueError("amplitude count does not match dims")
        self.amps = amps.reshape(self.dims).copy()

    @classmethod
    def basis(cls, dims: Sequence[int], word: Sequence[int]) -> "StateVector":
        sv = cls(dims)
        sv.amps[...] = 0
        sv.amps[tuple(word)] = 1.0
        return sv

    def flat(self) -> np.ndarray:
        return self.amps.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def apply(self, g: GateOp) -> "StateVector":
        apply_gate(self, g)
        return self

    def run(self, c: Circuit) -> "StateVector":
        if tuple(c.dims) != self.dims:
            raise ValueError("circuit dims do not match state")
        for g in c.gates:
            apply_gate(self, g)
        return self

    def probabilities(self, wire: int) -> np.ndarray:
        axes = tuple(i for i in range(len(self.dims)) if i != wire)
        return np.sum(np.abs(self.amps) ** 2, axis=axes)


def apply_gate(sv: StateVector, g: GateOp) -> None:
    """In-place update; controls select a strided slice, the target mixes two levels."""
    n = len(sv.dims)
    if g.target >= n or any(w >= n for w, _ in g.controls):
        raise ValueError("gate references a wire outside the state")
    d = sv.dims[g.target]
    i, j = g.subspace
    if not (0 <= i < d and 0 <= j < d):
        raise ValueError(f"subspace {g.subspace} does not fit dim {d}")
    idx: list = [slice(None)] * n
    for w, v in g.controls:
        if not 0 <= v < sv.dims[w]:
            raise ValueError(f"control value {v} does not fit dim {sv.dims[w]}")
        idx[w] = v
    if g.kind == "PHASE":
        idx[g.target] = i
        sv.amps[tuple(idx)] *= np.exp(-1j * float(g.angle))  # type: ignore[arg-type]
        return
    ia = list(idx)
    ib = list(idx)
    ia[g.target] = i
    ib[g.target] = j
    # trailing Ellipsis keeps a view even when every axis is pinned
    a = sv.amps[tuple(ia) + (Ellipsis,)]
    b = sv.amps[tuple(ib) + (Ellipsis,)]
    if g.kind in ("GCX", "X"):
        tmp = a.copy()
        a[...] = b
        b[...] = tmp
        return
    if g.kind == "RZ":
        half = 0.5 * float(g.angle)  # type: ignore[arg-type]
        a *= complex(math.cos(half), -math.sin(half))
        b *= complex(math.cos(half), math.sin(half))
        return
    m = gate_matrix(g)
    a0 = a.copy()
    a[...] = m[0, 0] * a0 + m[0, 1] * b
    b[...] = m[1, 0] * a0 + m[1, 1] * b


def circuit_unitary(c: Circuit, cap: int = UNITARY_CAP) -> np.ndarray:
    """Dense unitary; column k is the circuit applied to basis state k."""
    dims = c.dims
    size = math.prod(dims)
    if size > cap:
        raise ValueError(f"register of size {size} exceeds cap {cap}")
    # evolve all basis states at once by carrying a trailing batch axis
    batch = np.eye(size, dtype=complex).reshape(tuple(dims) + (size,))
    sv = StateVector.__new__(StateVector)
    sv.dims = tuple(dims) + (size,)
    sv.amps = batch
    for g in c.gates:
        apply_gate(sv, g)
    return sv.amps.reshape(size, size)


def strides_for(dims: Sequence[int]) -> np.ndarray:
    out = np.ones(len(dims), dtype=np.int64)
    for k in range(len(dims) - 2, -1, -1):
        out[k] = out[k + 1] * dims[k + 1]
    return out


class SparseState:
    """Non-zero amplitudes with one digit row per wire.

    Storing digits instead of flat indices makes every gate a handful of
    vectorized compares on small integers. Flat indices are rebuilt only
    when amplitudes must be merged.
    """

    def __init__(self, dims: Sequence[int], index: np.ndarray, amps: np.ndarray, tol: float = 1e-15):
        self.dims = tuple(int(x) for x in dims)
        self.tol = tol
        self.amps = np.asarray(amps, dtype=complex).copy()
        self._st = strides_for(self.dims)
        index = np.asarray(index, dtype=np.int64)
        dtype = np.int8 if max(self.dims) <= 127 else np.int64
        self.digits = np.empty((len(self.dims), len(index)), dtype=dtype)
        for w in range(len(self.dims)):
            self.digits[w] = (index // self._st[w]) % self.dims[w]

    @property
    def index(self) -> np.ndarray:
        return self._st @ self.digits

    @classmethod
    def basis(cls, dims: Sequence[int], word: Sequence[int]) -> "SparseState":
        st = strides_for(dims)
        k = int(np.dot(st, np.asarray(word, dtype=np.int64)))
        return cls(tuple(dims), np.array([k], dtype=np.int64), np.array([1.0 + 0j]))

    @classmethod
    def from_dense(cls, sv: StateVector, tol: float = 0.0) -> "SparseState":
        flat = sv.flat()
        nz = np.nonzero(np.abs(flat) > tol)[0]
        return cls(sv.dims, nz.astype(np.int64), flat[nz])

    def to_dense(self) -> StateVector:
        out = StateVector(self.dims)
        flat = np.zeros(math.prod(self.dims), dtype=complex)
        np.add.at(flat, self.index, self.amps)
        out.amps = flat.reshape(self.dims)
        return out

    def __len__(self) -> int:
        return len(self.amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def wire_digits(self, wire: int) -> np.ndarray:
        return self.digits[wire]

    def run(self, c: Circuit) -> "SparseState":
        if tuple(c.dims) != self.dims[: len(c.dims)]:
            raise ValueError("circuit dims do not match state")
        for g in c.gates:
            self.apply(g)
        return self

    def apply(self, g: GateOp) -> "SparseState":
        t = g.target
        dig = self.digits[t]
        i, j = g.subspace
        mask = None
        for w, v in g.controls:
            m = self.digits[w] == v
            mask = m if mask is None else mask & m
        if g.kind == "PHASE":
            sel = dig == i if mask is None else mask & (dig == i)
            self.amps[sel] *= np.exp(-1j * float(g.angle))  # type: ignore[arg-type]
            return self
        if g.kind in ("GCX", "X"):
            sel = (dig == i) | (dig == j)
            if mask is not None:
                sel &= mask
            # masked ufuncs avoid fancy-index copies on the hot path
            np.subtract(i + j, dig, out=dig, where=sel, dtype=dig.dtype)
            return self
        on_i = dig == i
        on_j = dig == j
        if mask is not None:
            on_i &= mask
            on_j &= mask
        if g.kind == "RZ":
            half = 0.5 * float(g.angle)  # type: ignore[arg-type]
            np.multiply(self.amps, complex(math.cos(half), -math.sin(half)), out=self.amps, where=on_i)
            np.multiply(self.amps, complex(math.cos(half), math.sin(half)), out=self.amps, where=on_j)
            return self
        active = on_i | on_j
        if not active.any():
            return self
        m2 = gate_matrix(g)
        sub = self.digits[:, active]
        amp_a = self.amps[active]
        from_i = sub[t] == i
        col = np.where(from_i, 0, 1)
        lo = sub.copy()
        lo[t] = i
        hi = sub.copy()
        hi[t] = j
        # every active entry feeds both partner words; merge duplicates by flat key
        cand = np.concatenate([lo, hi], axis=1)
        new_amp = np.concatenate([m2[0, col] * amp_a, m2[1, col] * amp_a])
        keys = self._st @ cand
        uniq, first, inv = np.unique(keys, return_index=True, return_inverse=True)
        summed = np.zeros(len(uniq), dtype=complex)
        np.add.at(summed, inv, new_amp)
        nz = np.abs(summed) > self.tol
        keep = ~active
        self.digits = np.concatenate([self.digits[:, keep], cand[:, first[nz]]], axis=1)
        self.amps = np.concatenate([self.amps[keep], summed[nz]])
        return self

    def compact(self) -> None:
        order = np.argsort(self.index, kind="stable")
        self.digits = self.digits[:, order]
        self.amps = self.amps[order]


# operator checks on selected inputs -------------------------------------------


@dataclass
class SparseOperator:
    """Columns of an operator given as (row, col, value) triples."""

    shape: tuple[int, int]
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    def columns(self) -> dict[int, dict[int, complex]]:
        out: dict[int, dict[int, complex]] = {}
        for r, c, v in zip(self.rows.tolist(), self.cols.tolist(), self.vals.tolist()):
            col = out.setdefault(c, {})
            col[r] = col.get(r, 0) + v
        return out


def circuit_columns(c: Circuit, inputs: Sequence[Sequence[int]], tol: float = 1e-14) -> SparseOperator:
    """Run many basis inputs at once by tagging each with a batch digit."""
    dims = tuple(c.dims)
    n = len(inputs)
    st = strides_for(dims)
    flat = np.asarray(inputs, dtype=np.int64) @ st
    size = math.prod(dims)
    state = SparseState(dims + (n,), flat * n + np.arange(n), np.ones(n, dtype=complex), tol)
    # the batch digit is the last axis; gates never touch it
    state.run(c)
    idx = state.index
    return SparseOperator((size, size), idx // n, flat[idx % n], state.amps)


def columns_gap(a: SparseOperator, b: SparseOperator, global_phase: bool = True) -> float:
    """Largest entrywise gap over the columns present in ``b``, after one shared phase fix."""
    ca, cb = a.columns(), b.columns()
    phase = 1.0 + 0j
    if global_phase:
        for col in sorted(cb):
            for r, v in sorted(cb[col].items()):
                if abs(v) > 1e-8:
                    w = ca.get(col, {}).get(r, 0)
                    if abs(w) > 1e-8:
                        phase = v / w
                        phase /= abs(phase)
                    break
            else:
                continue
            break
    worst = 0.0
    for col, ent in cb.items():
        got = ca.get(col, {})
        for r in set(ent) | set(got):
            worst = max(worst, abs(got.get(r, 0) * phase - ent.get(r, 0)))
    return worst


def term_oracle(term, tau: float, d: int, inputs: Sequence[Sequence[int]], aux_dims: Sequence[int] = ()) -> SparseOperator:
    """exp(-i tau (sum_Pi) XXXX) for one term on words (plaquette pqrs, controls ijkl, aux...).

    Inside a term's block each pair of words related by flipping all four
    plaquette links within their subspaces mixes as a cos / -i sin rotation
    by tau * phi; every other word is left alone.
    """
    dims = (d,) * 8 + tuple(aux_dims)
    st = strides_for(dims)
    phi = term.phi_map()
    rows, cols, vals = [], [], []
    for w in inputs:
        w = tuple(int(x) for x in w)
        col = int(np.dot(st, w))
        plaq, ctl = w[:4], w[4:8]
        v = phi.get(ctl)
        inside = all(x in (s, s + 1) for x, s in zip(plaq, term.pqrs))
        if v is None or not inside:
            rows.append(col)
            cols.append(col)
            vals.append(1.0 + 0j)
            continue
        partner = tuple(s + (x == s) for x, s in zip(plaq, term.pqrs)) + w[4:]
        rows += [col, int(np.dot(st, partner))]
        cols += [col, col]
        vals += [complex(math.cos(tau * v)), -1j * math.sin(tau * v)]
    size = math.prod(dims)
    return SparseOperator((size, size), np.array(rows), np.array(cols), np.array(vals))


# cube physics -----------------------------------------------------------------


@dataclass
class PhysicalBasis:
    states: np.ndarray  # (n, 12) link words, increasing mixed-radix order
    d: int

    def __post_init__(self):
        self.index = {tuple(int(x) for x in s): i for i, s in enumerate(self.states)}

    def __len__(self) -> int:
        return len(self.states)

    def flat(self, dims: Sequence[int]) -> np.ndarray:
        st = strides_for(dims)[: self.states.shape[1]]
        return self.states.astype(np.int64) @ st


def vertex_links(edges) -> dict[tuple[int, ...], list[int]]:
    out: dict[tuple[int, ...], list[int]] = {}
    for i, (a, b) in enumerate(edges):
        out.setdefault(a, []).append(i)
        out.setdefault(b, []).append(i)
    return out


def enumerate_physical_basis(d: int = 3) -> PhysicalBasis:
    """All 12-link words passing the triad test at every cube vertex."""
    import itertools

    from .compiler import CUBE_EDGES
    from .su2 import triad_ok

    inc = list(vertex_links(CUBE_EDGES).values())
    words = np.array(list(itertools.product(range(d), repeat=len(CUBE_EDGES))), dtype=np.int8)
    keep = np.ones(len(words), dtype=bool)
    for a, b, c in inc:
        x, y, z = words[:, a].astype(int), words[:, b].astype(int), words[:, c].astype(int)
        keep &= ((x + y + z) % 2 == 0) & (np.abs(x - y) <= z) & (z <= x + y)
    states = words[keep]
    assert all(triad_ok(*(int(s[i]) for i in inc[0])) for s in states[:5])
    return PhysicalBasis(states, d)


def casimir(v) -> np.ndarray:
    """j(j+1) for doubled spin labels."""
    j = np.asarray(v, dtype=float) / 2
    return j * (j + 1)


def face_links(face: str = "A") -> tuple[int, ...]:
    from .compiler import FACE_TABLE

    return FACE_TABLE[face][0]


def magnetic_matrix(basis: PhysicalBasis, op=None) -> np.ndarray:
    """Sum of the six face plaquette operators (plus conjugates) on the physical basis."""
    from .compiler import FACE_TABLE
    from .su2 import build_plaquette_operator, plaquette_matrix_action

    op = op or build_plaquette_operator(basis.d)
    n = len(basis)
    B = np.zeros((n, n))
    for plaq, ctrl in FACE_TABLE.values():
        for a, s in enumerate(basis.states):
            word = [int(s[i]) for i in ctrl] + [int(s[i]) for i in plaq]
            for new, amp in plaquette_matrix_action(op, word):
                t = [int(x) for x in s]
                for k, i in enumerate(ctrl):
                    t[i] = new[k]
                for k, i in enumerate(plaq):
                    t[i] = new[4 + k]
                B[basis.index[tuple(t)], a] += amp
    return B


def hamiltonian(basis: PhysicalBasis, g2: float, op=None) -> np.ndarray:
    e2 = casimir(basis.states).sum(axis=1)
    return np.diag(0.5 * g2 * e2) - magnetic_matrix(basis, op) / g2


def electric_face_observable(basis: PhysicalBasis, g2: float, face: str = "A") -> np.ndarray:
    return 0.5 * g2 * casimir(basis.states[:, list(face_links(face))]).sum(axis=1)


def time_grid(t0: float, tmax: float, dt: float) -> np.ndarray:
    """t0, t0 + dt, ... up to tmax inclusive."""
    if dt <= 0 or tmax < t0 or t0 < 0:
        raise ValueError("need dt > 0 and 0 <= t0 <= tmax")
    n = int(math.floor((tmax - t0) / dt + 1e-9)) + 1
    return np.round(t0 + dt * np.arange(n), 12)


@dataclass
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    label: str = "H_E_face"

    def to_csv(self) -> str:
        lines = [f"t,{self.label}"]
        lines += [f"{t:.10g},{v:.13f}" for t, v in zip(self.times, self.values)]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        import json

        return json.dumps({"label": self.label, "t": [float(t) for t in self.times],
                           "value": [float(v) for v in self.values]}, indent=2)


def exact_evolution(g2: float, times: Sequence[float], face: str = "A", d: int = 3,
                    basis: PhysicalBasis | None = None) -> TimeSeries:
    """Electric energy of one face from the vacuum, by eigendecomposition in the physical basis."""
    basis = basis or enumerate_physical_basis(d)
    H = hamiltonian(basis, g2)
    ev, U = np.linalg.eigh(H)
    psi0 = np.zeros(len(basis))
    psi0[basis.index[(0,) * basis.states.shape[1]]] = 1.0
    c0 = U.T @ psi0
    obs = electric_face_observable(basis, g2, face)
    out = []
    for t in times:
        psi = U @ (np.exp(-1j * ev * t) * c0)
        out.append(float(np.real(np.vdot(psi, obs * psi))))
    return TimeSeries(np.asarray(times, dtype=float), np.array(out))


def face_observable_sparse(state: SparseState, g2: float, face: str = "A") -> float:
    e = np.zeros(len(state))
    for w in face_links(face):
        e += casimir(state.digits[w])
    return float(0.5 * g2 * np.sum(np.abs(state.amps) ** 2 * e))


def trotter_simulate(g2: float, times: Sequence[float], n_trotter: int, face: str = "A", d: int = 3,
                     style: str = "auto") -> TimeSeries:
    """Repeated compiled Trotter steps on the sparse vacuum state."""
    from .compiler import EvolutionParams, compile_trotter_step

    if n_trotter < 1:
        raise ValueError("n_trotter must be >= 1")

    def one(t: float) -> float:
        c = compile_trotter_step(d, EvolutionParams(g2, float(t), n_trotter), style)
        state = SparseState.basis(c.dims, [0] * len(c.dims))
        for _ in range(n_trotter):
            state.run(c)
        return face_observable_sparse(state, g2, face)

    # time points are independent; map keeps their order
    with ThreadPoolExecutor(max_workers=min(thread_count(), max(1, len(times)))) as pool:
        out = list(pool.map(one, times))
    return TimeSeries(np.asarray(times, dtype=float), np.array(out))


def face_term_pairs(basis: PhysicalBasis, face: str, term) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index pairs (a, b, phi) of physical states mixed by one term on one face."""
    from .compiler import FACE_TABLE

    plaq, ctrl = FACE_TABLE[face]
    phi = term.phi_map()
    S = basis.states.astype(int)
    ctl = S[:, list(ctrl)]
    pl = S[:, list(plaq)]
    lo = np.array(term.pqrs)
    inside = np.all((pl == lo) | (pl == lo + 1), axis=1)
    a_idx, b_idx, ph = [], [], []
    for a in np.nonzero(inside)[0]:
        v = phi.get(tuple(ctl[a].tolist()))
        if v is None:
            continue
        new = S[a].copy()
        new[list(plaq)] = np.where(pl[a] == lo, lo + 1, lo)
        b = basis.index[tuple(new.tolist())]
        if a < b:
            a_idx.append(a)
            b_idx.append(b)
            ph.append(v)
    return np.array(a_idx, dtype=np.int64), np.array(b_idx, dtype=np.int64), np.array(ph)


def apply_face_term(psi: np.ndarray, pairs, tau: float) -> None:
    a, b, ph = pairs
    # trailing axes let psi hold many columns at once
    shape = (-1,) + (1,) * (psi.ndim - 1)
    c, s = np.cos(tau * ph).reshape(shape), np.sin(tau * ph).reshape(shape)
    pa, pb = psi[a].copy(), psi[b].copy()
    psi[a] = c * pa - 1j * s * pb
    psi[b] = c * pb - 1j * s * pa


def analytic_trotter_series(g2: float, times: Sequence[float], n_trotter: int, face: str = "A",
                            d: int = 3, basis: PhysicalBasis | None = None) -> TimeSeries:
    """Same product formula as the compiled step, applied directly in the physical basis."""
    from .compiler import FACE_PAIRS
    from .su2 import build_plaquette_operator

    basis = basis or enumerate_physical_basis(d)
    op = build_plaquette_operator(d)
    order = [f for pair in FACE_PAIRS for f in pair]
    pairs = [[face_term_pairs(basis, f, t) for t in op.terms] for f in order]
    e2 = casimir(basis.states).sum(axis=1)
    obs = electric_face_observable(basis, g2, face)
    out = []
    for t in times:
        psi = np.zeros(len(basis), dtype=complex)
        psi[basis.index[(0,) * basis.states.shape[1]]] = 1.0
        tau = -t / (g2 * n_trotter)
        for _ in range(n_trotter):
            psi *= np.exp(-0.5j * g2 * e2 * t / n_trotter)
            for face_pairs in pairs:
                for p in face_pairs:
                    apply_face_term(psi, p, tau)
        out.append(float(np.real(np.vdot(psi, obs * psi))))
    return TimeSeries(np.asarray(times, dtype=float), np.array(out))
