"""Circuit representation for mixed-dimension qudit registers.

Gates are two-level operations on a target wire, optionally conditioned on
other wires being in given levels. Rotations follow ``R_a(theta) = exp(-i theta a / 2)``
with ``a`` one of the two-level generators X, Y, Z on the gate subspace.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

GATE_KINDS = ("GCX", "X", "H", "RZ", "RY", "RX", "PHASE")
ROTATION_KINDS = ("RZ", "RY", "RX", "PHASE")
SELF_INVERSE = ("GCX", "X", "H")


@dataclass(frozen=True)
class Wire:
    index: int
    dim: int
    label: str = ""


@dataclass(frozen=True)
class GateOp:
    kind: str
    subspace: tuple[int, int]
    target: int
    controls: tuple[tuple[int, int], ...] = ()
    angle: float | None = None

    @property
    def wires(self) -> tuple[int, ...]:
        return (self.target,) + tuple(w for w, _ in self.controls)

    def is_rotation(self) -> bool:
        return self.kind in ROTATION_KINDS


def gcx(control: int, value: int, target: int, subspace: tuple[int, int]) -> GateOp:
    return GateOp("GCX", tuple(subspace), target, ((control, value),))


def xgate(target: int, subspace: tuple[int, int]) -> GateOp:
    return GateOp("X", tuple(subspace), target)


def hgate(target: int, subspace: tuple[int, int]) -> GateOp:
    return GateOp("H", tuple(subspace), target)


def rot(kind: str, target: int, subspace: tuple[int, int], angle: float,
        controls: Iterable[tuple[int, int]] = ()) -> GateOp:
    return GateOp(kind, tuple(subspace), target, tuple(tuple(c) for c in controls), normalize_angle(angle))


def normalize_angle(theta: float) -> float:
    """Map into (-2pi, 2pi]; keeps zero angles as zero."""
    period = 4 * math.pi
    t = math.fmod(theta, period)
    if t <= -2 * math.pi:
        t += period
    elif t > 2 * math.pi:
        t -= period
    return t


@dataclass
class Circuit:
    wires: list[Wire]
    gates: list[GateOp] = field(default_factory=list)
    # named gate ranges [start, stop) used for the subcircuit-additive depth
    blocks: list[tuple[str, int, int]] = field(default_factory=list)

    @property
    def dims(self) -> list[int]:
        return [w.dim for w in self.wires]

    def append(self, gate: GateOp) -> None:
        self.gates.append(gate)

    def extend(self, gates: Iterable[GateOp], block: str | None = None) -> None:
        start = len(self.gates)
        self.gates.extend(gates)
        if block is not None:
            self.blocks.append((block, start, len(self.gates)))

    def copy(self) -> "Circuit":
        return Circuit(list(self.wires), list(self.gates), list(self.blocks))

    def __len__(self) -> int:
        return len(self.gates)

    def to_dict(self) -> dict:
        gates = []
        for g in self.gates:
            item = {
                "kind": g.kind,
                "subspace": list(g.subspace),
                "target": g.target,
                "controls": [list(c) for c in g.controls],
            }
            if g.angle is not None:
                item["angle"] = g.angle
            gates.append(item)
        return {
            "wires": [{"index": w.index, "dim": w.dim, "label": w.label} for w in self.wires],
            "gates": gates,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "Circuit":
        wires = [Wire(int(w["index"]), int(w["dim"]), w.get("label", "")) for w in data["wires"]]
        gates = [
            GateOp(
                g["kind"],
                tuple(g["subspace"]),
                int(g["target"]),
                tuple((int(a), int(b)) for a, b in g.get("controls", [])),
                g.get("angle"),
            )
            for g in data["gates"]
        ]
        return cls(wires, gates)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


def make_wires(dims: Sequence[int], labels: Sequence[str] | None = None) -> list[Wire]:
    labels = labels or [""] * len(dims)
    return [Wire(i, d, lab) for i, (d, lab) in enumerate(zip(dims, labels))]


def _digits(n: int, dims: Sequence[int]) -> list[int]:
    out = []
    for d in reversed(dims):
        out.append(n % d)
        n //= d
    return out[::-1]


def gray_sequence_mixed(dims: Sequence[int]) -> list[tuple[int, ...]]:
    """Reflected Gray code over a mixed-radix register, first digit most significant."""
    words: list[tuple[int, ...]] = [()]
    for d in dims:
        nxt = []
        for i, w in enumerate(words):
            levels = range(d) if i % 2 == 0 else range(d - 1, -1, -1)
            nxt.extend(w + (v,) for v in levels)
        words = nxt
    return words


def gray_sequence(d: int, k: int) -> list[tuple[int, ...]]:
    if d < 2 or k < 1:
        raise ValueError("need d >= 2 and k >= 1")
    return gray_sequence_mixed([d] * k)


def counting_sequence(dims: Sequence[int]) -> list[tuple[int, ...]]:
    total = math.prod(dims)
    return [tuple(_digits(n, dims)) for n in range(total)]


@dataclass(frozen=True)
class ResourceReport:
    gcx: int = 0
    rz: int = 0
    x: int = 0
    h: int = 0
    depth: int = 0
    wires: int = 0
    aux_wires: int = 0
    additive_depth: int | None = None

    def as_row(self) -> dict[str, int]:
        row = {"gcx": self.gcx, "rz": self.rz, "x": self.x, "h": self.h, "depth": self.depth}
        if self.additive_depth is not None:
            row["additive_depth"] = self.additive_depth
        return row


def asap_depth(gates: Sequence[GateOp], n_wires: int | None = None) -> int:
    level: dict[int, int] = {}
    depth = 0
    for g in gates:
        ws = g.wires
        layer = max((level.get(w, 0) for w in ws), default=0) + 1
        for w in ws:
            level[w] = layer
        depth = max(depth, layer)
    return depth


def additive_depth(c: Circuit) -> int:
    """Sum of ASAP depths of the recorded blocks and of the gaps between them."""
    total = 0
    pos = 0
    for _, start, stop in sorted(c.blocks, key=lambda b: b[1]):
        if start < pos:
            continue  # nested block, already covered
        total += asap_depth(c.gates[pos:start])
        total += asap_depth(c.gates[start:stop])
        pos = stop
    total += asap_depth(c.gates[pos:])
    return total


def default_aux(w: Wire) -> bool:
    return w.label.startswith("aux")


def resource_report(c: Circuit, count_aux: Callable[[Wire], bool] = default_aux) -> ResourceReport:
    counts = {"GCX": 0, "ROT": 0, "X": 0, "H": 0}
    for g in c.gates:
        if g.kind in ROTATION_KINDS:
            counts["ROT"] += 1
        else:
            counts[g.kind] += 1
    return ResourceReport(
        gcx=counts["GCX"],
        rz=counts["ROT"],
        x=counts["X"],
        h=counts["H"],
        depth=asap_depth(c.gates),
        wires=len(c.wires),
        aux_wires=sum(1 for w in c.wires if count_aux(w)),
        additive_depth=additive_depth(c) if c.blocks else None,
    )


def compose(a: Circuit, b: Circuit) -> Circuit:
    """``a`` followed by ``b``; wire lists must agree."""
    if [(w.index, w.dim) for w in a.wires] != [(w.index, w.dim) for w in b.wires]:
        raise ValueError("wire mismatch")
    off = len(a.gates)
    blocks = list(a.blocks) + [(n, s + off, e + off) for n, s, e in b.blocks]
    return Circuit(list(a.wires), a.gates + b.gates, blocks)


def inverse_gate(g: GateOp) -> GateOp:
    if g.kind in SELF_INVERSE:
        return g
    return replace(g, angle=normalize_angle(-g.angle))  # type: ignore[operator]


def invert(c: Circuit) -> Circuit:
    n = len(c.gates)
    blocks = [(name + "^-1", n - e, n - s) for name, s, e in reversed(c.blocks)]
    return Circuit(list(c.wires), [inverse_gate(g) for g in reversed(c.gates)], blocks)


def mirror(c: Circuit) -> Circuit:
    n = len(c.gates)
    blocks = [(name, n - e, n - s) for name, s, e in reversed(c.blocks)]
    return Circuit(list(c.wires), list(reversed(c.gates)), blocks)


def remap(c: Circuit, wires: list[Wire], mapping: dict[int, int]) -> Circuit:
    """Re-express ``c`` on a larger register via ``mapping`` old index -> new index."""
    gates = [
        replace(g, target=mapping[g.target], controls=tuple((mapping[w], v) for w, v in g.controls))
        for g in c.gates
    ]
    return Circuit(wires, gates, list(c.blocks))


@dataclass(frozen=True)
class Diagnostic:
    gate_index: int
    message: str


def validate(c: Circuit) -> list[Diagnostic]:
    """Empty list when every gate is well formed."""
    out: list[Diagnostic] = []
    dims = {w.index: w.dim for w in c.wires}
    if sorted(dims) != list(range(len(c.wires))):
        out.append(Diagnostic(-1, "wire indices must be 0..n-1"))
    for i, g in enumerate(c.gates):
        if g.kind not in GATE_KINDS:
            out.append(Diagnostic(i, f"unknown gate kind {g.kind}"))
            continue
        if g.target not in dims:
            out.append(Diagnostic(i, f"target wire {g.target} does not exist"))
            continue
        lo, hi = g.subspace
        d = dims[g.target]
        if g.kind == "PHASE":
            if not (0 <= lo < d and lo == hi):
                out.append(Diagnostic(i, f"phase level {g.subspace} invalid on dim-{d} target"))
        elif not (0 <= lo < hi < d):
            out.append(Diagnostic(i, f"subspace {g.subspace} invalid on dim-{d} target"))
        if g.kind == "GCX" and not g.controls:
            out.append(Diagnostic(i, "GCX needs at least one control"))
        if g.kind in ROTATION_KINDS and g.angle is None:
            out.append(Diagnostic(i, "rotation without angle"))
        seen = set()
        for w, v in g.controls:
            if w not in dims:
                out.append(Diagnostic(i, f"control wire {w} does not exist"))
            elif not 0 <= v < dims[w]:
                out.append(Diagnostic(i, f"control value {v} invalid on dim-{dims[w]} wire {w}"))
            if w == g.target:
                out.append(Diagnostic(i, "control wire equals target"))
            if w in seen:
                out.append(Diagnostic(i, f"duplicate control wire {w}"))
            seen.add(w)
    return out
