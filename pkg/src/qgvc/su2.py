"""Truncated SU(2) plaquette operator with a gauge-variant completion.

Link values are stored as ``2j`` (the number of flux lines) so that half-integer
angular momenta stay exact. A plaquette is described by four plaquette links,
ordered counter-clockwise ``(q_l, j_a^b, q_r, j_a^t)``, and four control links
``(j_l^t, j_l^b, j_r^b, j_r^t)`` sitting at the corners between consecutive
plaquette links. A term ``pqrs`` assigns the two-level subspace ``(x, x+1)`` to
each plaquette link; a control word ``ijkl`` fixes the control links.

The 8-digit flux words used by :func:`plaquette_matrix_action` list the four
control digits first and then the four plaquette digits in ``pqrs`` order.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MAX_DIM = 9

# Dihedral images of the four plaquette link positions. Entry ``perm[a]`` is the
# old position whose index lands at new position ``a``.
D4_PERMS: tuple[tuple[int, int, int, int], ...] = (
    (0, 1, 2, 3),
    (1, 2, 3, 0),
    (2, 3, 0, 1),
    (3, 0, 1, 2),
    (3, 2, 1, 0),
    (2, 1, 0, 3),
    (1, 0, 3, 2),
    (0, 3, 2, 1),
)


@dataclass(frozen=True, order=True)
class HalfInt:
    """A non-negative half-integer stored as twice its value."""

    twice_value: int

    def __post_init__(self) -> None:
        if not isinstance(self.twice_value, (int, np.integer)):
            raise TypeError("twice_value must be an integer")

    @classmethod
    def of(cls, value: float | Fraction | int) -> "HalfInt":
        twice = Fraction(value) * 2
        if twice.denominator != 1:
            raise ValueError(f"{value} is not a half-integer")
        return cls(int(twice))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    def dim(self) -> int:
        return self.twice_value + 1

    def __add__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice_value + other.twice_value)

    def __sub__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice_value - other.twice_value)

    def __float__(self) -> float:
        return self.twice_value / 2

    def __repr__(self) -> str:
        t = self.twice_value
        return f"HalfInt({t // 2})" if t % 2 == 0 else f"HalfInt({t}/2)"


def triad_ok(a: int, b: int, c: int) -> bool:
    """Triangle inequality plus integer sum, for doubled arguments."""
    return (a + b + c) % 2 == 0 and abs(a - b) <= c <= a + b


def _delta_sq(a: int, b: int, c: int) -> Fraction:
    f = math.factorial
    return Fraction(
        f((a + b - c) // 2) * f((a - b + c) // 2) * f((b + c - a) // 2),
        f((a + b + c) // 2 + 1),
    )


@lru_cache(maxsize=None)
def six_j_twice(a: int, b: int, c: int, d: int, e: int, g: int) -> float:
    """Wigner 6j symbol {a/2 b/2 c/2; d/2 e/2 g/2} via the Racah sum."""
    triads = ((a, b, c), (a, e, g), (d, b, g), (d, e, c))
    if min(a, b, c, d, e, g) < 0 or not all(triad_ok(*t) for t in triads):
        return 0.0
    pref = Fraction(1)
    for t in triads:
        pref *= _delta_sq(*t)
    s = [sum(t) // 2 for t in triads]
    p = ((a + b + d + e) // 2, (a + c + d + g) // 2, (b + c + e + g) // 2)
    f = math.factorial
    total = 0
    for t in range(max(s), min(p) + 1):
        den = f(p[0] - t) * f(p[1] - t) * f(p[2] - t)
        for si in s:
            den *= f(t - si)
        total += Fraction((-1) ** t * f(t + 1), den)
    # the square root is the only inexact step
    num = total * total * pref
    mag = math.sqrt(num.numerator) / math.sqrt(num.denominator)
    return math.copysign(mag, total) if total != 0 else 0.0


def wigner_six_j(j1: HalfInt, j2: HalfInt, j3: HalfInt, j4: HalfInt, j5: HalfInt, j6: HalfInt) -> float:
    return six_j_twice(*(j.twice_value for j in (j1, j2, j3, j4, j5, j6)))


def _check_dim(d: int, lo: int = 2, hi: int | None = None) -> None:
    if not isinstance(d, (int, np.integer)) or d < lo or (hi is not None and d > hi):
        raise ValueError(f"dimension {d} out of range [{lo}, {hi}]")


def control_set(x: int, y: int, d: int) -> tuple[int, ...]:
    """Control values allowed at a corner between links in subspaces x and y."""
    _check_dim(d)
    for v in (x, y):
        if not 0 <= v <= d - 2:
            raise ValueError(f"subspace index {v} out of range for d={d}")
    return tuple(range(abs(x - y), min(x + y + 1, d - 1) + 1))


def _check_pqrs(pqrs: Sequence[int], d: int) -> tuple[int, int, int, int]:
    if len(pqrs) != 4:
        raise ValueError("pqrs must have four entries")
    for v in pqrs:
        if not 0 <= v <= d - 2:
            raise ValueError(f"subspace index {v} out of range for d={d}")
    return tuple(int(v) for v in pqrs)  # type: ignore[return-value]


@lru_cache(maxsize=None)
def _sector(pqrs: tuple[int, int, int, int], d: int) -> tuple[tuple[int, int, int, int], ...]:
    p, q, r, s = pqrs
    sets = (control_set(s, p, d), control_set(p, q, d), control_set(q, r, d), control_set(r, s, d))
    return tuple(w for w in itertools.product(*sets) if sum(w) % 2 == 0)


def control_sector(pqrs: Sequence[int], d: int) -> list[tuple[int, int, int, int]]:
    """Control words compatible with the term ``pqrs``, in increasing order."""
    _check_dim(d)
    return list(_sector(_check_pqrs(pqrs, d), d))


def d4_representative(pqrs: Sequence[int]) -> tuple[int, int, int, int]:
    return min(tuple(pqrs[i] for i in perm) for perm in D4_PERMS)  # type: ignore[return-value]


def d4_classes(d: int) -> list[tuple[tuple[int, int, int, int], int]]:
    """Orbit representatives (lexicographic minima) with orbit sizes."""
    _check_dim(d)
    orders: dict[tuple[int, int, int, int], int] = {}
    for pqrs in itertools.product(range(d - 1), repeat=4):
        rep = d4_representative(pqrs)
        orders[rep] = orders.get(rep, 0) + 1
    return sorted(orders.items())


def doubly_triangular(c: int) -> int:
    return c * (c + 1) * (c * c + c + 2) // 8


def _pick(x: int, prev: int, ctrl: int) -> int:
    return x if (x + prev + ctrl) % 2 == 0 else x + 1


@dataclass(frozen=True)
class FluxConfig:
    """Plaquette links (q_l, j_a^b, q_r, j_a^t) and controls (j_l^t, j_l^b, j_r^b, j_r^t), all as 2j."""

    plaquette: tuple[int, int, int, int]
    controls: tuple[int, int, int, int]

    def is_physical(self) -> bool:
        ql, jab, qr, jat = self.plaquette
        jlt, jlb, jrb, jrt = self.controls
        return all(
            triad_ok(*t) for t in ((ql, jat, jlt), (ql, jab, jlb), (qr, jab, jrb), (qr, jat, jrt))
        )


def flux_pair(pqrs: Sequence[int], ijkl: Sequence[int]) -> tuple[FluxConfig, FluxConfig]:
    """Initial and partner flux configurations for one (term, control word) pair.

    The first plaquette link holds ``p`` flux lines; the other three follow from
    the vertex parity going counter-clockwise. The partner flips every link
    inside its two-level subspace.
    """
    p, q, r, s = pqrs
    i, j, k, l = ijkl
    ql = p
    jab = _pick(q, ql, j)
    qr = _pick(r, jab, k)
    jat = _pick(s, qr, l)
    ini = (ql, jab, qr, jat)
    fin = tuple(x + 1 if v == x else x for v, x in zip(ini, (p, q, r, s)))
    ctl = (i, j, k, l)
    return FluxConfig(ini, ctl), FluxConfig(fin, ctl)  # type: ignore[arg-type]


def amplitude_from_flux(ini: FluxConfig, fin: FluxConfig) -> float:
    """Plaquette matrix element between two physical flux configurations."""
    qli, jabi, qri, jati = ini.plaquette
    qlf, jabf, qrf, jatf = fin.plaquette
    jlt, jlb, jrb, jrt = ini.controls
    dims = 1
    for v in (jati, jatf, jabi, jabf, qli, qlf, qri, qrf):
        dims *= v + 1
    exponent = (jlt + jlb + jrt + jrb) // 2 + jatf + jabf - qli - qri
    val = math.sqrt(dims) * (-1) ** (exponent % 2)
    val *= six_j_twice(jlt, jati, qli, 1, qlf, jatf)
    val *= six_j_twice(jlb, jabi, qli, 1, qlf, jabf)
    val *= six_j_twice(jrt, jati, qri, 1, qrf, jatf)
    val *= six_j_twice(jrb, jabi, qri, 1, qrf, jabf)
    return val


def transition_amplitude(pqrs: Sequence[int], ijkl: Sequence[int], d: int) -> float:
    pqrs_t = _check_pqrs(pqrs, d)
    word = tuple(int(v) for v in ijkl)
    if word not in set(_sector(pqrs_t, d)):
        raise ValueError(f"control word {word} is not in the sector of {pqrs_t}")
    ini, fin = flux_pair(pqrs_t, word)
    return amplitude_from_flux(ini, fin)


def corner_perm(perm: Sequence[int]) -> tuple[int, int, int, int]:
    """Corner permutation induced by a link permutation.

    Corner ``m`` sits between links ``m-1`` and ``m`` (cyclically). Returns
    ``cp`` with new corner ``m`` taking the old corner ``cp[m]``.
    """
    out = []
    for m in range(4):
        a, b = perm[(m - 1) % 4], perm[m]
        # old corner between links a and b
        out.append(b if (a + 1) % 4 == b else a)
    return tuple(out)  # type: ignore[return-value]


@dataclass
class GGGGTerm:
    """One XXXX term: the subspace assignment and its weighted control words."""

    pqrs: tuple[int, int, int, int]
    words: np.ndarray  # (n, 4) control words, increasing order
    phis: np.ndarray  # (n,) amplitudes

    @property
    def controls(self) -> list[tuple[tuple[int, ...], float]]:
        return [(tuple(int(x) for x in w), float(v)) for w, v in zip(self.words, self.phis)]

    def phi_map(self) -> dict[tuple[int, ...], float]:
        return {tuple(int(x) for x in w): float(v) for w, v in zip(self.words, self.phis)}

    def __len__(self) -> int:
        return len(self.phis)


@dataclass
class PlaquetteOperator:
    d: int
    terms: list[GGGGTerm]
    d4_classes: list[tuple[tuple[int, int, int, int], int]] = field(default_factory=list)

    def lookup(self) -> dict[tuple[int, ...], dict[tuple[int, ...], float]]:
        """pqrs -> {control word: phi}, built once."""
        cached = self.__dict__.get("_lookup")
        if cached is None:
            cached = {t.pqrs: t.phi_map() for t in self.terms}
            self.__dict__["_lookup"] = cached
        return cached

    def term(self, pqrs: Sequence[int]) -> GGGGTerm:
        idx = 0
        for v in _check_pqrs(pqrs, self.d):
            idx = idx * (self.d - 1) + int(v)
        return self.terms[idx]

    @property
    def total_entries(self) -> int:
        return sum(len(t) for t in self.terms)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "terms": [
                {
                    "pqrs": list(t.pqrs),
                    "controls": [{"word": [int(x) for x in w], "phi": float(v)} for w, v in zip(t.words, t.phis)],
                }
                for t in self.terms
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "PlaquetteOperator":
        d = int(data["d"])
        terms = []
        for t in data["terms"]:
            words = np.array([c["word"] for c in t["controls"]], dtype=np.int64).reshape(-1, 4)
            phis = np.array([c["phi"] for c in t["controls"]], dtype=float)
            terms.append(GGGGTerm(tuple(t["pqrs"]), words, phis))
        return cls(d, terms, d4_classes(d))


def _term_direct(pqrs: tuple[int, int, int, int], d: int) -> GGGGTerm:
    words = _sector(pqrs, d)
    phis = [amplitude_from_flux(*flux_pair(pqrs, w)) for w in words]
    return GGGGTerm(pqrs, np.array(words, dtype=np.int64).reshape(-1, 4), np.array(phis))


def build_plaquette_operator(d: int, max_dim: int = MAX_DIM) -> PlaquetteOperator:
    """Assemble all (d-1)^4 terms from the D4 representatives."""
    _check_dim(d, 2, max_dim)
    classes = d4_classes(d)
    reps = {rep: _term_direct(rep, d) for rep, _ in classes}
    terms = []
    for pqrs in itertools.product(range(d - 1), repeat=4):
        rep = d4_representative(pqrs)
        # perm maps pqrs onto the representative: rep[a] = pqrs[perm[a]]
        perm = next(pm for pm in D4_PERMS if tuple(pqrs[i] for i in pm) == rep)
        base = reps[rep]
        if tuple(pqrs) == rep:
            terms.append(base)
            continue
        cp = corner_perm(perm)
        inv = np.argsort(cp)
        # rep word w (corner m) equals pqrs word at corner cp[m]
        words = base.words[:, inv]
        order = np.lexsort(words.T[::-1])
        terms.append(GGGGTerm(tuple(pqrs), words[order], base.phis[order]))
    return PlaquetteOperator(d, terms, classes)


def plaquette_matrix_action(op: PlaquetteOperator, word: Sequence[int]) -> list[tuple[tuple[int, ...], float]]:
    """Non-zero column entries of the operator for an 8-digit flux word.

    The word lists the controls ``ijkl`` then the plaquette links in ``pqrs``
    order.
    """
    d = op.d
    if len(word) != 8 or any(not 0 <= int(v) < d for v in word):
        raise ValueError(f"malformed 8-link word {tuple(word)} for d={d}")
    ctl = tuple(int(v) for v in word[:4])
    plaq = tuple(int(v) for v in word[4:])
    out = []
    # each plaquette digit v sits in subspace v-1 or v
    options = [[x for x in (v - 1, v) if 0 <= x <= d - 2] for v in plaq]
    lookup = op.lookup()
    for pqrs in itertools.product(*options):
        phi = lookup[pqrs].get(ctl)
        if phi is None:
            continue
        new = tuple(x + 1 if v == x else x for v, x in zip(plaq, pqrs))
        out.append((ctl + new, phi))
    return out


def dense_matrix(op: PlaquetteOperator) -> np.ndarray:
    """Dense operator over all d^8 flux words (small d only)."""
    d = op.d
    n = d**8
    mat = np.zeros((n, n))
    radix = d ** np.arange(7, -1, -1)
    for idx, word in enumerate(itertools.product(range(d), repeat=8)):
        for new, amp in plaquette_matrix_action(op, word):
            mat[int(np.dot(new, radix)), idx] += amp
    return mat


def summary(op: PlaquetteOperator) -> dict[str, int]:
    return {
        "d": op.d,
        "classes": len(op.d4_classes),
        "terms": len(op.terms),
        "entries": op.total_entries,
    }


def iter_pairs(op: PlaquetteOperator) -> Iterable[tuple[tuple[int, ...], tuple[int, ...], float]]:
    for t in op.terms:
        for w, v in zip(t.words, t.phis):
            yield t.pqrs, tuple(int(x) for x in w), float(v)
