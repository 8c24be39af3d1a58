"""Triangular loop basis, lifts of circle-valued fields, and winding numbers.

Every cell boundary is a loop; the loops of all orders form the basis
along which winding numbers are recorded.  A loop is traced clockwise
starting from its leftmost vertex, visiting every graph vertex on its
three sides.  Lifting a phase field along the loop picks, for each step,
the unique real increment within a half turn; the total increment around
the loop is the winding number.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DegreeClosureError, UnresolvedWindingError
from .graphs import FractalGraph, canonical_itinerary

INTEGRALITY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Loop:
    """Closed vertex cycle tracing one cell boundary clockwise."""

    word: tuple[int, ...]
    vertex_cycle: np.ndarray  # first id == last id

    def __post_init__(self):
        self.vertex_cycle.setflags(write=False)

    def reversed(self) -> "Loop":
        return Loop(self.word, self.vertex_cycle[::-1].copy())


def word_str(word) -> str:
    return "eps" if len(word) == 0 else "".join(str(s) for s in word)


def parse_word(s: str, alphabet=(1, 2, 3)) -> tuple[int, ...]:
    s = s.strip()
    if s in ("", "eps"):
        return ()
    word = tuple(int(ch) for ch in s)
    if any(sym not in alphabet for sym in word):
        raise ValueError(f"word {s!r} uses symbols outside {alphabet}")
    return word


class DegreeVector:
    """Finitely supported integer vector indexed by loop words."""

    def __init__(self, entries=None):
        ent = {}
        for w, v in (entries or {}).items():
            w = tuple(w)
            v = int(v)
            if v != 0:
                ent[w] = v
        self.entries = ent

    @classmethod
    def from_dense(cls, values, alphabet=(1, 2, 3)):
        """Build from the dense by-order listing eps, (1), (2), (3), (1,1), ..."""
        words = []
        order = 0
        while len(words) < len(values):
            words.extend(product(alphabet, repeat=order))
            order += 1
        return cls(dict(zip(words, values)))

    @classmethod
    def parse(cls, text, alphabet=(1, 2, 3)):
        """Parse CLI form: dense "1,0,0" or sparse "eps:1,13:2"."""
        text = text.strip()
        if not text:
            return cls()
        if ":" in text:
            entries = {}
            for item in text.split(","):
                w, _, v = item.partition(":")
                entries[parse_word(w, alphabet)] = int(v)
            return cls(entries)
        return cls.from_dense([int(v) for v in text.split(",")], alphabet)

    @property
    def max_order(self):
        """Largest word length carrying a nonzero entry (-1 if none)."""
        return max((len(w) for w in self.entries), default=-1)

    def to_dense(self, order=None, alphabet=(1, 2, 3)):
        if order is None:
            order = max(self.max_order, 0)
        out = []
        for ell in range(order + 1):
            for w in product(alphabet, repeat=ell):
                out.append(self.entries.get(w, 0))
        return out

    def to_json_dict(self):
        return {word_str(w): v for w, v in sorted(self.entries.items())}

    def __eq__(self, other):
        if isinstance(other, DegreeVector):
            return self.entries == other.entries
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.entries.items()))

    def __bool__(self):
        return bool(self.entries)

    def __repr__(self):
        if not self.entries:
            return "DegreeVector(0)"
        body = ", ".join(f"{word_str(w)}:{v}" for w, v in sorted(self.entries.items()))
        return f"DegreeVector({body})"


def _side_vertices(g, word, a, b):
    """Ids along the side from corner ``a`` to corner ``b`` of cell ``word``,
    excluding the endpoint at ``b``."""
    m = g.level - len(word)
    out = []
    for k in range(2 ** m):
        digits = tuple(a if (k >> (m - 1 - p)) & 1 == 0 else b for p in range(m))
        out.append(g.id_of(canonical_itinerary(word + digits, a)))
    return out


def trace_loop(g: FractalGraph, word) -> Loop:
    """Clockwise cycle of all level-n vertices on the boundary of cell ``word``."""
    word = tuple(word)
    if g.kind == "ring":
        if len(word) != 0:
            raise ValueError("the ring has a single basis loop (the full cycle)")
        cyc = np.concatenate([np.arange(g.n_vertices), [0]])
        return Loop(word, cyc.astype(np.int64))
    if len(word) > g.level:
        raise ValueError(f"loop word longer than graph level {g.level}")
    # clockwise corner order is v1 -> v2 -> v3; v1's image is leftmost
    ids = (_side_vertices(g, word, 1, 2)
           + _side_vertices(g, word, 2, 3)
           + _side_vertices(g, word, 3, 1))
    ids.append(ids[0])
    return Loop(word, np.array(ids, dtype=np.int64))


def loop_basis(g: FractalGraph, max_order: int):
    """Loops for every word of length <= max_order, ordered by (length, word)."""
    if max_order > g.level:
        raise ValueError(f"max_order {max_order} exceeds graph level {g.level}")
    if g.kind == "ring":
        if max_order != 0:
            raise ValueError("ring loop basis has only order 0")
        return [trace_loop(g, ())]
    loops = []
    for ell in range(max_order + 1):
        for w in product(g.alphabet, repeat=ell):
            loops.append(trace_loop(g, w))
    return loops


def lift_along_loop(f, loop: Loop) -> np.ndarray:
    """Real lift of the phase field along the loop.

    Each step takes the unique representative of the phase difference in
    (-1/2, 1/2]; a step of circle distance >= 1/2 is ambiguous at this
    resolution and raises :class:`UnresolvedWindingError`.
    """
    f = np.asarray(f, dtype=float)
    cyc = loop.vertex_cycle
    vals = f[cyc]
    d = np.diff(vals)
    r = d - np.round(d)
    r[r == -0.5] = 0.5
    bad = np.abs(r) >= 0.5
    if bad.any():
        k = int(np.argmax(bad))
        raise UnresolvedWindingError((int(cyc[k]), int(cyc[k + 1])), abs(r[k]))
    lift = np.empty(len(cyc))
    lift[0] = vals[0]
    np.cumsum(r, out=lift[1:])
    lift[1:] += vals[0]
    return lift


def loop_winding(f, loop: Loop) -> int:
    lift = lift_along_loop(f, loop)
    w = lift[-1] - lift[0]
    k = round(w)
    if abs(w - k) > INTEGRALITY_TOL:
        raise DegreeClosureError(
            f"lift around loop {word_str(loop.word)} closes at {w!r}, "
            f"not an integer within {INTEGRALITY_TOL}")
    return int(k)


def degree(f, g: FractalGraph, max_order: int) -> DegreeVector:
    """Winding numbers of ``f`` along every basis loop up to ``max_order``."""
    f = np.asarray(f, dtype=float)
    if f.shape != (g.n_vertices,):
        raise ValueError(
            f"field shape {f.shape} does not match graph with "
            f"{g.n_vertices} vertices")
    entries = {}
    for loop in loop_basis(g, max_order):
        entries[loop.word] = loop_winding(f, loop)
    return DegreeVector(entries)
