"""Graph hierarchies approximating the Sierpinski gasket and the ring.

The level-n gasket graph is the union of the images of the base triangle
under all length-n compositions of the three corner contractions
``F_i(x) = (x - v_i)/2 + v_i``.  Vertices are addressed symbolically by
itineraries: a finite word over the alphabet ``{1, 2, 3}`` followed by an
infinitely repeated tail symbol.  An interior vertex carries exactly two
such names (it is shared by two cells); the canonical name is the
lexicographically smaller one, and vertex ids are assigned by sorting
canonical names.  Identity and ordering therefore never depend on
floating-point coordinates.

The ring hierarchy uses the alphabet ``{0, 1}`` (two contractions of the
unit interval with endpoints identified), vertices ``i * 2**-n`` and
nearest-neighbour edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

SG_ALPHABET = (1, 2, 3)
RING_ALPHABET = (0, 1)

MAX_SG_LEVEL = 12
MAX_RING_LEVEL = 20

# Corners of the base triangle: v1 bottom-left, v2 top, v3 bottom-right.
SG_CORNERS = np.array([[0.0, 0.0], [0.5, math.sqrt(3.0) / 2.0], [1.0, 0.0]])


@dataclass(frozen=True, slots=True)
class Itinerary:
    """Symbolic vertex address: finite word plus repeated tail symbol."""

    word: tuple[int, ...]
    tail: int

    def __str__(self):
        return "".join(str(s) for s in self.word) + "~" + str(self.tail)

    def symbols(self, length):
        """First ``length`` symbols of the infinite address string."""
        pad = length - len(self.word)
        return self.word + (self.tail,) * pad


def canonical_itinerary(word, tail) -> Itinerary:
    """Reduce an address to canonical form.

    Trailing tail symbols are absorbed into the tail; of the two names of
    a shared vertex (which differ by swapping the last word symbol with
    the tail) the lexicographically smaller is kept, so a canonical word
    is either empty or ends in a symbol strictly below the tail.
    """
    w = list(word)
    while w and w[-1] == tail:
        w.pop()
    if w and w[-1] > tail:
        w[-1], tail = tail, w[-1]
    return Itinerary(tuple(w), tail)


@dataclass(frozen=True, slots=True)
class Vertex:
    id: int
    itinerary: Itinerary
    coords: tuple[float, ...]
    is_boundary: bool


class FractalGraph:
    """Immutable level-n approximating graph (gasket or ring).

    Attributes
    ----------
    kind : str
        ``"sg"`` or ``"ring"``.
    level : int
    coords : (N, 2) ndarray
        Planar coordinates (ring vertices sit on the x axis).
    edges : (E, 2) ndarray
        Each undirected edge stored once.
    edge_mult : (E,) ndarray
        Edge multiplicity in energy sums (2 only for the level-1 ring).
    conductance : float
        Per-edge weight at this level: (5/3)**n for the gasket, 2**n for
        the ring.
    cell_words : (C,) ndarray
        Cells as fixed-radix integers (lexicographic == numeric order).
    cell_corners : (C, k) ndarray
        Vertex ids of each cell, k = 3 (gasket) or 2 (ring).
    boundary_ids : tuple
        Ids of the boundary vertices (the three corners; vertex 0 for the
        ring).
    """

    def __init__(self, kind, level, alphabet, coords, edges, edge_mult,
                 conductance, cell_words, cell_corners, boundary_ids,
                 itineraries, itin_to_id):
        self.kind = kind
        self.level = level
        self.alphabet = alphabet
        self.coords = coords
        self.edges = edges
        self.edge_mult = edge_mult
        self.conductance = conductance
        self.cell_words = cell_words
        self.cell_corners = cell_corners
        self.boundary_ids = boundary_ids
        self._itineraries = itineraries
        self._itin_to_id = itin_to_id
        self._vertices = None
        self._cells_dict = None
        self._edge_weights = None
        self._restrictions = {}
        for arr in (coords, edges, edge_mult, cell_words, cell_corners):
            arr.setflags(write=False)

    # -- basic queries ---------------------------------------------------

    @property
    def n_vertices(self):
        return self.coords.shape[0]

    @property
    def n_edges(self):
        return self.edges.shape[0]

    @property
    def edge_weights(self):
        """Conductance times multiplicity, per stored edge."""
        if self._edge_weights is None:
            w = self.conductance * self.edge_mult.astype(float)
            w.setflags(write=False)
            self._edge_weights = w
        return self._edge_weights

    def itinerary(self, i) -> Itinerary:
        return self._itineraries[i]

    def id_of(self, itinerary) -> int:
        """Vertex id of a canonical itinerary."""
        try:
            return self._itin_to_id[itinerary]
        except KeyError:
            raise KeyError(f"no vertex {itinerary} at level {self.level}")

    def vertex(self, i) -> Vertex:
        return Vertex(
            id=int(i),
            itinerary=self._itineraries[i],
            coords=tuple(float(c) for c in self.coords[i]),
            is_boundary=int(i) in self.boundary_ids,
        )

    @property
    def vertices(self):
        if self._vertices is None:
            self._vertices = [self.vertex(i) for i in range(self.n_vertices)]
        return self._vertices

    # -- words and cells ---------------------------------------------------

    def pack_word(self, word) -> int:
        """Fixed-radix integer key of a word of length == level."""
        base = len(self.alphabet)
        val = 0
        for s in word:
            val = val * base + self.alphabet.index(s)
        return val

    @property
    def cells(self):
        """Word-tuple -> corner-id-tuple view of the cell table."""
        if self._cells_dict is None:
            base = len(self.alphabet)
            out = {}
            for val, corners in zip(self.cell_words, self.cell_corners):
                digits = []
                v = int(val)
                for _ in range(self.level):
                    digits.append(self.alphabet[v % base])
                    v //= base
                out[tuple(reversed(digits))] = tuple(int(c) for c in corners)
            self._cells_dict = out
        return self._cells_dict

    def cell_vertices(self, word):
        """Corner ids of cell ``word``, in the order (F_w(v1), F_w(v2), F_w(v3))."""
        word = tuple(word)
        if len(word) != self.level:
            raise ValueError(
                f"cell word length {len(word)} != graph level {self.level}")
        if any(s not in self.alphabet for s in word):
            raise ValueError(f"word {word} uses symbols outside {self.alphabet}")
        val = self.pack_word(word)
        pos = int(np.searchsorted(self.cell_words, val))
        if pos >= len(self.cell_words) or self.cell_words[pos] != val:
            raise KeyError(f"unknown cell word {word}")
        return tuple(int(c) for c in self.cell_corners[pos])

    # -- level maps --------------------------------------------------------

    def restriction_to(self, m):
        """Index array mapping level-m vertex ids into this graph's ids."""
        if m > self.level:
            raise ValueError(f"cannot restrict level {self.level} to finer level {m}")
        if m not in self._restrictions:
            if self.kind == "ring":
                idx = np.arange(2 ** m, dtype=np.int64) * 2 ** (self.level - m)
            else:
                coarse = build_sg_graph(m)
                idx = np.array(
                    [self._itin_to_id[it] for it in coarse._itineraries],
                    dtype=np.int64)
            idx.setflags(write=False)
            self._restrictions[m] = idx
        return self._restrictions[m]

    # -- export ------------------------------------------------------------

    def to_json_dict(self):
        verts = [
            {
                "id": i,
                "itinerary": str(self._itineraries[i]),
                "x": float(self.coords[i, 0]),
                "y": float(self.coords[i, 1]),
                "boundary": i in self.boundary_ids,
            }
            for i in range(self.n_vertices)
        ]
        cells = {
            "".join(str(s) for s in w): list(ids)
            for w, ids in sorted(self.cells.items())
        }
        return {
            "kind": self.kind,
            "level": self.level,
            "conductance": self.conductance,
            "vertices": verts,
            "edges": [[int(a), int(b)] for a, b in self.edges],
            "multiplicity": [int(m) for m in self.edge_mult],
            "cells": cells,
        }

    def __repr__(self):
        return (f"FractalGraph({self.kind!r}, level={self.level}, "
                f"|V|={self.n_vertices}, |E|={self.n_edges})")


def _sg_coords(itin: Itinerary):
    p = SG_CORNERS[itin.tail - 1].copy()
    for s in reversed(itin.word):
        p = (p + SG_CORNERS[s - 1]) / 2.0
    return p


@lru_cache(maxsize=None)
def build_sg_graph(n: int) -> FractalGraph:
    """Level-n gasket graph: (3**(n+1) + 3)/2 vertices, 3**(n+1) edges."""
    if not 0 <= n <= MAX_SG_LEVEL:
        raise ValueError(
            f"gasket level must be in [0, {MAX_SG_LEVEL}], got {n}")

    vert_keys = {}

    def key_of(it: Itinerary) -> int:
        val = 0
        for s in it.symbols(n + 1):
            val = val * 3 + (s - 1)
        return val

    cell_entries = []  # (packed word, corner itineraries)
    for word in product(SG_ALPHABET, repeat=n):
        corners = [canonical_itinerary(word, i) for i in SG_ALPHABET]
        for it in corners:
            vert_keys.setdefault(it, key_of(it))
        cell_entries.append((word, corners))

    order = sorted(vert_keys, key=vert_keys.get)
    itin_to_id = {it: i for i, it in enumerate(order)}

    coords = np.array([_sg_coords(it) for it in order])
    boundary_ids = tuple(
        itin_to_id[Itinerary((), i)] for i in SG_ALPHABET)

    cell_words = np.empty(len(cell_entries), dtype=np.int64)
    cell_corners = np.empty((len(cell_entries), 3), dtype=np.int64)
    edges = np.empty((3 * len(cell_entries), 2), dtype=np.int64)
    for k, (word, corners) in enumerate(cell_entries):
        val = 0
        for s in word:
            val = val * 3 + (s - 1)
        cell_words[k] = val
        a, b, c = (itin_to_id[it] for it in corners)
        cell_corners[k] = (a, b, c)
        edges[3 * k] = (a, b)
        edges[3 * k + 1] = (b, c)
        edges[3 * k + 2] = (c, a)

    g = FractalGraph(
        kind="sg", level=n, alphabet=SG_ALPHABET, coords=coords,
        edges=edges, edge_mult=np.ones(len(edges), dtype=np.int64),
        conductance=(5.0 / 3.0) ** n, cell_words=cell_words,
        cell_corners=cell_corners, boundary_ids=boundary_ids,
        itineraries=order, itin_to_id=itin_to_id)
    assert g.n_vertices == (3 ** (n + 1) + 3) // 2
    return g


def _ring_itinerary(i, n) -> Itinerary:
    # Canonical = lexicographically smaller name = the limit-from-below
    # binary expansion of i * 2**-n (the terminating expansion of vertex 0).
    if i == 0:
        return Itinerary((), 0)
    digits = [(i - 1) >> (n - 1 - k) & 1 for k in range(n)]
    return canonical_itinerary(tuple(digits), 1)


@lru_cache(maxsize=None)
def build_ring_graph(n: int) -> FractalGraph:
    """Level-n ring: 2**n vertices at i * 2**-n, nearest-neighbour edges."""
    if not 1 <= n <= MAX_RING_LEVEL:
        raise ValueError(
            f"ring level must be in [1, {MAX_RING_LEVEL}], got {n}")
    nv = 2 ** n
    coords = np.zeros((nv, 2))
    coords[:, 0] = np.arange(nv) / nv

    if n == 1:
        # The two neighbour relations j = i +- 1 mod 2 coincide; keep one
        # stored edge with multiplicity 2 so energy sums match the model.
        edges = np.array([[0, 1]], dtype=np.int64)
        mult = np.array([2], dtype=np.int64)
    else:
        idx = np.arange(nv, dtype=np.int64)
        edges = np.stack([idx, (idx + 1) % nv], axis=1)
        mult = np.ones(nv, dtype=np.int64)

    cell_words = np.arange(nv, dtype=np.int64)
    cell_corners = np.stack(
        [np.arange(nv, dtype=np.int64),
         (np.arange(nv, dtype=np.int64) + 1) % nv], axis=1)

    itineraries = [_ring_itinerary(i, n) for i in range(nv)]
    itin_to_id = {it: i for i, it in enumerate(itineraries)}

    return FractalGraph(
        kind="ring", level=n, alphabet=RING_ALPHABET, coords=coords,
        edges=edges, edge_mult=mult, conductance=2.0 ** n,
        cell_words=cell_words, cell_corners=cell_corners,
        boundary_ids=(0,), itineraries=itineraries, itin_to_id=itin_to_id)


def build_graph(kind, n) -> FractalGraph:
    if kind == "sg":
        return build_sg_graph(n)
    if kind == "ring":
        return build_ring_graph(n)
    raise ValueError(f"unknown fractal kind {kind!r}")


def restrict(g_fine: FractalGraph, m: int, f):
    """Restrict a vertex field from ``g_fine`` to the level-m vertex set.

    Vertices are identified by itinerary, so the returned field is ordered
    exactly as the level-m graph orders its vertices.
    """
    f = np.asarray(f)
    if f.shape[0] != g_fine.n_vertices:
        raise ValueError(
            f"field length {f.shape[0]} != vertex count {g_fine.n_vertices}")
    return f[g_fine.restriction_to(m)]
