import numpy as np
import pytest

V0 = np.array([[0.0, 0.0], [0.5, np.sqrt(3.0) / 2.0], [1.0, 0.0]])


def contraction(i, p):
    """F_i(p) = (p - v_i)/2 + v_i, independent of the package's machinery."""
    return (np.asarray(p, dtype=float) - V0[i - 1]) / 2.0 + V0[i - 1]


def apply_word(word, p):
    """F_w = F_{w1} o F_{w2} o ... o F_{wn} applied to a point."""
    p = np.asarray(p, dtype=float)
    for s in reversed(word):
        p = contraction(s, p)
    return p


def enumerate_gasket(n):
    """Brute-force oracle: cells, vertices (deduplicated by coordinates at
    1e-12) and edges of the level-n graph, with no itinerary machinery."""
    from itertools import product

    points = {}

    def pid(p):
        key = (round(p[0], 12), round(p[1], 12))
        return points.setdefault(key, len(points))

    cells = []
    edges = set()
    for w in product((1, 2, 3), repeat=n):
        ids = [pid(apply_word(w, V0[k])) for k in range(3)]
        cells.append(tuple(ids))
        for a, b in ((0, 1), (1, 2), (2, 0)):
            edges.add(frozenset((ids[a], ids[b])))
    coords = np.zeros((len(points), 2))
    for (x, y), k in points.items():
        coords[k] = (x, y)
    return coords, cells, edges


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20250810)
