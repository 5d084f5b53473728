"""Independent reference computations used to freeze expected values.

Nothing here imports the package's algebra; everything is redone by a
different route (floating point, numpy, brute force, hand-built graphs).
"""

import itertools
import math

import networkx as nx
import numpy as np

# phi0 written out by hand, 1-based multi-indices
PHI0_TERMS = {(1, 2, 3): 1, (1, 4, 5): 1, (1, 6, 7): 1, (2, 4, 6): 1, (2, 5, 7): -1, (3, 4, 7): -1, (3, 5, 6): -1}
# psi0 = *phi0, complement of each term with the sign of the shuffle
PSI0_TERMS = {
    (4, 5, 6, 7): 1,
    (2, 3, 6, 7): 1,
    (2, 3, 4, 5): 1,
    (1, 3, 5, 7): 1,
    (1, 3, 4, 6): -1,
    (1, 2, 5, 6): -1,
    (1, 2, 4, 7): -1,
}


def _perm_sign(seq):
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def dense(terms, deg, n=7):
    """Fully antisymmetric numpy tensor from a dict of increasing 1-based tuples."""
    t = np.zeros((n,) * deg)
    for idx, c in terms.items():
        for p in itertools.permutations(range(deg)):
            t[tuple(idx[i] - 1 for i in p)] = c * _perm_sign(p)
    return t


def hodge_dense(terms, deg, n=7):
    """Euclidean Hodge star on basis terms: dx^I -> sign(I, I^c) dx^{I^c}."""
    out = {}
    full = set(range(1, n + 1))
    for idx, c in terms.items():
        comp = tuple(sorted(full - set(idx)))
        out[comp] = out.get(comp, 0) + c * _perm_sign(idx + comp)
    return out


def fixed_component_count(signs, translation):
    """x -> signs * x + t on R^7/Z^7: each -1 coordinate gives two solutions, each +1 needs t = 0."""
    count = 1
    for s, t in zip(signs, translation):
        if s == -1:
            count *= 2
        elif t % 1 != 0:
            return 0
    return count


def _e_k(mat, k):
    """Sum of principal k x k minors (coefficient of t^k in det(1 + tA))."""
    n = len(mat)
    if k == 0:
        return 1.0
    a = np.array(mat, dtype=float)
    return sum(np.linalg.det(a[np.ix_(c, c)]) for c in itertools.combinations(range(n), k))


def invariant_form_dims(linears):
    """dim (Lambda^k R^7)^G = average over G of tr Lambda^k g."""
    out = []
    for k in range(8):
        avg = sum(_e_k(m, k) for m in linears) / len(linears)
        out.append(int(round(avg)))
        assert abs(avg - round(avg)) < 1e-9
    return out


def character_sum_float(k, m):
    return sum((1 - math.cos(2 * math.pi * m * j / k)) / (1 - math.cos(2 * math.pi * j / k)) for j in range(1, k))


def cyclic_index_float(k, m):
    """Adjoint index of A_{n,m}: 2 * energy + (2/k) sum (chi - 3)/(2 - tr) with tr = 2 cos."""
    energy = (k - m) * m / k
    corr = 0.0
    for j in range(1, k):
        chi = 1 + 2 * math.cos(2 * math.pi * m * j / k)
        corr += (chi - 3) / (2 - 2 * math.cos(2 * math.pi * j / k))
    return 2 * energy + 2 * corr / k


def affine_graph(tag):
    """Extended Dynkin diagrams built by hand as (multi)graphs."""
    g = nx.MultiGraph()
    fam, r = tag[0], int(tag[1:])
    if fam == "A":
        n = r + 1
        g.add_nodes_from(range(n))
        for i in range(n):
            g.add_edge(i, (i + 1) % n)
    elif tag == "D4":
        g.add_edges_from([(0, 4), (1, 4), (2, 4), (3, 4)])
    elif tag == "E6":
        g.add_edges_from([(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)])
    else:
        raise ValueError(tag)
    return g


def multigraph_from_adjacency(adj):
    g = nx.MultiGraph()
    g.add_nodes_from(range(len(adj)))
    for i in range(len(adj)):
        for j in range(i, len(adj)):
            mult = adj[i][j] if i != j else adj[i][j] // 2
            for _ in range(mult):
                g.add_edge(i, j)
    return g


def random_invertible(rng, n=7, lo=-2, hi=2):
    while True:
        a = rng.integers(lo, hi + 1, size=(n, n))
        if round(np.linalg.det(a)) != 0:
            return a.tolist()


def epsilon_bilinear(terms):
    """B_ij = sum over permutations p of sgn(p) phi[i,p0,p1] phi[j,p2,p3] phi[p4,p5,p6]."""
    phi = dense(terms, 3)
    perms = [(p, _perm_sign(p)) for p in itertools.permutations(range(7))]
    b = np.zeros((7, 7))
    for i in range(7):
        for j in range(i, 7):
            tot = 0.0
            for p, s in perms:
                x = phi[i, p[0], p[1]]
                if x:
                    y = phi[j, p[2], p[3]]
                    if y:
                        tot += s * x * y * phi[p[4], p[5], p[6]]
            b[i, j] = b[j, i] = tot
    return b


def eigen_signature(b):
    ev = np.linalg.eigvalsh(b)
    return int((ev > 1e-9).sum()), int((ev < -1e-9).sum())
