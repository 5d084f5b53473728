"""Finite subgroups of SU(2): characters, Cartan/McKay data, index formula.

Cyclic groups are built directly from roots of unity.  Binary dihedral and
binary polyhedral groups are generated as 2x2 matrices over a cyclotomic
field from quaternion generators; their character tables are then peeled
off from symmetric powers of the defining representation, twists by linear
characters and Galois conjugates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

import networkx as nx

from . import exact
from .cyclotomic import Cyclotomic


class McKayMismatch(AssertionError):
    pass


class NonRationalResult(ArithmeticError):
    pass


class NonIntegerIndex(ArithmeticError):
    pass


_TAG = re.compile(r"^\s*([ADE])_?(\d+)\s*$", re.IGNORECASE)


def parse_tag(tag: str) -> tuple[str, int]:
    m = _TAG.match(tag)
    if not m:
        raise ValueError(f"bad ADE tag {tag!r}")
    fam, r = m.group(1).upper(), int(m.group(2))
    if (fam == "A" and r < 1) or (fam == "D" and r < 4) or (fam == "E" and r not in (6, 7, 8)):
        raise ValueError(f"no Dynkin diagram {fam}_{r}")
    return fam, r


def canonical_tag(tag: str) -> str:
    fam, r = parse_tag(tag)
    return f"{fam}{r}"


# --- Cartan matrices -------------------------------------------------------


def _edges(tag: str) -> list[tuple[int, int]]:
    """Dynkin diagram edges, Bourbaki numbering, 1-based."""
    fam, r = parse_tag(tag)
    if fam == "A":
        return [(i, i + 1) for i in range(1, r)]
    if fam == "D":
        return [(i, i + 1) for i in range(1, r - 1)] + [(r - 2, r)]
    chain = {6: [(1, 3), (3, 4), (4, 5), (5, 6)], 7: [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7)],
             8: [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8)]}[r]
    return chain + [(2, 4)]


def cartan_matrix(tag: str) -> list[list[int]]:
    _, r = parse_tag(tag)
    c = [[2 if i == j else 0 for j in range(r)] for i in range(r)]
    for i, j in _edges(tag):
        c[i - 1][j - 1] = c[j - 1][i - 1] = -1
    return c


def cartan_inverse(tag: str) -> list[list[Fraction]]:
    return exact.inverse(cartan_matrix(tag))


def highest_root_marks(tag: str) -> list[int]:
    fam, r = parse_tag(tag)
    if fam == "A":
        return [1] * r
    if fam == "D":
        return [1] + [2] * (r - 3) + [1, 1]
    return {6: [1, 2, 2, 3, 2, 1], 7: [2, 2, 3, 4, 3, 2, 1], 8: [2, 3, 4, 6, 5, 4, 3, 2]}[r]


def affine_adjacency(tag: str) -> list[list[int]]:
    """Adjacency of the extended Dynkin diagram; vertex 0 is the affine node."""
    c = cartan_matrix(tag)
    r = len(c)
    marks = highest_root_marks(tag)
    # node 0 meets node j with multiplicity <theta, alpha_j>
    ext = [sum(marks[i] * c[i][j] for i in range(r)) for j in range(r)]
    adj = [[0] * (r + 1) for _ in range(r + 1)]
    for j in range(r):
        adj[0][j + 1] = adj[j + 1][0] = ext[j]
        for i in range(r):
            if i != j:
                adj[i + 1][j + 1] = -c[i][j]
    return adj


def intersection_pairing(tag: str, i: int, j: int) -> Fraction:
    """Integral of c1(R_i) ^ c1(R_j) over the ALE space: -(C^-1)_ij (1-based)."""
    inv = cartan_inverse(tag)
    r = len(inv)
    if not (1 <= i <= r and 1 <= j <= r):
        raise IndexError(f"node indices must lie in 1..{r}")
    return -inv[i - 1][j - 1]


# --- group data ------------------------------------------------------------


@dataclass(frozen=True)
class ConjugacyClass:
    size: int
    order: int
    su2_trace: Cyclotomic


@dataclass(frozen=True)
class ADEGroupData:
    type_tag: str
    order: int
    level: int
    classes: tuple[ConjugacyClass, ...]
    character_table: tuple[tuple[Cyclotomic, ...], ...]  # rows = irreps, row 0 trivial
    # Dynkin node (1-based) of each non-trivial irrep, in row order
    irrep_nodes: tuple[int, ...]

    @property
    def irreducible_dims(self) -> list[int]:
        return [int(row[0].to_fraction()) for row in self.character_table]

    @property
    def defining_character(self) -> list[Cyclotomic]:
        return [c.su2_trace for c in self.classes]

    def inner(self, chi, psi) -> Fraction:
        tot = Cyclotomic.rational(self.level, 0)
        for cl, a, b in zip(self.classes, chi, psi):
            tot = tot + a * b.conjugate() * cl.size
        val = tot / self.order
        if not val.is_rational():
            raise NonRationalResult("character inner product is not rational")
        return val.to_fraction()

    def to_json(self) -> dict:
        return {
            "type": self.type_tag,
            "order": self.order,
            "level": self.level,
            "classes": [{"size": c.size, "order": c.order, "su2_trace": c.su2_trace.to_json()} for c in self.classes],
            "irreducible_dims": self.irreducible_dims,
            "character_table": [[v.to_json() for v in row] for row in self.character_table],
            "irrep_nodes": list(self.irrep_nodes),
        }


def _cyclic(tag: str, k: int) -> ADEGroupData:
    classes = tuple(
        ConjugacyClass(1, k // gcd(j, k), Cyclotomic.zeta(k, j) + Cyclotomic.zeta(k, -j)) for j in range(k)
    )
    table = tuple(tuple(Cyclotomic.zeta(k, i * j) for j in range(k)) for i in range(k))
    return ADEGroupData(tag, k, k, classes, table, tuple(range(1, k)))


# 2x2 matrices over Q(zeta_N) stored as (a, b, c, d)
def _mat_mul(x, y):
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _su2_inv(x):
    a, b, c, d = x
    return (d, -b, -c, a)


def _key(x):
    return tuple(e.coords for e in x)


def _quaternion(level, a, b, c, d):
    i = Cyclotomic.zeta(level, level // 4)

    def cy(v):
        return v if isinstance(v, Cyclotomic) else Cyclotomic.rational(level, v)

    a, b, c, d = map(cy, (a, b, c, d))
    return (a + b * i, c + d * i, -c + d * i, a - b * i)


def _generators(fam: str, r: int):
    if fam == "D":
        n = r - 2
        level = lcm(2 * n, 4)
        z = Cyclotomic.zeta(level, level // (2 * n))
        zero, one = Cyclotomic.rational(level, 0), Cyclotomic.rational(level, 1)
        return level, 4 * n, [(z, zero, zero, z.inverse()), (zero, one, -one, zero)]
    if r == 6:
        level = 12
        h = Fraction(1, 2)
        return level, 24, [_quaternion(level, 0, 1, 0, 0), _quaternion(level, -h, h, h, h)]
    if r == 7:
        level = 24
        s2 = Cyclotomic.zeta(level, 3) + Cyclotomic.zeta(level, -3)
        h = Fraction(1, 2)
        return level, 48, [_quaternion(level, s2 * h, s2 * h, 0, 0), _quaternion(level, -h, h, h, h)]
    level = 20
    z5 = Cyclotomic.zeta(level, 4)
    sqrt5 = 1 + 2 * (z5 + z5 ** 4)
    gold = (1 + sqrt5) * Fraction(1, 2)
    h = Fraction(1, 2)
    return level, 120, [_quaternion(level, -h, h, h, h), _quaternion(level, gold * h, (gold - 1) * h, h, 0)]


def _close(gens, expected: int):
    one = Cyclotomic.rational(gens[0][0].level, 1)
    zero = Cyclotomic.rational(gens[0][0].level, 0)
    e = (one, zero, zero, one)
    elems = {_key(e): e}
    # parent pointers give every element a word in the generators
    word = {_key(e): ()}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for gi, g in enumerate(gens):
                y = _mat_mul(g, x)
                ky = _key(y)
                if ky not in elems:
                    elems[ky] = y
                    word[ky] = (gi,) + word[_key(x)]
                    nxt.append(y)
        frontier = nxt
        if len(elems) > expected:
            raise RuntimeError("group closure exceeded expected order")
    if len(elems) != expected:
        raise RuntimeError(f"closure produced {len(elems)} elements, expected {expected}")
    return elems, word


def _element_order(x, e_key):
    y, n = x, 1
    while _key(y) != e_key:
        y = _mat_mul(y, x)
        n += 1
    return n


def _linear_characters(gens, elems, level: int, class_of) -> list[list[Cyclotomic]]:
    """All homomorphisms to mu_level, found by brute force over generator images."""
    keys = list(elems)
    out = []
    import itertools

    edges = [(k, gi, _key(_mat_mul(g, elems[k]))) for k in keys for gi, g in enumerate(gens)]
    e_key = keys[0]
    for imgs in itertools.product(range(level), repeat=len(gens)):
        val = {e_key: 0}
        ok = True
        # propagate along the Cayley graph, checking consistency on every edge
        pending = True
        while pending and ok:
            pending = False
            for k, gi, ky in edges:
                if k in val:
                    v = (val[k] + imgs[gi]) % level
                    if ky not in val:
                        val[ky] = v
                        pending = True
                    elif val[ky] != v:
                        ok = False
                        break
        if ok and len(val) == len(keys):
            by_class = {}
            for k, v in val.items():
                by_class.setdefault(class_of[k], v)
            out.append([Cyclotomic.zeta(level, by_class[c]) for c in sorted(by_class)])
    return out


def _polyhedral(tag: str, fam: str, r: int) -> ADEGroupData:
    level, order, gens = _generators(fam, r)
    elems, _ = _close(gens, order)
    e_key = next(iter(elems))
    # conjugacy classes: orbits under conjugation by the generators
    class_of: dict = {}
    reps = []
    for k, x in elems.items():
        if k in class_of:
            continue
        idx = len(reps)
        reps.append(x)
        class_of[k] = idx
        stack = [x]
        while stack:
            y = stack.pop()
            for g in gens:
                z = _mat_mul(_mat_mul(g, y), _su2_inv(g))
                kz = _key(z)
                if kz not in class_of:
                    class_of[kz] = idx
                    stack.append(z)
    sizes = [0] * len(reps)
    for v in class_of.values():
        sizes[v] += 1
    traces = [x[0] + x[3] for x in reps]
    orders = [_element_order(x, e_key) for x in reps]
    # canonical class order: identity first, then by (order, trace coordinates)
    perm = sorted(range(len(reps)), key=lambda i: (orders[i], tuple(traces[i].coords)))
    inv_perm = {old: new for new, old in enumerate(perm)}
    class_of = {k: inv_perm[v] for k, v in class_of.items()}
    classes = tuple(ConjugacyClass(sizes[i], orders[i], traces[i]) for i in perm)
    prelim = ADEGroupData(tag, order, level, classes, (), ())
    linear = _linear_characters(gens, elems, level, class_of)
    table = _peel_characters(prelim, linear)
    irreps, nodes = _match_dynkin(prelim, table)
    return ADEGroupData(tag, order, level, classes, irreps, nodes)


def _peel_characters(g: ADEGroupData, linear) -> list[list[Cyclotomic]]:
    n = g.level
    units = [a for a in range(2, n) if gcd(a, n) == 1]
    found: list[list[Cyclotomic]] = []

    def add(chi):
        for f in found:
            if all(a == b for a, b in zip(f, chi)):
                return False
        found.append(chi)
        return True

    for lam in linear:
        add(lam)
    v = g.defining_character
    sym = [[Cyclotomic.rational(n, 1)] * len(v), list(v)]
    for _ in range(12):
        sym.append([t * a - b for t, a, b in zip(v, sym[-1], sym[-2])])
    target = g.order

    def dimsq():
        return sum(int(f[0].to_fraction()) ** 2 for f in found)

    candidates = list(sym[1:])
    seen = 0
    while dimsq() < target:
        if seen >= len(candidates):
            raise RuntimeError("character peeling stalled")
        psi = candidates[seen]
        seen += 1
        res = list(psi)
        for f in found:
            mult = g.inner(psi, f)
            if mult:
                res = [a - b * mult for a, b in zip(res, f)]
        if all(x.is_zero() for x in res):
            continue
        if g.inner(res, res) == 1 and res[0].to_fraction() > 0:
            if add(res):
                new = found[-1]
                candidates.extend([a * b for a, b in zip(new, lam)] for lam in linear)
                candidates.extend([x.galois(u) for x in new] for u in units)
                candidates.append([a * b for a, b in zip(new, v)])
        else:
            candidates.append(res)  # revisit once more irreducibles are known
            if seen > 5000:
                raise RuntimeError("character peeling stalled")
    return found


def _match_dynkin(g: ADEGroupData, table):
    """Order irreps as trivial first, then along Dynkin nodes 1..r."""
    trivial = next(i for i, row in enumerate(table) if all(x == 1 for x in row))
    adj = _mckay_matrix(g, table)
    others = [i for i in range(len(table)) if i != trivial]
    gm = nx.Graph()
    gm.add_nodes_from(others)
    for a in others:
        for b in others:
            if a < b and adj[a][b]:
                gm.add_edge(a, b)
    dyn = nx.Graph()
    tag = g.type_tag
    r = parse_tag(tag)[1]
    dyn.add_nodes_from(range(1, r + 1))
    dyn.add_edges_from(_edges(tag))
    matcher = nx.algorithms.isomorphism.GraphMatcher(dyn, gm)
    best = None
    for mapping in matcher.isomorphisms_iter():
        cand = tuple(mapping[node] for node in range(1, r + 1))
        if best is None or cand < best:
            best = cand
    if best is None:
        raise McKayMismatch(f"McKay graph of {tag} is not the Dynkin diagram")
    rows = [table[trivial]] + [table[i] for i in best]
    return tuple(tuple(r_) for r_ in rows), tuple(range(1, r + 1))


def _mckay_matrix(g: ADEGroupData, table) -> list[list[int]]:
    v = g.defining_character
    out = []
    for chi in table:
        prod = [a * b for a, b in zip(v, chi)]
        out.append([int(g.inner(prod, psi)) for psi in table])
    return out


@lru_cache(maxsize=None)
def ade_group(tag: str) -> ADEGroupData:
    fam, r = parse_tag(tag)
    tag = f"{fam}{r}"
    if fam == "A":
        return _cyclic(tag, r + 1)
    return _polyhedral(tag, fam, r)


def tag_for_order(order: int, cyclic: bool) -> str:
    """ADE tag of a finite subgroup of SU(2) from its order and cyclicity."""
    if cyclic:
        return f"A{order - 1}"
    if order == 24:
        return "E6"
    if order == 48:
        return "E7"
    if order == 120:
        return "E8"
    if order % 4 == 0 and order >= 8:
        return f"D{order // 4 + 2}"
    raise ValueError(f"no non-cyclic subgroup of SU(2) of order {order}")


def mckay_graph(g: ADEGroupData) -> list[list[int]]:
    """Multiplicity of irrep j in (defining rep) x irrep i; verified against the affine diagram."""
    adj = _mckay_matrix(g, g.character_table)
    expected = affine_adjacency(g.type_tag)
    if not _same_multigraph(adj, expected):
        raise McKayMismatch(f"McKay graph of {g.type_tag} differs from the affine diagram")
    return adj


def _same_multigraph(a, b) -> bool:
    if len(a) != len(b):
        return False

    def graph(m):
        gr = nx.Graph()
        gr.add_nodes_from(range(len(m)))
        for i in range(len(m)):
            for j in range(i, len(m)):
                if m[i][j]:
                    gr.add_edge(i, j, w=m[i][j])
        return gr

    return nx.is_isomorphic(graph(a), graph(b), edge_match=lambda x, y: x["w"] == y["w"])


_WEIGHTS: dict[tuple[str, int], list[Cyclotomic]] = {}


def _boundary_weights(g: ADEGroupData) -> list[Cyclotomic]:
    """size / (2 - tr) for each non-identity class."""
    key = (g.type_tag, g.order)
    if key not in _WEIGHTS:
        _WEIGHTS[key] = [(2 - cl.su2_trace).inverse() * cl.size for cl in g.classes[1:]]
    return _WEIGHTS[key]


def index_correction(g: ADEGroupData, chi, dim: int) -> Fraction:
    """(2/|G|) * sum over g != e of (chi(g) - dim) / (2 - tr g)."""
    chi = [c if isinstance(c, Cyclotomic) else Cyclotomic.rational(g.level, c) for c in chi]
    if chi[0] != dim:
        raise ValueError("class function must take the value dim at the identity")
    tot = Cyclotomic.rational(g.level, 0)
    for w, val in zip(_boundary_weights(g), chi[1:]):
        tot = tot + (val - dim) * w
    tot = tot * Fraction(2, g.order)
    if not tot.is_rational():
        raise NonRationalResult(f"boundary term {tot} is not rational")
    return tot.to_fraction()


# --- cyclic instantons -----------------------------------------------------


@dataclass(frozen=True)
class InstantonDescriptor:
    kind: str  # "Trivial" | "Cyclic_Anm"
    k: int
    n: int
    m: int
    energy: Fraction
    rigid: bool
    w2_class: tuple[int, ...]
    monodromy_at_infinity: str

    def adjoint_character(self) -> list[Cyclotomic]:
        """Character of the so(3) fibre at infinity on the classes of Z_k."""
        k, m = self.k, self.m
        return [1 + Cyclotomic.zeta(k, m * j) + Cyclotomic.zeta(k, -m * j) for j in range(k)]

    @property
    def ade_tag(self) -> str:
        return f"A{self.k - 1}"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "n": self.n,
            "m": self.m,
            "energy": str(self.energy),
            "rigid": self.rigid,
            "w2_class": list(self.w2_class),
            "monodromy_at_infinity": self.monodromy_at_infinity,
        }


def trivial_descriptor(k: int) -> InstantonDescriptor:
    return InstantonDescriptor("Trivial", k, 0, 0, Fraction(0), True, (0,) * k, "trivial")


def cyclic_energy(k: int, m: int) -> Fraction:
    mb = m % k
    return Fraction((k - mb) * mb, k)


def instanton_descriptor(k: int, n: int, m: int) -> InstantonDescriptor:
    """A_{n,m} on E_{n,m} = R + (R_n^* x R_{n+m}) over an ALE space asymptotic to C^2/Z_k."""
    if k < 2:
        raise ValueError("k must be at least 2")
    n, m = n % k, m % k
    if m == 0:
        d = trivial_descriptor(k)
        return InstantonDescriptor(d.kind, k, n, 0, d.energy, True, d.w2_class, d.monodromy_at_infinity)
    w2 = [0] * k
    w2[(n + m) % k] += 1
    w2[n] -= 1
    w2[0] = 0  # c1(R_0) = 0
    w2 = tuple(x % 2 for x in w2)
    return InstantonDescriptor("Cyclic_Anm", k, n, m, cyclic_energy(k, m), True, w2, f"rho_{m}")


def instanton_index(d: InstantonDescriptor) -> int:
    """2 * energy + boundary correction of the adjoint bundle."""
    if d.kind == "Trivial":
        # any energy with trivial monodromy leaves only the bulk term
        val = 2 * d.energy
    else:
        val = 2 * d.energy + index_correction(ade_group(d.ade_tag), d.adjoint_character(), 3)
    if val.denominator != 1 or val < 0:
        raise NonIntegerIndex(f"index {val} is not a non-negative integer")
    return int(val)


def w2_pairings(d: InstantonDescriptor) -> list[int]:
    """<w2(E), Sigma_l> mod 2 for l = 1..k-1, using c1(R_i) dual to Sigma_i."""
    return [d.w2_class[i] % 2 for i in range(1, d.k)]


@lru_cache(maxsize=None)
def _cos_weights(k: int) -> tuple[Cyclotomic, ...]:
    return tuple((1 - Cyclotomic.cos2pi(k, j)).inverse() for j in range(1, k))


def character_sum(k: int, m: int) -> Fraction:
    """sum_{j=1}^{k-1} (1 - cos(2 pi m j / k)) / (1 - cos(2 pi j / k)), exactly."""
    if k < 2:
        raise ValueError("k must be at least 2")
    acc = Cyclotomic.rational(k, 0)
    for j, w in enumerate(_cos_weights(k), start=1):
        acc = acc + w * (1 - Cyclotomic.cos2pi(k, m * j))
    if not acc.is_rational():
        raise NonRationalResult(f"character sum for k={k}, m={m} is not rational")
    return acc.to_fraction()
