"""Finite groups of affine isometries of T^7 = R^7/Z^7 and their singular sets.

Points of the torus are vectors of Fractions reduced into [0, 1).  Lifts to
R^7 (deck transformations) keep their full translation part.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import exact
from .ade import tag_for_order
from .forms import PHI0, AlternatingForm, HyperkahlerTriple, NotProductForm, extract_triple, pullback

DIM = 7
DEFAULT_BOUND = 10000

IntMatrix = tuple[tuple[int, ...], ...]


class NotClosed(RuntimeError):
    """Closure exceeded the element bound."""


class NotAdmissible(ValueError):
    def __init__(self, stratum: str, reason: str):
        super().__init__(f"{stratum}: {reason}")
        self.stratum = stratum
        self.reason = reason


def _mod1(v: Iterable) -> tuple[Fraction, ...]:
    return tuple(exact.frac(x) % 1 for x in v)


def _as_int_matrix(rows) -> IntMatrix:
    out = []
    for row in rows:
        r = []
        for x in row:
            q = exact.frac(x)
            if q.denominator != 1:
                raise ValueError(f"linear part entry {x!r} is not an integer")
            r.append(int(q))
        out.append(tuple(r))
    return tuple(out)


def _imatvec(a: IntMatrix, v):
    out = []
    for row in a:
        acc = Fraction(0)
        for x, y in zip(row, v):
            if x and y:
                acc += x * y
        out.append(acc)
    return tuple(out)


def _imatmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in zip(*b)) for row in a)


def _transpose(a: IntMatrix) -> IntMatrix:
    return tuple(zip(*a))


IDENTITY: IntMatrix = tuple(tuple(int(i == j) for j in range(DIM)) for i in range(DIM))


def _check_orthogonal(a: IntMatrix):
    if len(a) != DIM or any(len(r) != DIM for r in a):
        raise ValueError("linear part must be 7x7")
    if _imatmul(a, _transpose(a)) != IDENTITY:
        raise ValueError("linear part is not orthogonal (A A^T != I)")


@dataclass(frozen=True)
class AffineIsometry:
    """x -> A x + t on T^7, with t reduced into [0, 1)."""

    linear: IntMatrix
    translation: tuple[Fraction, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        lin = _as_int_matrix(self.linear)
        _check_orthogonal(lin)
        if len(self.translation) != DIM:
            raise ValueError("translation must have 7 entries")
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", _mod1(self.translation))

    @classmethod
    def identity(cls) -> "AffineIsometry":
        return cls(IDENTITY, (0,) * DIM, "id")

    @classmethod
    def from_signs(cls, signs: Sequence[int], translation: Sequence = (0,) * DIM, name: str = "") -> "AffineIsometry":
        """Diagonal linear part, e.g. from_signs([1, 1, 1, -1, -1, -1, -1])."""
        lin = tuple(tuple(signs[i] if i == j else 0 for j in range(DIM)) for i in range(DIM))
        return cls(lin, tuple(translation), name)

    def __matmul__(self, other: "AffineIsometry") -> "AffineIsometry":
        """Composition self o other."""
        t = tuple(a + b for a, b in zip(_imatvec(self.linear, other.translation), self.translation))
        return AffineIsometry(_imatmul(self.linear, other.linear), t)

    def inverse(self) -> "AffineIsometry":
        at = _transpose(self.linear)
        return AffineIsometry(at, tuple(-x for x in _imatvec(at, self.translation)))

    def apply(self, x) -> tuple[Fraction, ...]:
        return _mod1(a + b for a, b in zip(_imatvec(self.linear, x), self.translation))

    def is_identity(self) -> bool:
        return self.linear == IDENTITY and not any(self.translation)

    def lift(self) -> "DeckElement":
        return DeckElement(self.linear, self.translation)

    @property
    def key(self):
        return (self.linear, self.translation)


def preserves_phi(g: AffineIsometry, phi: AlternatingForm = PHI0) -> bool:
    return pullback(phi, g.linear) == phi


# --- deck transformations ---------------------------------------------------


@dataclass(frozen=True)
class DeckElement:
    """x -> A x + t on R^7 (translation not reduced)."""

    linear: IntMatrix
    translation: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "linear", _as_int_matrix(self.linear))
        object.__setattr__(self, "translation", tuple(exact.frac(x) for x in self.translation))

    @classmethod
    def tau(cls, n: Sequence[int]) -> "DeckElement":
        return cls(IDENTITY, tuple(n))

    def __matmul__(self, other: "DeckElement") -> "DeckElement":
        t = tuple(a + b for a, b in zip(_imatvec(self.linear, other.translation), self.translation))
        return DeckElement(_imatmul(self.linear, other.linear), t)

    def inverse(self) -> "DeckElement":
        at = _transpose(self.linear)
        return DeckElement(at, tuple(-x for x in _imatvec(at, self.translation)))

    def __pow__(self, n: int) -> "DeckElement":
        out = DeckElement(IDENTITY, (0,) * DIM)
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            out = out @ base
        return out

    def apply(self, x) -> tuple[Fraction, ...]:
        return tuple(a + b for a, b in zip(_imatvec(self.linear, x), self.translation))

    def point_image(self) -> AffineIsometry:
        return AffineIsometry(self.linear, self.translation)

    def is_translation(self) -> bool:
        return self.linear == IDENTITY

    def lattice_vector(self) -> tuple[int, ...] | None:
        if self.linear != IDENTITY or any(x.denominator != 1 for x in self.translation):
            return None
        return tuple(int(x) for x in self.translation)

    def fixed_subspace(self):
        """(point, direction basis) of the affine fixed set in R^7, or None."""
        m = [[Fraction(self.linear[i][j] - (i == j)) for j in range(DIM)] for i in range(DIM)]
        x = exact.solve(m, [-t for t in self.translation])
        if x is None:
            return None
        return tuple(x), exact.nullspace(m)


# --- group closure ----------------------------------------------------------


@dataclass
class FiniteGroup:
    """Elements of a finite group of torus isometries with BFS words.

    ``words[i]`` is a tuple of generator indices (g_a, g_b, ...) meaning the
    composition g_a o g_b o ...; element 0 is the identity.
    """

    generators: list[AffineIsometry]
    elements: list[AffineIsometry]
    words: list[tuple[int, ...]]
    index: dict

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, i: int, j: int) -> int:
        return self.index[(self.elements[i] @ self.elements[j]).key]

    def inv(self, i: int) -> int:
        return self.index[self.elements[i].inverse().key]

    def table(self) -> list[list[int]]:
        return [[self.mul(i, j) for j in range(self.order)] for i in range(self.order)]

    def element_order(self, i: int) -> int:
        k, n = i, 1
        while k != 0:
            k = self.mul(k, i)
            n += 1
        return n

    def subgroup_closure(self, idx: Iterable[int]) -> set[int]:
        gens = list(idx)
        out = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(g, x)
                    if y not in out:
                        out.add(y)
                        nxt.append(y)
            frontier = nxt
        return out


def group_closure(generators: Sequence[AffineIsometry], bound: int = DEFAULT_BOUND) -> FiniteGroup:
    if bound < 1:
        raise ValueError("bound must be >= 1")
    e = AffineIsometry.identity()
    elements = [e]
    words: list[tuple[int, ...]] = [()]
    index = {e.key: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for gi, g in enumerate(generators):
                y = g @ elements[x]
                if y.key not in index:
                    if len(elements) >= bound:
                        raise NotClosed(f"more than {bound} elements")
                    index[y.key] = len(elements)
                    elements.append(y)
                    words.append((gi,) + words[x])
                    nxt.append(index[y.key])
        frontier = nxt
    return FiniteGroup(list(generators), elements, words, index)


# --- subtori ----------------------------------------------------------------


def _annihilator(direction: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """HNF basis of {q in Z^7 : q . l = 0 for l in direction}."""
    return _annihilator_cached(tuple(tuple(int(x) for x in v) for v in direction))


@lru_cache(maxsize=4096)
def _annihilator_cached(direction: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    if not direction:
        return IDENTITY
    ker = exact.integer_kernel([list(v) for v in direction], DIM)
    return tuple(exact.hermite_rows(ker))


def _saturate(vectors: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """HNF basis of (span_Q vectors) intersected with Z^7."""
    return _saturate_cached(tuple(tuple(int(x) for x in v) for v in vectors if any(v)))


@lru_cache(maxsize=4096)
def _saturate_cached(vecs: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    if not vecs:
        return ()
    return tuple(exact.hermite_rows(exact.integer_kernel(_annihilator(vecs), DIM)))


@dataclass(frozen=True)
class AffineSubtorus:
    """basepoint + span(direction) mod Z^7, direction a saturated lattice basis."""

    basepoint: tuple[Fraction, ...]
    direction: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        d = tuple(_saturate(self.direction))
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "basepoint", self._canonical_point(_mod1(self.basepoint), d))

    @staticmethod
    def _canonical_point(b, d):
        if not d:
            return b
        coord = [next(i for i, x in enumerate(v) if x) for v in d]
        if all(sum(1 for x in v if x) == 1 for v in d):
            return tuple(Fraction(0) if i in coord else x for i, x in enumerate(b))
        q = _annihilator(d)
        u, dd, v = exact.smith_normal_form(q)
        w = exact.int_inverse_unimodular(v)
        y = [sum(w[i][j] * b[j] for j in range(DIM)) for i in range(DIM)]
        r = len(q)
        y = [y[i] % 1 if i < r else Fraction(0) for i in range(DIM)]
        return _mod1(sum(v[i][j] * y[j] for j in range(DIM)) for i in range(DIM))

    @property
    def dim(self) -> int:
        return len(self.direction)

    @property
    def key(self):
        return (self.direction, self.basepoint)

    def coordinate_directions(self) -> tuple[int, ...] | None:
        """Coordinate indices spanning the direction, if it is a coordinate subspace."""
        out = []
        for v in self.direction:
            nz = [i for i, x in enumerate(v) if x]
            if len(nz) != 1:
                return None
            out.append(nz[0])
        return tuple(sorted(out))

    def image(self, g: AffineIsometry) -> "AffineSubtorus":
        lin = g.linear
        d = [tuple(int(x) for x in _imatvec(lin, v)) for v in self.direction]
        return AffineSubtorus(g.apply(self.basepoint), tuple(d))

    def _offset_in(self, other: "AffineSubtorus", point) -> bool:
        q = _annihilator(other.direction)
        diff = [a - b for a, b in zip(point, other.basepoint)]
        return all(sum(x * y for x, y in zip(row, diff)).denominator == 1 for row in q)

    def contains_point(self, x) -> bool:
        return AffineSubtorus(x, ())._offset_in(self, x)

    def is_subset_of(self, other: "AffineSubtorus") -> bool:
        q = _annihilator(other.direction)
        if any(sum(a * b for a, b in zip(row, v)) for row in q for v in self.direction):
            return False
        return self._offset_in(other, self.basepoint)

    def intersects(self, other: "AffineSubtorus") -> bool:
        joint = AffineSubtorus(other.basepoint, tuple(self.direction) + tuple(other.direction))
        return self._offset_in(joint, self.basepoint)

    def to_json(self) -> dict:
        return {"basepoint": [str(x) for x in self.basepoint], "direction": [list(v) for v in self.direction]}

    def __str__(self):
        pt = "(" + ", ".join(str(x) for x in self.basepoint) + ")"
        return f"{pt} + span{[list(v) for v in self.direction]}"


def fixed_locus(g: AffineIsometry) -> list[AffineSubtorus]:
    """Components of {x : g x = x} on T^7 via Smith normal form of A - I."""
    m = [[g.linear[i][j] - (i == j) for j in range(DIM)] for i in range(DIM)]
    u, d, v = exact.smith_normal_form(m)
    # D y = c (mod Z^7) with y = V^-1 x and c = -U t
    c = [-sum(u[i][k] * g.translation[k] for k in range(DIM)) for i in range(DIM)]
    diag = [d[i][i] for i in range(DIM)]
    r = sum(1 for x in diag if x)
    if any(c[i].denominator != 1 for i in range(r, DIM)):
        return []
    free = [tuple(v[row][j] for row in range(DIM)) for j in range(r, DIM)]
    choices = [[(c[i] + k) / diag[i] for k in range(diag[i])] for i in range(r)]
    out = {}
    for ys in itertools.product(*choices):
        y = list(ys) + [Fraction(0)] * (DIM - r)
        x = [sum(v[i][j] * y[j] for j in range(DIM)) for i in range(DIM)]
        t = AffineSubtorus(tuple(x), tuple(free))
        out[t.key] = t
    return [out[k] for k in sorted(out)]


def fixes_pointwise(g: AffineIsometry, t: AffineSubtorus) -> bool:
    if any(tuple(int(x) for x in _imatvec(g.linear, v)) != v for v in t.direction):
        return False
    return g.apply(t.basepoint) == t.basepoint


# --- presentations and strata ----------------------------------------------


@dataclass
class OrbifoldPresentation:
    generators: dict[str, AffineIsometry]
    phi: AlternatingForm = PHI0
    _groups: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name, g in self.generators.items():
            if not preserves_phi(g, self.phi):
                raise ValueError(f"generator {name} does not preserve the 3-form")
            object.__setattr__(g, "name", name)

    @property
    def names(self) -> list[str]:
        return list(self.generators)

    def group(self, bound: int = DEFAULT_BOUND) -> FiniteGroup:
        cached = self._groups.get(bound)
        if cached is None:
            cached = self._groups[bound] = group_closure(list(self.generators.values()), bound)
        return cached

    def singular_set(self, bound: int = DEFAULT_BOUND) -> "SingularSet":
        key = ("singular", bound)
        if key not in self._groups:
            self._groups[key] = singular_set(self.group(bound))
        return self._groups[key]

    def deck_group(self, bound: int = DEFAULT_BOUND) -> "DeckGroup":
        key = ("deck", bound)
        if key not in self._groups:
            self._groups[key] = deck_group(self, bound)
        return self._groups[key]


@dataclass
class SingularStratum:
    name: str
    representative: AffineSubtorus
    orbit_size: int
    base_type: str
    stabilizer: tuple[int, ...]  # element indices mapping the component to itself
    fixers: tuple[int, ...]  # elements fixing it pointwise (G_j, with identity)
    translations: tuple[int, ...]  # stabilizer elements with identity linear part
    h_cosets: tuple[tuple[int, ...], ...]  # stabilizer / (translations x G), identity coset first

    @property
    def dim(self) -> int:
        return self.representative.dim

    @property
    def h_order(self) -> int:
        return len(self.h_cosets)

    @property
    def g_order(self) -> int:
        return len(self.fixers)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "representative": self.representative.to_json(),
            "dim": self.dim,
            "orbit_size": self.orbit_size,
            "base_type": self.base_type,
            "G_order": self.g_order,
            "H_order": self.h_order,
        }


@dataclass
class SingularSet:
    group: FiniteGroup
    strata: list[SingularStratum]
    # pairs of distinct maximal fixed components that meet
    intersections: list[tuple[AffineSubtorus, AffineSubtorus]]

    def by_name(self, name: str) -> SingularStratum:
        return next(s for s in self.strata if s.name == name)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for s in self.strata:
            out[s.base_type] = out.get(s.base_type, 0) + 1
        return dict(sorted(out.items()))


def _direction_key(t: AffineSubtorus):
    return tuple(tuple(-x for x in v) for v in t.direction)


def singular_set(y: OrbifoldPresentation | FiniteGroup, bound: int = DEFAULT_BOUND) -> SingularSet:
    grp = y if isinstance(y, FiniteGroup) else y.group(bound)
    comps: dict = {}
    for i in range(1, grp.order):
        for t in fixed_locus(grp.elements[i]):
            comps.setdefault(t.key, t)
    allc = [comps[k] for k in sorted(comps)]
    maximal = [t for t in allc if not any(o is not t and t.dim < o.dim and t.is_subset_of(o) for o in allc)]
    inter = [
        (a, b)
        for a, b in itertools.combinations(maximal, 2)
        if a.intersects(b)
    ]
    seen: set = set()
    raw = []
    for t in maximal:
        if t.key in seen:
            continue
        orbit = {}
        for g in grp.elements:
            im = t.image(g)
            orbit[im.key] = im
        seen.update(orbit)
        rep = orbit[min(orbit)]
        stab = tuple(i for i, g in enumerate(grp.elements) if rep.image(g).key == rep.key)
        fix = tuple(i for i in stab if fixes_pointwise(grp.elements[i], rep))
        trans = tuple(i for i in stab if grp.elements[i].linear == IDENTITY)
        normal = {grp.mul(a, b) for a in trans for b in fix}
        cosets = []
        placed: set = set()
        for i in stab:
            if i in placed:
                continue
            cos = tuple(sorted({grp.mul(i, n) for n in normal}))
            placed.update(cos)
            cosets.append(cos)
        h = len(cosets)
        base = f"T{rep.dim}" if h == 1 else f"T{rep.dim}/{_group_label(grp, stab, normal, cosets)}"
        raw.append((rep, len(orbit), base, stab, fix, trans, tuple(cosets)))
    raw.sort(key=lambda r: (r[0].dim, r[2], _direction_key(r[0]), r[0].basepoint))
    strata = [
        SingularStratum(f"S_{n + 1}", rep, size, base, stab, fix, trans, cos)
        for n, (rep, size, base, stab, fix, trans, cos) in enumerate(raw)
    ]
    return SingularSet(grp, strata, inter)


def _group_label(grp: FiniteGroup, stab, normal, cosets) -> str:
    h = len(cosets)
    # H is cyclic iff some coset generates the quotient
    for cos in cosets:
        i = cos[0]
        k, n = i, 1
        while k not in normal:
            k = grp.mul(k, i)
            n += 1
        if n == h:
            return f"Z{h}"
    return f"H{h}"


# --- local models -----------------------------------------------------------


@dataclass
class HElement:
    element: int
    line_linear: tuple[tuple[int, ...], ...]
    line_translation: tuple[Fraction, ...]
    omega_signs: tuple[int, int, int]

    def to_json(self, grp: FiniteGroup, names: Sequence[str]) -> dict:
        return {
            "element": word_string(grp.words[self.element], names),
            "line_linear": [list(r) for r in self.line_linear],
            "line_translation": [str(x) for x in self.line_translation],
            "omega_signs": list(self.omega_signs),
        }


@dataclass
class LocalModel:
    stratum: str
    g_tag: str
    g_order: int
    normal_actions: list[tuple[tuple[int, ...], ...]]
    h: list[HElement]
    triple: HyperkahlerTriple

    @property
    def h_trivial(self) -> bool:
        return len(self.h) <= 1

    def to_json(self, grp: FiniteGroup, names: Sequence[str]) -> dict:
        return {
            "stratum": self.stratum,
            "G": self.g_tag,
            "G_order": self.g_order,
            "G_normal_actions": [[list(r) for r in m] for m in self.normal_actions],
            "H_order": len(self.h),
            "H": [e.to_json(grp, names) for e in self.h],
            "splitting": [[i + 1 for i in self.triple.splitting[0]], [i + 1 for i in self.triple.splitting[1]]],
        }


def local_model(ss: SingularSet, s: SingularStratum, phi: AlternatingForm = PHI0) -> LocalModel:
    grp = ss.group
    if s.dim != 3:
        raise NotAdmissible(s.name, f"stratum has dimension {s.dim}, not 3")
    if any(s.representative.key in (a.key, b.key) for a, b in ss.intersections):
        raise NotAdmissible(s.name, "stratum meets another fixed component")
    line = s.representative.coordinate_directions()
    if line is None:
        raise NotAdmissible(s.name, "stratum is not a coordinate subtorus (unsupported)")
    normal = tuple(i for i in range(DIM) if i not in line)
    try:
        triple = extract_triple(phi, (line, normal))
    except NotProductForm as exc:
        raise NotAdmissible(s.name, f"no hyperkahler splitting: {exc}") from exc
    actions = []
    for i in s.fixers:
        g = grp.elements[i]
        for w in triple.omega:
            if pullback(w, g.linear) != w:
                raise NotAdmissible(s.name, "normal action does not fix the hyperkahler triple")
        if i:
            actions.append(tuple(tuple(g.linear[a][b] for b in normal) for a in normal))
    order = len(s.fixers)
    if order < 2:
        raise NotAdmissible(s.name, "trivial local group")
    cyclic = any(grp.element_order(i) == order for i in s.fixers)
    tag = tag_for_order(order, cyclic)
    helems = []
    fixsets = {}
    for cos in s.h_cosets:
        for i in cos:
            if i in s.fixers:
                continue
            if i not in fixsets:
                fixsets[i] = fixed_locus(grp.elements[i])
            if any(c.intersects(s.representative) for c in fixsets[i]):
                raise NotAdmissible(s.name, "H does not act freely on the T^3 factor")
        rep = cos[0]
        g = grp.elements[rep]
        signs = []
        for w in triple.omega:
            pw = pullback(w, g.linear)
            if pw == w:
                signs.append(1)
            elif pw == -w:
                signs.append(-1)
            else:
                raise NotAdmissible(s.name, "H mixes the hyperkahler triple (unsupported)")
        lin = tuple(tuple(g.linear[a][b] for b in line) for a in line)
        helems.append(HElement(rep, lin, tuple(g.translation[a] for a in line), tuple(signs)))
    return LocalModel(s.name, tag, order, actions, helems, triple)


# --- deck group and local fundamental groups --------------------------------


def word_string(word: Sequence[int], names: Sequence[str], lattice: Sequence[int] | None = None) -> str:
    parts = []
    if lattice is not None:
        for i, n in enumerate(lattice):
            if n:
                parts.append(f"tau{i + 1}" + ("" if n == 1 else f"^{n}"))
    parts.extend(names[i] for i in word)
    return " ".join(parts) if parts else "1"


@dataclass
class DeckGroup:
    presentation: OrbifoldPresentation
    group: FiniteGroup
    lifts: dict[str, DeckElement]
    canonical: list[DeckElement]  # canonical lift of each point-group element
    commutators: dict[tuple[str, str], tuple[int, ...] | None]
    powers: dict[str, tuple[int, tuple[int, ...]]]
    # Schreier relations s o l(p) = tau^c o l(s p): (generator, p, sp, c)
    schreier: list[tuple[str, int, int, tuple[int, ...]]]

    @property
    def names(self) -> list[str]:
        return self.presentation.names

    def element(self, word: str) -> DeckElement:
        """Parse a word like ``"tau4^-1 tau5^-1 beta sigma1"`` into a deck element."""
        out = DeckElement(IDENTITY, (0,) * DIM)
        for tok in word.split():
            base, _, exp = tok.partition("^")
            n = int(exp) if exp else 1
            if base.startswith("tau") and base[3:].isdigit():
                v = [0] * DIM
                v[int(base[3:]) - 1] = 1
                g = DeckElement.tau(v)
            elif base == "1":
                continue
            elif base in self.lifts:
                g = self.lifts[base]
            else:
                raise ValueError(f"unknown generator {base!r} in word {word!r}")
            out = out @ (g ** n)
        return out

    def point_index(self, x: DeckElement) -> int:
        return self.group.index[x.point_image().key]

    def normal_form(self, x: DeckElement) -> tuple[tuple[int, ...], int]:
        """(n, p) with x = tau^n o l(p)."""
        p = self.point_index(x)
        n = (x @ self.canonical[p].inverse()).lattice_vector()
        assert n is not None
        return n, p

    def relation_table(self) -> dict:
        return {
            "commutators": {f"{a},{b}": (list(v) if v is not None else None) for (a, b), v in self.commutators.items()},
            "powers": {k: {"order": o, "lattice": list(v)} for k, (o, v) in self.powers.items()},
        }


def deck_group(y: OrbifoldPresentation, bound: int = DEFAULT_BOUND) -> DeckGroup:
    grp = y.group(bound)
    names = y.names
    lifts = {n: g.lift() for n, g in y.generators.items()}
    lift_list = [lifts[n] for n in names]
    canonical = []
    for w in grp.words:
        x = DeckElement(IDENTITY, (0,) * DIM)
        for i in w:
            x = x @ lift_list[i]
        canonical.append(x)
    comm = {}
    for a, b in itertools.combinations(names, 2):
        ga, gb = lifts[a], lifts[b]
        c = ga @ gb @ ga.inverse() @ gb.inverse()
        comm[(a, b)] = c.lattice_vector()
    powers = {}
    for i, n in enumerate(names):
        g = lifts[n]
        o = grp.element_order(grp.index[y.generators[n].key])
        powers[n] = (o, (g ** o).lattice_vector())
    schreier = []
    for p in range(grp.order):
        for si, n in enumerate(names):
            x = lift_list[si] @ canonical[p]
            sp = grp.index[x.point_image().key]
            c = (x @ canonical[sp].inverse()).lattice_vector()
            schreier.append((n, p, sp, c))
    return DeckGroup(y, grp, lifts, canonical, comm, powers, schreier)


@dataclass
class DeckSubgroup:
    """Subgroup of the deck group given by generators; supports membership tests."""

    generators: list[DeckElement]
    point_lifts: dict  # point-image key -> chosen element of the subgroup
    lattice: list[tuple[int, ...]]  # HNF basis of the subgroup's translations

    @classmethod
    def generated_by(cls, gens: Sequence[DeckElement]) -> "DeckSubgroup":
        e = DeckElement(IDENTITY, (0,) * DIM)
        lifts = {e.point_image().key: e}
        frontier = [e]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = g @ x
                    k = y.point_image().key
                    if k not in lifts:
                        lifts[k] = y
                        nxt.append(y)
            frontier = nxt
        vecs = []
        for x in lifts.values():
            for g in gens:
                y = g @ x
                v = (lifts[y.point_image().key].inverse() @ y).lattice_vector()
                assert v is not None
                vecs.append(v)
        return cls(list(gens), lifts, exact.hermite_rows(vecs))

    def contains(self, x: DeckElement) -> bool:
        k = x.point_image().key
        if k not in self.point_lifts:
            return False
        v = (self.point_lifts[k].inverse() @ x).lattice_vector()
        if v is None:
            return False
        if not any(v):
            return True
        if not self.lattice:
            return False
        basis_t = [list(col) for col in zip(*self.lattice)]
        return exact.solve_integer(basis_t, list(v)) is not None

    @property
    def point_order(self) -> int:
        return len(self.point_lifts)


@dataclass
class LocalFundamentalGroup:
    stratum: str
    basepoint: tuple[Fraction, ...]  # lifted plane: basepoint + span(direction) in R^7
    direction: tuple[tuple[int, ...], ...]
    z3: list[tuple[str, DeckElement]]
    g: list[tuple[str, DeckElement]]
    h: list[tuple[str, DeckElement]]
    point_images: tuple[int, ...]

    @property
    def generators(self) -> list[tuple[str, DeckElement]]:
        return self.z3 + self.g + self.h

    def subgroup(self) -> DeckSubgroup:
        return DeckSubgroup.generated_by([x for _, x in self.generators])

    def stabilizes_plane(self, x: DeckElement) -> bool:
        return plane_image_equal(x, self.basepoint, self.direction, self.basepoint, self.direction)

    def to_json(self) -> dict:
        return {
            "stratum": self.stratum,
            "plane": {"basepoint": [str(v) for v in self.basepoint], "direction": [list(v) for v in self.direction]},
            "Z3": [w for w, _ in self.z3],
            "G": [w for w, _ in self.g],
            "H": [w for w, _ in self.h],
        }


def plane_image_equal(x: DeckElement, b1, d1, b2, d2) -> bool:
    """Does x map the plane b1 + span(d1) in R^7 onto b2 + span(d2)?"""
    q = _annihilator(d2)
    imgd = [_imatvec(x.linear, v) for v in d1]
    if any(sum(a * b for a, b in zip(row, v)) for row in q for v in imgd):
        return False
    if len(d1) != len(d2):
        return False
    diff = [a - b for a, b in zip(x.apply(b1), b2)]
    return all(sum(a * b for a, b in zip(row, diff)) == 0 for row in q)


def translate_onto_plane(dg: DeckGroup, x: DeckElement, b, d, b2=None, d2=None) -> DeckElement | None:
    """tau^n o x mapping plane (b, d) onto plane (b2, d2) (default: itself), or None."""
    b2 = b if b2 is None else b2
    d2 = d if d2 is None else d2
    q = _annihilator(d2)
    imgd = [_imatvec(x.linear, v) for v in d]
    if any(sum(a * c for a, c in zip(row, v)) for row in q for v in imgd):
        return None
    off = [a - c for a, c in zip(x.apply(b), b2)]
    rhs = [-sum(a * c for a, c in zip(row, off)) for row in q]
    if any(r.denominator != 1 for r in rhs):
        return None
    n = exact.solve_integer([list(r) for r in q], [int(r) for r in rhs])
    if n is None:
        return None
    return DeckElement.tau(n) @ x


def local_pi1(dg: DeckGroup, ss: SingularSet, s: SingularStratum) -> LocalFundamentalGroup:
    grp = dg.group
    names = dg.names
    b = s.representative.basepoint
    d = s.representative.direction

    def lift(p: int, exact_fix: bool) -> tuple[str, DeckElement]:
        base = dg.canonical[p]
        if exact_fix:
            n = [bi - v for bi, v in zip(b, base.apply(b))]
            assert all(v.denominator == 1 for v in n)
            x = DeckElement.tau(n) @ base
        else:
            x = translate_onto_plane(dg, base, b, d)
            assert x is not None
        nvec = (x @ base.inverse()).lattice_vector()
        return word_string(grp.words[p], names, nvec), x

    z3 = []
    for v in d:
        x = DeckElement.tau(v)
        z3.append((word_string((), names, v), x))
    # point-group pieces: greedy generating sets in index order
    trans = [i for i in s.translations if i]
    span: set = {0}
    for i in trans:
        if i not in span:
            z3.append(lift(i, False))
            span = grp.subgroup_closure(span | {i})
    # drop lattice generators already produced by the others (e.g. sigma^2 = tau2 tau4)
    k = 0
    while k < min(len(d), len(z3)):
        rest = z3[:k] + z3[k + 1 :]
        if z3[k][1].is_translation() and DeckSubgroup.generated_by([x for _, x in rest]).contains(z3[k][1]):
            z3 = rest
        else:
            k += 1
    gpart = []
    gspan: set = {0}
    for i in s.fixers:
        if i and i not in gspan:
            gpart.append(lift(i, True))
            gspan = grp.subgroup_closure(gspan | {i})
    normal = {grp.mul(a, c) for a in s.translations for c in s.fixers}
    hpart = []
    hspan = set(normal)
    for cos in s.h_cosets[1:]:
        i = cos[0]
        if i not in hspan:
            hpart.append(lift(i, False))
            hspan = grp.subgroup_closure(hspan | {i})
    return LocalFundamentalGroup(s.name, b, d, z3, gpart, hpart, tuple(s.stabilizer))


def conjugating_element(dg: DeckGroup, b1, d1, b2, d2) -> DeckElement | None:
    """A deck element mapping the plane (b1, d1) onto (b2, d2), if one exists."""
    for p in range(dg.group.order):
        x = translate_onto_plane(dg, dg.canonical[p], b1, d1, b2, d2)
        if x is not None:
            return x
    return None


def conjugate_subgroups(dg: DeckGroup, gens1: Sequence[DeckElement], gens2: Sequence[DeckElement], delta: DeckElement) -> bool:
    """Is delta <gens1> delta^-1 == <gens2>?"""
    s1 = DeckSubgroup.generated_by(gens1)
    s2 = DeckSubgroup.generated_by(gens2)
    di = delta.inverse()
    return all(s2.contains(delta @ g @ di) for g in gens1) and all(s1.contains(di @ g @ delta) for g in gens2)


# --- invariant forms --------------------------------------------------------


def invariant_form_dimensions(grp: FiniteGroup) -> list[int]:
    key = frozenset(g.linear for g in grp.elements)
    if key not in _INVARIANT_CACHE:
        _INVARIANT_CACHE[key] = _invariant_form_dimensions(key)
    return list(_INVARIANT_CACHE[key])


_INVARIANT_CACHE: dict = {}


def _invariant_form_dimensions(linears) -> list[int]:
    """dim of the constant k-forms fixed by every linear part, k = 0..7.

    Enumerates the basis monomials, averages each over the group and takes
    the rank of the averages.
    """
    out = []
    for k in range(DIM + 1):
        basis = list(itertools.combinations(range(DIM), k))
        rows = []
        for idx in basis:
            acc: dict = {}
            for a in linears:
                f = pullback(AlternatingForm(k, {idx: 1}), a)
                for key, c in f.terms.items():
                    acc[key] = acc.get(key, Fraction(0)) + c
            rows.append([acc.get(key, Fraction(0)) for key in basis])
        out.append(exact.rank(rows))
    return out
