"""Constant-coefficient exterior forms on R^7 and the G2 linear algebra built on them.

Multi-indices are strictly increasing tuples of 0-based coordinates
internally; serialisation and the ``dx`` helper use 1-based labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import exact

DIM = 7


class Degenerate(ValueError):
    """The 3-form lies in no open GL(7)-orbit."""


class UnsupportedMetric(ValueError):
    """The induced volume is not rational, so the Hodge star is not exact."""


class SpectrumMismatch(ArithmeticError):
    pass


class NotProductForm(ValueError):
    pass


def _sort_sign(seq: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Parity of the sorting permutation, or 0 on a repeated index."""
    if len(set(seq)) != len(seq):
        return 0, ()
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return (-1 if inv % 2 else 1), tuple(sorted(seq))


@dataclass(frozen=True)
class AlternatingForm:
    degree: int
    terms: Mapping[tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for idx, c in self.terms.items():
            idx = tuple(idx)
            if len(idx) != self.degree or list(idx) != sorted(set(idx)) or not all(0 <= i < DIM for i in idx):
                raise ValueError(f"bad multi-index {idx} for degree {self.degree}")
            c = exact.frac(c)
            if c:
                clean[idx] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    # -- construction helpers
    @classmethod
    def zero(cls, degree: int) -> "AlternatingForm":
        return cls(degree, {})

    @classmethod
    def from_dict(cls, degree: int, raw: Mapping[Sequence[int], object]) -> "AlternatingForm":
        """Accepts arbitrary (unsorted) index tuples and folds in the sign."""
        acc: dict[tuple[int, ...], Fraction] = {}
        for idx, c in raw.items():
            s, key = _sort_sign(list(idx))
            if s:
                acc[key] = acc.get(key, Fraction(0)) + s * exact.frac(c)
        return cls(degree, acc)

    def coef(self, idx: Iterable[int]) -> Fraction:
        s, key = _sort_sign(list(idx))
        return s * self.terms.get(key, Fraction(0)) if s else Fraction(0)

    def __add__(self, other: "AlternatingForm") -> "AlternatingForm":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        return AlternatingForm(self.degree, acc)

    def __neg__(self):
        return AlternatingForm(self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "AlternatingForm":
        c = exact.frac(c)
        return AlternatingForm(self.degree, {k: c * v for k, v in self.terms.items()})

    __rmul__ = scale

    def __xor__(self, other: "AlternatingForm") -> "AlternatingForm":
        return wedge(self, other)

    def is_zero(self) -> bool:
        return not self.terms

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "terms": [{"idx": [i + 1 for i in k], "coef": str(v)} for k, v in self.terms.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "AlternatingForm":
        deg = int(data["degree"])
        raw = {tuple(i - 1 for i in t["idx"]): t["coef"] for t in data["terms"]}
        return cls.from_dict(deg, raw)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in self.terms.items():
            name = "dx^" + "".join(str(i + 1) for i in k) if k else "1"
            parts.append(f"{v}*{name}" if v != 1 else name)
        return " + ".join(parts)


def dx(*labels: int) -> AlternatingForm:
    """``dx(1, 2, 3)`` is dx^1 ^ dx^2 ^ dx^3 (1-based labels)."""
    return AlternatingForm.from_dict(len(labels), {tuple(i - 1 for i in labels): 1})


def one() -> AlternatingForm:
    return AlternatingForm(0, {(): 1})


VOL = dx(1, 2, 3, 4, 5, 6, 7)

PHI0 = dx(1, 2, 3) + dx(1, 4, 5) + dx(1, 6, 7) + dx(2, 4, 6) - dx(2, 5, 7) - dx(3, 4, 7) - dx(3, 5, 6)


def wedge(a: AlternatingForm, b: AlternatingForm) -> AlternatingForm:
    deg = a.degree + b.degree
    if deg > DIM:
        return _empty(deg)
    acc: dict[tuple[int, ...], Fraction] = {}
    for ia, ca in a.terms.items():
        for ib, cb in b.terms.items():
            s, key = _sort_sign(ia + ib)
            if s:
                acc[key] = acc.get(key, Fraction(0)) + s * ca * cb
    return AlternatingForm(deg, acc)


def _empty(deg: int) -> AlternatingForm:
    # degrees outside [0, 7] have no basis elements; keep the degree tag
    obj = object.__new__(AlternatingForm)
    object.__setattr__(obj, "degree", deg)
    object.__setattr__(obj, "terms", {})
    return obj


def interior(u: Sequence, a: AlternatingForm) -> AlternatingForm:
    """Contraction i(u)a of a vector into the first slot."""
    u = [exact.frac(x) for x in u]
    if a.degree == 0:
        return _empty(-1)
    acc: dict[tuple[int, ...], Fraction] = {}
    for idx, c in a.terms.items():
        for r, i in enumerate(idx):
            if u[i]:
                key = idx[:r] + idx[r + 1:]
                acc[key] = acc.get(key, Fraction(0)) + (-1) ** r * u[i] * c
    return AlternatingForm(a.degree - 1, acc)


def basis_vector(i: int) -> list[Fraction]:
    return [Fraction(int(j == i)) for j in range(DIM)]


def pullback(a: AlternatingForm, mat: Sequence[Sequence]) -> AlternatingForm:
    """A^* a for the linear map x -> A x, i.e. (A^* a)(v, ...) = a(Av, ...)."""
    m = exact.to_matrix(mat)
    acc: dict[tuple[int, ...], Fraction] = {}
    cols = list(itertools.combinations(range(DIM), a.degree))
    for idx, c in a.terms.items():
        for jdx in cols:
            d = exact.det([[m[i][j] for j in jdx] for i in idx]) if idx else Fraction(1)
            if d:
                acc[jdx] = acc.get(jdx, Fraction(0)) + c * d
    return AlternatingForm(a.degree, acc)


def top_coefficient(a: AlternatingForm) -> Fraction:
    return a.terms.get(tuple(range(DIM)), Fraction(0))


def bilinear_form(phi: AlternatingForm) -> exact.Matrix:
    """B(u, v) = coefficient of i(u)phi ^ i(v)phi ^ phi on dx^{1..7}."""
    if phi.degree != 3:
        raise ValueError("need a 3-form")
    contr = [interior(basis_vector(i), phi) for i in range(DIM)]
    b = exact.zeros(DIM, DIM)
    for i in range(DIM):
        for j in range(i, DIM):
            b[i][j] = b[j][i] = top_coefficient(wedge(wedge(contr[i], contr[j]), phi))
    return b


@dataclass(frozen=True)
class Metric7:
    """Metric induced by a 3-form.

    ``entries`` is the genuine metric when ``volume`` is rational; otherwise it
    holds the bilinear form B (the conformal class) and ``volume`` is None
    with ``volume_ninth_power`` recording det(B)/6^7.
    """

    entries: tuple[tuple[Fraction, ...], ...]
    signature: tuple[int, int]
    volume: Fraction | None
    volume_ninth_power: Fraction

    @classmethod
    def euclidean(cls) -> "Metric7":
        return cls(tuple(map(tuple, exact.identity(DIM))), (DIM, 0), Fraction(1), Fraction(1))

    @property
    def matrix(self) -> exact.Matrix:
        return [list(r) for r in self.entries]

    @property
    def is_exact(self) -> bool:
        return self.volume is not None


@dataclass(frozen=True)
class MetricResult:
    metric: Metric7
    orbit: str  # "Definite" | "Split"
    bilinear: tuple[tuple[Fraction, ...], ...]


def nondegeneracy_and_metric(phi: AlternatingForm) -> MetricResult:
    b = bilinear_form(phi)
    d = exact.det(b)
    if d == 0:
        raise Degenerate("det B = 0: the 3-form is degenerate")
    sig = exact.signature(b)
    ninth = d / Fraction(6) ** 7
    if sig in ((7, 0), (0, 7)):
        orbit = "Definite"
    elif sig in ((3, 4), (4, 3)):
        orbit = "Split"
    else:
        raise Degenerate(f"non-degenerate B of unexpected signature {sig}")
    vol = exact.rational_odd_root(ninth, 9)
    if vol is None:
        entries = b
        metric_sig = sig
    else:
        entries = [[x / (6 * vol) for x in row] for row in b]
        metric_sig = exact.signature(entries)
    metric = Metric7(tuple(map(tuple, entries)), metric_sig, vol, ninth)
    return MetricResult(metric, orbit, tuple(map(tuple, b)))


def _gram_minor(ginv: exact.Matrix, i: tuple[int, ...], j: tuple[int, ...]) -> Fraction:
    if not i:
        return Fraction(1)
    return exact.det([[ginv[r][c] for c in j] for r in i])


def inner(a: AlternatingForm, b: AlternatingForm, g: Metric7 | None = None) -> Fraction:
    """Induced inner product on forms of equal degree."""
    if a.degree != b.degree:
        raise ValueError("degree mismatch")
    g = g or Metric7.euclidean()
    ginv = exact.inverse(g.matrix)
    return sum(
        (ca * cb * _gram_minor(ginv, i, j) for i, ca in a.terms.items() for j, cb in b.terms.items()),
        Fraction(0),
    )


def hodge_star(a: AlternatingForm, g: Metric7 | None = None, orientation: int = 1) -> AlternatingForm:
    """Hodge star fixed by b ^ *a = <b, a> vol_g for every b.

    The volume form is ``g.volume * dx^{1..7}``; ``orientation=-1`` flips it.
    """
    g = g or Metric7.euclidean()
    if not g.is_exact:
        raise UnsupportedMetric("volume is an irrational ninth root")
    if g.signature != (DIM, 0):
        raise UnsupportedMetric(f"metric of signature {g.signature} is not positive definite")
    vol = g.volume * orientation
    ginv = exact.inverse(g.matrix)
    k = a.degree
    full = tuple(range(DIM))
    acc: dict[tuple[int, ...], Fraction] = {}
    for kk in itertools.combinations(full, k):
        comp = tuple(x for x in full if x not in kk)
        s, _ = _sort_sign(kk + comp)
        val = sum((c * _gram_minor(ginv, kk, i) for i, c in a.terms.items()), Fraction(0))
        if val:
            acc[comp] = acc.get(comp, Fraction(0)) + s * vol * val
    return AlternatingForm(DIM - k, acc)


def theta(phi: AlternatingForm) -> AlternatingForm:
    """The coassociative 4-form *_phi phi."""
    res = nondegeneracy_and_metric(phi)
    if res.orbit != "Definite":
        raise Degenerate("theta needs a definite-orbit 3-form")
    m = res.metric
    orient = 1 if m.volume is None or m.volume > 0 else -1
    # the metric from B/(6 vol) is positive; the orientation sign lives in vol
    g = Metric7(m.entries, m.signature, abs(m.volume) if m.volume is not None else None, m.volume_ninth_power)
    return hodge_star(phi, g, orient)


def two_form_basis() -> list[tuple[int, int]]:
    return list(itertools.combinations(range(DIM), 2))


@dataclass(frozen=True)
class Lambda2Split:
    eigen2: list[AlternatingForm]
    eigen_minus1: list[AlternatingForm]

    @property
    def multiplicities(self) -> tuple[int, int]:
        return len(self.eigen2), len(self.eigen_minus1)


def _induced_metric(phi: AlternatingForm) -> tuple[Metric7, int]:
    res = nondegeneracy_and_metric(phi)
    if res.orbit != "Definite":
        raise Degenerate("need a definite-orbit 3-form")
    m = res.metric
    if m.volume is None:
        raise UnsupportedMetric("volume is an irrational ninth root")
    g = Metric7(m.entries, m.signature, abs(m.volume), m.volume_ninth_power)
    return g, (1 if m.volume > 0 else -1)


def lambda2_operator(phi: AlternatingForm) -> exact.Matrix:
    """Matrix of w -> *(phi ^ w) on the dx^{ij} basis (columns = images)."""
    g, orient = _induced_metric(phi)
    basis = two_form_basis()
    cols = []
    for i, j in basis:
        img = hodge_star(wedge(phi, AlternatingForm(2, {(i, j): 1})), g, orient)
        cols.append([img.terms.get(b, Fraction(0)) for b in basis])
    return exact.transpose(cols)


def lambda2_split(phi: AlternatingForm) -> Lambda2Split:
    t = lambda2_operator(phi)
    basis = two_form_basis()
    n = len(basis)

    def eigenspace(lam):
        shifted = [[t[r][c] - (lam if r == c else 0) for c in range(n)] for r in range(n)]
        return [AlternatingForm(2, dict(zip(basis, v))) for v in exact.nullspace(shifted)]

    e2, em1 = eigenspace(2), eigenspace(-1)
    if (len(e2), len(em1)) != (7, 14):
        raise SpectrumMismatch(f"eigenspace dimensions {(len(e2), len(em1))}, expected (7, 14)")
    return Lambda2Split(e2, em1)


def apply_lambda2(phi: AlternatingForm, w: AlternatingForm) -> AlternatingForm:
    g, orient = _induced_metric(phi)
    return hodge_star(wedge(phi, w), g, orient)


@dataclass(frozen=True)
class HyperkahlerTriple:
    omega: tuple[AlternatingForm, AlternatingForm, AlternatingForm]
    splitting: tuple[tuple[int, ...], tuple[int, ...]]  # 0-based (T^3 directions, normal directions)

    @property
    def vol4(self) -> AlternatingForm:
        n = self.splitting[1]
        return AlternatingForm(4, {n: 1})

    def gram(self) -> list[list[Fraction]]:
        """Coefficients c_ij with omega_i ^ omega_j = c_ij * dx^{normal}."""
        key = self.splitting[1]
        return [[wedge(a, b).terms.get(key, Fraction(0)) for b in self.omega] for a in self.omega]


def extract_triple(phi: AlternatingForm, splitting: tuple[Sequence[int], Sequence[int]]) -> HyperkahlerTriple:
    """Write phi = d123 + d1^w1 + d2^w2 - d3^w3 for a 3 + 4 coordinate splitting.

    ``splitting`` is 0-based; the three line directions are taken in
    increasing order.
    """
    line = tuple(sorted(splitting[0]))
    normal = tuple(sorted(splitting[1]))
    if len(line) != 3 or len(normal) != 4 or set(line) & set(normal) or len(set(line + normal)) != DIM:
        raise ValueError("splitting must partition the 7 coordinates into 3 + 4")
    if phi.degree != 3:
        raise NotProductForm("not a 3-form")
    d123 = AlternatingForm(3, {line: 1})
    if phi.terms.get(line, Fraction(0)) != 1:
        raise NotProductForm("coefficient of the line volume form is not 1")
    rest = phi - d123
    deltas = [AlternatingForm(1, {(i,): 1}) for i in line]
    signs = (1, 1, -1)
    omegas = []
    for s, i in zip(signs, line):
        w = interior(basis_vector(i), rest).scale(s)
        if any(not set(k) <= set(normal) for k in w.terms):
            raise NotProductForm("omega not supported on the normal directions")
        omegas.append(w)
    recon = d123
    for s, dlt, w in zip(signs, deltas, omegas):
        recon = recon + wedge(dlt, w).scale(s)
    if not (phi - recon).is_zero():
        raise NotProductForm(f"residual terms {phi - recon}")
    triple = HyperkahlerTriple(tuple(omegas), (line, normal))
    gram = triple.gram()
    c = gram[0][0]
    if c == 0 or any(gram[i][j] != (c if i == j else 0) for i in range(3) for j in range(3)):
        raise NotProductForm(f"omegas fail the quaternionic relations: {gram}")
    return triple


def product_form(splitting: tuple[Sequence[int], Sequence[int]]) -> AlternatingForm:
    """d123 + d1^w1 + d2^w2 - d3^w3 with the standard oriented triple on the normal factor."""
    line = tuple(sorted(splitting[0]))
    e = tuple(sorted(splitting[1]))
    w1 = AlternatingForm.from_dict(2, {(e[0], e[1]): 1, (e[2], e[3]): 1})
    w2 = AlternatingForm.from_dict(2, {(e[0], e[2]): 1, (e[1], e[3]): -1})
    w3 = AlternatingForm.from_dict(2, {(e[0], e[3]): 1, (e[1], e[2]): 1})
    d = [AlternatingForm(1, {(i,): 1}) for i in line]
    return (
        AlternatingForm(3, {line: 1})
        + wedge(d[0], w1)
        + wedge(d[1], w2)
        - wedge(d[2], w3)
    )


def metric_from_phi(phi: AlternatingForm) -> Metric7:
    """Shortcut for the induced metric alone."""
    return nondegeneracy_and_metric(phi).metric
