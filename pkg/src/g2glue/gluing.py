"""Flat SO(3) connections on T^7/Gamma, regularity and gluing-data search."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import exact
from .ade import InstantonDescriptor, instanton_descriptor, parse_tag, trivial_descriptor, w2_pairings
from .cyclotomic import Cyclotomic
from .orbifold import (
    IDENTITY,
    DeckElement,
    DeckGroup,
    LocalFundamentalGroup,
    LocalModel,
    NotAdmissible,
    OrbifoldPresentation,
    SingularSet,
    SingularStratum,
    deck_group,
    invariant_form_dimensions,
    local_model,
    local_pi1,
    singular_set,
)

Matrix3 = tuple[tuple[Fraction, ...], ...]


class RelationViolation(ValueError):
    def __init__(self, relation: str):
        super().__init__(f"relation violated: {relation}")
        self.relation = relation


class Unsupported(ValueError):
    pass


@dataclass(frozen=True)
class GaugeElement:
    matrix: Matrix3
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        m = tuple(tuple(exact.frac(x) for x in row) for row in self.matrix)
        if len(m) != 3 or any(len(r) != 3 for r in m):
            raise ValueError("gauge element must be 3x3")
        if [list(r) for r in exact.matmul(m, exact.transpose(m))] != exact.identity(3):
            raise ValueError("gauge element is not orthogonal")
        if exact.det(m) != 1:
            raise ValueError("gauge element must have determinant 1")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def _trusted(cls, matrix, label=None) -> "GaugeElement":
        # products and inverses of SO(3) elements need no re-validation
        out = object.__new__(cls)
        object.__setattr__(out, "matrix", matrix)
        object.__setattr__(out, "label", label)
        return out

    def __matmul__(self, other: "GaugeElement") -> "GaugeElement":
        a, b = self.matrix, other.matrix
        return GaugeElement._trusted(
            tuple(tuple(a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j] for j in range(3)) for i in range(3))
        )

    def inverse(self) -> "GaugeElement":
        return GaugeElement._trusted(tuple(zip(*self.matrix)), _inverse_label(self.label))

    def __pow__(self, n: int) -> "GaugeElement":
        out = ONE
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            out = out @ base
        return out

    def commutes_with(self, other: "GaugeElement") -> bool:
        return self @ other == other @ self

    def is_identity(self) -> bool:
        return self == ONE

    @property
    def trace(self) -> Fraction:
        return sum(self.matrix[i][i] for i in range(3))

    def name(self) -> str:
        if self.label:
            return self.label
        hit = next((k for k, v in KLEIN.items() if v == self), None)
        return hit or str([[str(x) for x in r] for r in self.matrix])

    def to_json(self):
        hit = next((k for k, v in KLEIN.items() if v == self), None)
        if hit:
            return hit
        return [[str(x) for x in r] for r in self.matrix]


def _inverse_label(label):
    return label if label in KLEIN else None


def _diag(*d) -> GaugeElement:
    return GaugeElement(tuple(tuple(Fraction(d[i]) if i == j else Fraction(0) for j in range(3)) for i in range(3)))


ONE = GaugeElement(tuple(tuple(Fraction(int(i == j)) for j in range(3)) for i in range(3)), "1")
KLEIN: dict[str, GaugeElement] = {
    "1": ONE,
    "a": GaugeElement(_diag(1, -1, -1).matrix, "a"),
    "b": GaugeElement(_diag(-1, 1, -1).matrix, "b"),
    "c": GaugeElement(_diag(-1, -1, 1).matrix, "c"),
}
V = tuple(KLEIN.values())


def gauge(value) -> GaugeElement:
    """A Klein-group label ("1", "a", "b", "c") or a 3x3 matrix."""
    if isinstance(value, GaugeElement):
        return value
    if isinstance(value, str):
        if value not in KLEIN:
            raise ValueError(f"unknown gauge label {value!r}")
        return KLEIN[value]
    return GaugeElement(tuple(tuple(row) for row in value))


# --- representations --------------------------------------------------------


@dataclass
class FlatConnectionRep:
    """Images of the named generators; tau_i default to the identity."""

    assignment: dict[str, GaugeElement]
    validated: bool = False

    @classmethod
    def from_labels(cls, labels: Mapping[str, object]) -> "FlatConnectionRep":
        return cls({k: gauge(v) for k, v in labels.items()})

    @classmethod
    def trivial(cls, names: Sequence[str]) -> "FlatConnectionRep":
        return cls({n: ONE for n in names})

    def tau(self, i: int) -> GaugeElement:
        return self.assignment.get(f"tau{i + 1}", ONE)

    def tau_power(self, n: Sequence[int]) -> GaugeElement:
        out = ONE
        for i, k in enumerate(n):
            if k:
                out = out @ (self.tau(i) ** k)
        return out

    def restricted(self, names: Sequence[str]) -> "FlatConnectionRep":
        keep = {k: v for k, v in self.assignment.items() if k in names or k.startswith("tau")}
        return FlatConnectionRep(keep)

    def to_json(self) -> dict:
        return {k: v.to_json() for k, v in sorted(self.assignment.items())}


def _word_image(rep: FlatConnectionRep, dg: DeckGroup, p: int) -> GaugeElement:
    out = ONE
    for i in dg.group.words[p]:
        out = out @ rep.assignment[dg.names[i]]
    return out


def evaluate(rep: FlatConnectionRep, dg: DeckGroup, x: DeckElement) -> GaugeElement:
    """rho(x) via the normal form x = tau^n o l(p)."""
    n, p = dg.normal_form(x)
    return rep.tau_power(n) @ _word_image(rep, dg, p)


def validate_rep(rep: FlatConnectionRep, dg: DeckGroup) -> FlatConnectionRep:
    """Check a complete presentation of the deck group.

    Relations: the tau_i commute; s tau_k s^-1 = tau^(A_s e_k); and
    s l(p) = tau^c l(sp) for every generator s and point-group element p.
    """
    missing = [n for n in dg.names if n not in rep.assignment]
    if missing:
        raise ValueError(f"representation misses generators: {', '.join(missing)}")
    extra = [k for k in rep.assignment if k not in dg.names and not (k.startswith("tau") and k[3:].isdigit() and 1 <= int(k[3:]) <= 7)]
    if extra:
        raise ValueError(f"representation names unknown generators: {', '.join(extra)}")
    for i in range(7):
        for j in range(i + 1, 7):
            if not rep.tau(i).commutes_with(rep.tau(j)):
                raise RelationViolation(f"tau{i + 1} tau{j + 1} = tau{j + 1} tau{i + 1}")
    for name in dg.names:
        s = rep.assignment[name]
        lin = dg.lifts[name].linear
        for k in range(7):
            col = [lin[r][k] for r in range(7)]
            if s @ rep.tau(k) @ s.inverse() != rep.tau_power(col):
                raise RelationViolation(f"{name} tau{k + 1} {name}^-1 = tau^{col}")
    images = [_word_image(rep, dg, p) for p in range(dg.group.order)]
    for name, p, sp, c in dg.schreier:
        if rep.assignment[name] @ images[p] != rep.tau_power(c) @ images[sp]:
            w = " ".join(dg.names[i] for i in dg.group.words[p]) or "1"
            w2 = " ".join(dg.names[i] for i in dg.group.words[sp]) or "1"
            raise RelationViolation(f"{name} ({w}) = tau^{list(c)} ({w2})")
    rep.validated = True
    return rep


# --- monodromy and regularity ----------------------------------------------


@dataclass
class Monodromy:
    stratum: str
    mu_g: list[tuple[str, GaugeElement]]
    mu_h: list[tuple[str, GaugeElement]]
    mu_z3: list[tuple[str, GaugeElement]]
    g_trivial: bool
    weight: int | None  # m with tr = 1 + 2 cos(2 pi m / k), cyclic G only

    @property
    def z3_trivial(self) -> bool:
        return all(x.is_identity() for _, x in self.mu_z3)

    def to_json(self) -> dict:
        return {
            "stratum": self.stratum,
            "mu_G": {w: x.to_json() for w, x in self.mu_g},
            "mu_H": {w: x.to_json() for w, x in self.mu_h},
            "mu_Z3": {w: x.to_json() for w, x in self.mu_z3},
            "G_trivial": self.g_trivial,
            "weight": self.weight,
        }


def rotation_weight(x: GaugeElement, k: int) -> int | None:
    """Least m in [0, k/2] with tr x = 1 + 2 cos(2 pi m / k), if x^k = 1."""
    if not (x ** k).is_identity():
        return None
    tr = Cyclotomic.rational(k, x.trace)
    for m in range(k // 2 + 1):
        if Cyclotomic.cos2pi(k, m) * 2 + 1 == tr:
            return m
    return None


def monodromy_restriction(rep: FlatConnectionRep, dg: DeckGroup, lp: LocalFundamentalGroup, g_order: int) -> Monodromy:
    mu_g = [(w, evaluate(rep, dg, x)) for w, x in lp.g]
    mu_h = [(w, evaluate(rep, dg, x)) for w, x in lp.h]
    mu_z = [(w, evaluate(rep, dg, x)) for w, x in lp.z3]
    trivial = all(x.is_identity() for _, x in mu_g)
    weight = None
    if len(mu_g) == 1:
        weight = rotation_weight(mu_g[0][1], g_order)
    elif trivial:
        weight = 0
    return Monodromy(lp.stratum, mu_g, mu_h, mu_z, trivial, weight)


@dataclass
class Regularity:
    regular: bool
    fixed_dim_g: int
    fixed_dim_R7g: int

    def to_json(self) -> dict:
        return {"regular": self.regular, "fixed_dim_g": self.fixed_dim_g, "fixed_dim_R7g": self.fixed_dim_R7g}


def _kron(a, b):
    n, m = len(a), len(b)
    return [[a[i // m][j // m] * b[i % m][j % m] for j in range(n * m)] for i in range(n * m)]


def _common_fixed_dim(mats, n: int) -> int:
    rows = []
    for m in mats:
        for i in range(n):
            rows.append([Fraction(m[i][j]) - (i == j) for j in range(n)])
    if not rows:
        return n
    return n - exact.rank(rows)


def regularity_check(rep: FlatConnectionRep, y: OrbifoldPresentation) -> Regularity:
    """Fixed vectors of pi_1 on so(3) + R^7 (x) so(3); Ad on so(3) is the defining rep of SO(3)."""
    acts = [(g.linear, rep.assignment[n].matrix) for n, g in y.generators.items()]
    acts += [(IDENTITY, rep.tau(i).matrix) for i in range(7)]
    fg = _common_fixed_dim([r for _, r in acts], 3)
    fr = _common_fixed_dim([_kron(a, r) for a, r in acts], 21)
    return Regularity(fg == 0 and fr == 0, fg, fr)


# --- lifting the H-action ---------------------------------------------------

RESOLUTION, SMOOTHING = "resolution", "smoothing"


@dataclass
class ResolutionChoice:
    """Per-stratum Resolution or Smoothing of C^2/G_j.

    The period of a resolution lies along omega_3 and that of a smoothing
    along omega_1 or omega_2, so the sign by which h in H acts on H^2(X_j)
    is the sign of h on the corresponding Kahler form.
    """

    per_stratum: dict[str, str] = field(default_factory=dict)
    default: str = SMOOTHING

    def __post_init__(self):
        for k, v in list(self.per_stratum.items()) + [("default", self.default)]:
            if v not in (RESOLUTION, SMOOTHING):
                raise ValueError(f"{k}: choice must be 'resolution' or 'smoothing', got {v!r}")

    def of(self, stratum: str) -> str:
        return self.per_stratum.get(stratum, self.default)

    def period_direction(self, stratum: str, model: LocalModel) -> int:
        """Index (0-based) of the Kahler form carrying the period."""
        if self.of(stratum) == RESOLUTION:
            return 2
        for i in (0, 1):
            if all(e.omega_signs[i] == 1 for e in model.h):
                return i
        return 0

    def h2_signs(self, stratum: str, model: LocalModel) -> list[int]:
        i = self.period_direction(stratum, model)
        return [e.omega_signs[i] for e in model.h]

    def to_json(self) -> dict:
        return {"default": self.default, "per_stratum": dict(sorted(self.per_stratum.items()))}


@dataclass
class LiftResult:
    exists: bool
    rule: str
    h2_sign: int
    compose_with: GaugeElement | None = None
    reason: str = ""

    def to_json(self) -> dict:
        out = {"exists": self.exists, "rule": self.rule, "h2_sign": self.h2_sign}
        if self.compose_with is not None:
            out["compose_with"] = self.compose_with.to_json()
        if self.reason:
            out["reason"] = self.reason
        return out


# rule table: (name, predicate on (descriptor, sign)); first match decides existence
LIFT_RULES: tuple[tuple[str, str], ...] = (
    ("trivial-descriptor", "product connection: any constant gauge lift works"),
    ("h2-sign-plus", "H acts trivially on H^2(X), so it fixes c_1 of the reducible summands"),
    ("h2-sign-minus", "H negates H^2(X) and cannot preserve a non-flat A_{n,m}"),
)


def lift_existence(
    d: InstantonDescriptor,
    h2_sign: int,
    boundary_action: GaugeElement,
    mu_g: Sequence[GaugeElement],
    candidates: Sequence[GaugeElement] = V,
) -> LiftResult:
    """Lift of one H-element to (E_j, A_j) with prescribed action at infinity."""
    if d.kind == "Trivial":
        rule = LIFT_RULES[0][0]
    elif h2_sign == 1:
        rule = LIFT_RULES[1][0]
    else:
        return LiftResult(False, LIFT_RULES[2][0], h2_sign, reason="H acts by -1 on H^2(X) but A_j is not flat")
    compose = None
    if not boundary_action.is_identity():
        if boundary_action not in candidates:
            return LiftResult(False, rule, h2_sign, reason=f"boundary action {boundary_action.name()} not in the gauge candidates")
        if not all(boundary_action.commutes_with(g) for g in mu_g):
            return LiftResult(False, rule, h2_sign, reason=f"boundary action {boundary_action.name()} does not centralize mu|G")
        compose = boundary_action
    return LiftResult(True, rule, h2_sign, compose)


# --- gluing data ------------------------------------------------------------


@dataclass
class StratumGluing:
    stratum: str
    choice: str
    descriptor: InstantonDescriptor
    h_lifts: list[tuple[str, LiftResult]]
    m_assignment: list[tuple[str, GaugeElement]]
    basepoint: tuple[Fraction, ...]
    h2_signs: list[int]

    def to_json(self) -> dict:
        return {
            "stratum": self.stratum,
            "choice": self.choice,
            "descriptor": self.descriptor.to_json(),
            "h_lift": {w: r.to_json() for w, r in self.h_lifts},
            "m_assignment": {w: g.to_json() for w, g in self.m_assignment},
            "basepoint": [str(x) for x in self.basepoint],
        }


@dataclass
class GluingDataCertificate:
    rep: FlatConnectionRep
    strata: list[StratumGluing]
    choices: ResolutionChoice

    def by_name(self, name: str) -> StratumGluing:
        return next(s for s in self.strata if s.stratum == name)

    def to_json(self) -> dict:
        return {
            "representation": self.rep.to_json(),
            "choices": self.choices.to_json(),
            "strata": [s.to_json() for s in self.strata],
        }


@dataclass
class Obstruction:
    stratum: str
    bullet: str
    reason: str

    def to_json(self) -> dict:
        return {"stratum": self.stratum, "bullet": self.bullet, "reason": self.reason}


@dataclass
class ObstructionList:
    obstructions: list[Obstruction]

    @property
    def strata(self) -> list[str]:
        return sorted({o.stratum for o in self.obstructions}, key=_stratum_order)

    def to_json(self) -> dict:
        return {"obstructed_strata": self.strata, "obstructions": [o.to_json() for o in self.obstructions]}


def _stratum_order(name: str):
    return int(name.split("_")[1]) if name.startswith("S_") and name[2:].isdigit() else name


def descriptor_for(mono: Monodromy, g_order: int) -> InstantonDescriptor:
    if mono.g_trivial:
        return trivial_descriptor(g_order)
    if mono.weight is None:
        raise Unsupported(f"{mono.stratum}: mu|G is not a cyclic rotation representation")
    return instanton_descriptor(g_order, 0, mono.weight)


@dataclass
class StratumData:
    stratum: SingularStratum
    model: LocalModel
    pi1: LocalFundamentalGroup
    mono: Monodromy


def stratum_data(y: OrbifoldPresentation, rep: FlatConnectionRep, ss: SingularSet | None = None, dg: DeckGroup | None = None) -> list[StratumData]:
    ss = ss or y.singular_set()
    dg = dg or y.deck_group()
    out = []
    for s in ss.strata:
        model = local_model(ss, s, y.phi)
        lp = local_pi1(dg, ss, s)
        out.append(StratumData(s, model, lp, monodromy_restriction(rep, dg, lp, model.g_order)))
    return out


def _check_stratum(
    sd: StratumData,
    choices: ResolutionChoice,
    candidates: Sequence[GaugeElement],
    rep: FlatConnectionRep,
    dg: DeckGroup,
) -> tuple[StratumGluing | None, list[Obstruction]]:
    name = sd.stratum.name
    mono = sd.mono
    obs: list[Obstruction] = []
    if len(sd.model.h) > 2 or (len(sd.model.h) == 2 and sd.model.g_order != 2 and not mono.g_trivial):
        raise Unsupported(f"{name}: only H = Z_2 over A_1, or trivial H, is supported")
    d = descriptor_for(mono, sd.model.g_order)
    mu_g = [x for _, x in mono.mu_g]
    signs = choices.h2_signs(name, sd.model)
    # H bullet
    lifts = []
    for (w, x), sign in zip(mono.mu_h, signs[1:]):
        r = lift_existence(d, sign, x, mu_g, candidates)
        lifts.append((w, r))
        if not r.exists:
            obs.append(Obstruction(name, "H-lift", f"{w}: {r.reason} ({choices.of(name)})"))
    # Z^3 bullet: constant gauge transformations equal to mu at infinity
    m_assign = []
    for w, x in mono.mu_z3:
        if x not in candidates:
            obs.append(Obstruction(name, "Z3", f"{w}: {x.name()} is not in the gauge candidates"))
        elif d.kind != "Trivial" and not all(x.commutes_with(g) for g in mu_g):
            obs.append(Obstruction(name, "Z3", f"{w}: {x.name()} does not preserve A_j"))
        m_assign.append((w, x))
    # commutation bullet, checked on the fibre at infinity
    for (hw, hx), (_, hg) in zip(sd.pi1.h, mono.mu_h):
        for (zw, zx), (_, zg) in zip(sd.pi1.z3, m_assign):
            conj = evaluate(rep, dg, hx @ zx @ hx.inverse())
            if hg @ zg @ hg.inverse() != conj:
                obs.append(Obstruction(name, "commutation", f"rho({hw}) m({zw}) rho({hw})^-1 != m({hw} {zw} {hw}^-1)"))
    if obs:
        return None, obs
    return StratumGluing(name, choices.of(name), d, lifts, m_assign, sd.stratum.representative.basepoint, signs), []


def find_gluing_data(
    y: OrbifoldPresentation,
    rep: FlatConnectionRep,
    choices: ResolutionChoice | None = None,
    candidates: Sequence[GaugeElement] = V,
    ss: SingularSet | None = None,
    dg: DeckGroup | None = None,
) -> GluingDataCertificate | ObstructionList:
    choices = choices or ResolutionChoice()
    dg = dg or y.deck_group()
    if not rep.validated:
        validate_rep(rep, dg)
    ss = ss or y.singular_set()
    pieces, obs = [], []
    for sd in stratum_data(y, rep, ss, dg):
        sg, o = _check_stratum(sd, choices, candidates, rep, dg)
        obs.extend(o)
        if sg is not None:
            pieces.append(sg)
    if obs:
        return ObstructionList(obs)
    return GluingDataCertificate(rep, pieces, choices)


def verify_certificate(cert: GluingDataCertificate, y: OrbifoldPresentation, candidates: Sequence[GaugeElement] = V) -> bool:
    """Re-run all three bullet checks on a certificate."""
    again = find_gluing_data(y, FlatConnectionRep(dict(cert.rep.assignment)), cert.choices, candidates)
    return isinstance(again, GluingDataCertificate) and again.to_json() == cert.to_json()


# --- topology ---------------------------------------------------------------


@dataclass
class TopologyReport:
    p1_coefficients: list[tuple[str, Fraction]]
    w2_pairings: dict[str, list[int]]
    betti: tuple[int, int, int]
    orbifold_betti: tuple[int, int, int]
    contributions: dict[str, tuple[int, int]]

    def to_json(self) -> dict:
        return {
            "p1_coefficients": {n: str(k) for n, k in self.p1_coefficients},
            "w2_pairings": self.w2_pairings,
            "betti": list(self.betti),
            "orbifold_betti": list(self.orbifold_betti),
            "stratum_contributions": {n: list(v) for n, v in self.contributions.items()},
        }


def betti_contribution(model: LocalModel, signs: Sequence[int]) -> tuple[int, int]:
    """(dim H^2(X)^H, dim (H^1(T^3) x H^2(X))^H) by averaging characters over H."""
    r = parse_tag(model.g_tag)[1]
    if model.h_trivial:
        return r, 3 * r
    if r != 1:
        raise Unsupported(f"{model.stratum}: H-action on H^2(X) of rank {r} not supported")
    h = len(model.h)
    b2 = Fraction(sum(signs), h)
    b3 = Fraction(sum(sum(e.line_linear[i][i] for i in range(3)) * s for e, s in zip(model.h, signs)), h)
    if b2.denominator != 1 or b3.denominator != 1:
        raise Unsupported(f"{model.stratum}: H does not act through a group of order {h}")
    return int(b2), int(b3)


def topology_report(
    cert: GluingDataCertificate,
    y: OrbifoldPresentation,
    ss: SingularSet | None = None,
) -> TopologyReport:
    ss = ss or y.singular_set()
    dims = invariant_form_dimensions(ss.group)
    orb = (dims[1], dims[2], dims[3])
    b1, b2, b3 = orb
    contrib = {}
    p1 = []
    w2 = {}
    for s, piece in zip(ss.strata, cert.strata):
        model = local_model(ss, s, y.phi)
        db2, db3 = betti_contribution(model, piece.h2_signs)
        contrib[s.name] = (db2, db3)
        b2 += db2
        b3 += db3
        p1.append((s.name, piece.descriptor.energy))
        pair = w2_pairings(piece.descriptor)
        # exceptional classes surviving in Y_t are the H-invariant ones
        invariant = model.h_trivial or all(x == 1 for x in piece.h2_signs)
        w2[s.name] = pair if invariant else []
    return TopologyReport(p1, w2, (b1, b2, b3), orb, contrib)
