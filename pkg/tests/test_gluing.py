import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2glue.ade import instanton_descriptor, trivial_descriptor
from g2glue.gluing import (
    KLEIN,
    ONE,
    RESOLUTION,
    SMOOTHING,
    V,
    FlatConnectionRep,
    GaugeElement,
    GluingDataCertificate,
    ObstructionList,
    RelationViolation,
    ResolutionChoice,
    Unsupported,
    betti_contribution,
    evaluate,
    find_gluing_data,
    gauge,
    lift_existence,
    monodromy_restriction,
    regularity_check,
    rotation_weight,
    topology_report,
    validate_rep,
    verify_certificate,
)
from g2glue.orbifold import OrbifoldPresentation, local_model, local_pi1

from conftest import GAMMA

a, b, c = KLEIN["a"], KLEIN["b"], KLEIN["c"]
ROT90 = [[0, -1, 0], [1, 0, 0], [0, 0, 1]]


# --- gauge group -----------------------------------------------------------------


def test_klein_group():
    assert a @ b == c and b @ c == a and c @ a == b
    for x in V:
        assert (x @ x).is_identity()
        assert all(x.commutes_with(y) for y in V)
    assert [x.name() for x in V] == ["1", "a", "b", "c"]


def test_gauge_validation():
    assert gauge("a") == a
    r = gauge(ROT90)
    assert not r.is_identity() and (r**4).is_identity()
    assert r.trace == 1
    with pytest.raises(ValueError):
        gauge([[1, 0, 0], [0, 1, 0], [0, 0, -1]])  # orientation reversing
    with pytest.raises(ValueError):
        gauge([[2, 0, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(ValueError):
        gauge("d")


def test_gauge_inverse_and_commutation():
    r = gauge(ROT90)
    assert (r @ r.inverse()).is_identity()
    assert r.commutes_with(c) and not r.commutes_with(a)


@pytest.mark.parametrize("k,x,m", [(2, a, 1), (2, ONE, 0), (4, gauge(ROT90), 1), (2, gauge(ROT90), None)])
def test_rotation_weight(k, x, m):
    assert rotation_weight(x, k) == m


# --- representations ---------------------------------------------------------------


def test_example_reps_validate(cfgs):
    for name in ("example1", "example2", "example2_variant", "example3", "torus_gamma"):
        cfg = cfgs(name)
        rep = FlatConnectionRep(dict(cfg.representation.assignment))
        validate_rep(rep, cfg.presentation().deck_group())
        assert rep.validated


def test_relation_violation_sigma2_squared(ex1):
    # sigma2^2 = tau2 tau4, so rho(tau2) = a with everything else trivial breaks it
    labels = {n: "1" for n in ex1.names}
    labels["tau2"] = "a"
    with pytest.raises(RelationViolation):
        validate_rep(FlatConnectionRep.from_labels(labels), ex1.deck_group())


def test_relation_violation_order(ex1):
    labels = {n: "1" for n in ex1.names}
    rep = FlatConnectionRep.from_labels(labels)
    rep.assignment["alpha"] = gauge(ROT90)  # alpha^2 = 1 in the deck group
    with pytest.raises(RelationViolation):
        validate_rep(rep, ex1.deck_group())


def test_missing_or_unknown_generators(ex1):
    dg = ex1.deck_group()
    with pytest.raises(ValueError):
        validate_rep(FlatConnectionRep.from_labels({"alpha": "a"}), dg)
    labels = {n: "1" for n in ex1.names}
    labels["delta"] = "a"
    with pytest.raises(ValueError):
        validate_rep(FlatConnectionRep.from_labels(labels), dg)


words = st.lists(st.sampled_from(["alpha", "beta", "gamma", "sigma2", "sigma3", "tau1", "tau4^-1"]), min_size=1, max_size=5)


@settings(max_examples=60, deadline=None)
@given(words, words)
def test_evaluate_is_a_homomorphism(cfgs, w1, w2):
    cfg = cfgs("example1")
    y = cfg.presentation()
    dg = y.deck_group()
    rep = cfg.representation
    x, z = dg.element(" ".join(w1)), dg.element(" ".join(w2))
    assert evaluate(rep, dg, x @ z) == evaluate(rep, dg, x) @ evaluate(rep, dg, z)
    # generator by generator
    direct = ONE
    for w in w1:
        base, _, e = w.partition("^")
        g = rep.assignment[base] if base in rep.assignment else rep.tau(int(base[3:]) - 1)
        direct = direct @ (g ** (int(e) if e else 1))
    assert evaluate(rep, dg, x) == direct


# --- monodromy and regularity --------------------------------------------------------


def test_monodromy_example1(cfgs, ex1):
    rep = cfgs("example1").representation
    ss, dg = ex1.singular_set(), ex1.deck_group()
    for s in ss.strata:
        mono = monodromy_restriction(rep, dg, local_pi1(dg, ss, s), s.g_order)
        if s.name == "S_1":
            assert not mono.g_trivial and mono.weight == 1
            assert dict(mono.mu_g) == {"alpha": a}
        else:
            assert mono.g_trivial and mono.weight == 0


def test_regularity_example1(cfgs, ex1, gamma_only):
    rep = cfgs("example1").representation
    r = regularity_check(rep, ex1)
    assert r.regular and (r.fixed_dim_g, r.fixed_dim_R7g) == (0, 0)
    r = regularity_check(rep.restricted(GAMMA), gamma_only)
    assert not r.regular
    r = regularity_check(FlatConnectionRep.trivial(ex1.names), ex1)
    assert (r.regular, r.fixed_dim_g, r.fixed_dim_R7g) == (False, 3, 0)


@pytest.mark.parametrize("name", ["example2", "example2_variant", "example3"])
def test_other_examples_regular(cfgs, name):
    cfg = cfgs(name)
    assert regularity_check(cfg.representation, cfg.presentation()).regular


def test_example3_lift_not_regular(cfgs):
    # pulled back to T^7/(Gamma x A) the connection is no longer regular
    cfg = cfgs("example3")
    keep = ("alpha", "beta", "gamma", "sigma2", "sigma3")
    y = OrbifoldPresentation({n: cfg.generators[n] for n in keep})
    assert not regularity_check(cfg.representation.restricted(keep), y).regular


# --- lifting rule ---------------------------------------------------------------------


def test_lift_existence_rules():
    d = instanton_descriptor(2, 0, 1)
    assert lift_existence(trivial_descriptor(2), -1, ONE, [ONE]).exists
    assert lift_existence(d, 1, ONE, [a]).rule == "h2-sign-plus"
    res = lift_existence(d, -1, ONE, [a])
    assert not res.exists and res.rule == "h2-sign-minus"
    res = lift_existence(d, 1, b, [a])
    assert res.exists and res.compose_with == b
    assert not lift_existence(d, 1, b, [a], candidates=[ONE, a]).exists
    assert not lift_existence(d, 1, gauge(ROT90), [a]).exists


def test_resolution_choice():
    ch = ResolutionChoice({"S_2": RESOLUTION})
    assert ch.of("S_2") == RESOLUTION and ch.of("S_3") == SMOOTHING
    with pytest.raises(ValueError):
        ResolutionChoice({"S_1": "blowup"})


# --- gluing outcomes --------------------------------------------------------------------

EX1_CHOICES = {
    "resolution": ResolutionChoice({}, RESOLUTION),
    "smoothing": ResolutionChoice({}, SMOOTHING),
    "beta-type": ResolutionChoice({"S_2": RESOLUTION, "S_3": RESOLUTION}, SMOOTHING),
    "gamma-type": ResolutionChoice({f"S_{j}": RESOLUTION for j in range(4, 8)}, SMOOTHING),
}
# frozen from this implementation; b2 = 1 + number of strata where H fixes the period form.
# Beta-type strata (S_2, S_3) need a smoothing, gamma-type strata (S_4..S_7) a resolution.
EX1_BETTI = {"resolution": (0, 5, 18), "smoothing": (0, 3, 20), "beta-type": (0, 1, 22), "gamma-type": (0, 7, 16)}


@pytest.mark.parametrize("label", list(EX1_CHOICES))
def test_example1_all_choices_certify(cfgs, ex1, label):
    rep = cfgs("example1").representation
    cert = find_gluing_data(ex1, rep, EX1_CHOICES[label])
    assert isinstance(cert, GluingDataCertificate)
    assert verify_certificate(cert, ex1)
    s1 = cert.by_name("S_1")
    assert s1.descriptor.kind == "Cyclic_Anm" and s1.descriptor.energy == Fraction(1, 2)
    assert all(s.descriptor.kind == "Trivial" for s in cert.strata if s.stratum != "S_1")
    assert dict((w, g.name()) for w, g in s1.m_assignment) == {"tau1": "1", "tau2": "1", "tau3": "1"}
    assert topology_report(cert, ex1).betti == EX1_BETTI[label]


def test_example2_obstruction(cfgs):
    cfg = cfgs("example2")
    out = find_gluing_data(cfg.presentation(), cfg.representation, cfg.resolution)
    assert isinstance(out, ObstructionList)
    assert out.strata == ["S_2", "S_3"]
    assert {o.bullet for o in out.obstructions} == {"H-lift"}
    js = out.to_json()
    assert js["obstructed_strata"] == ["S_2", "S_3"]


def test_example2_partial_smoothing(cfgs):
    # smoothing only one of the two strata leaves the other obstructed
    cfg = cfgs("example2")
    ch = ResolutionChoice({"S_2": SMOOTHING, "S_3": RESOLUTION}, SMOOTHING)
    out = find_gluing_data(cfg.presentation(), cfg.representation, ch)
    assert isinstance(out, ObstructionList) and out.strata == ["S_3"]


def test_example2_smoothing(cfgs):
    cfg = cfgs("example2_smoothing")
    cert = find_gluing_data(cfg.presentation(), cfg.representation, cfg.resolution)
    assert isinstance(cert, GluingDataCertificate)
    for name in ("S_2", "S_3"):
        lifts = cert.by_name(name).h_lifts
        assert [r.rule for _, r in lifts] == ["h2-sign-plus"]
        assert all(r.compose_with is None for _, r in lifts)


def test_example2_variant_needs_b(cfgs):
    cfg = cfgs("example2_variant")
    y = cfg.presentation()
    cert = find_gluing_data(y, cfg.representation, cfg.resolution)
    assert isinstance(cert, GluingDataCertificate)
    for name in ("S_2", "S_3"):
        assert [r.compose_with for _, r in cert.by_name(name).h_lifts] == [b]
    # without b among the gauge candidates the same data is obstructed
    out = find_gluing_data(y, cfg.representation, cfg.resolution, candidates=[ONE, a, c])
    assert isinstance(out, ObstructionList)
    assert set(out.strata) >= {"S_2", "S_3"}


def test_example3(cfgs, ex3):
    cfg = cfgs("example3")
    cert = find_gluing_data(ex3, cfg.representation, cfg.resolution)
    assert isinstance(cert, GluingDataCertificate)
    rep = topology_report(cert, ex3)
    assert dict(rep.p1_coefficients) == {"S_1": 0, "S_2": 0, "S_3": Fraction(1, 2), "S_4": Fraction(1, 2)}
    assert rep.w2_pairings["S_3"] == [1] and rep.w2_pairings["S_4"] == [1]
    assert rep.betti == (0, 4, 11)


def test_example3_smoothing_obstructed(cfgs, ex3):
    # for the gamma-type strata H flips omega_1 and omega_2 but fixes omega_3, so only resolution works
    cfg = cfgs("example3")
    out = find_gluing_data(ex3, cfg.representation, ResolutionChoice({}, SMOOTHING))
    assert isinstance(out, ObstructionList)
    assert out.strata == ["S_3", "S_4"]
    assert {o.bullet for o in out.obstructions} == {"H-lift"}


# --- Betti numbers: Joyce's T^7/Gamma table ------------------------------------------------


@pytest.mark.parametrize("pattern", [(), (0,), (0, 3), (1, 2, 5, 7), tuple(range(8))])
def test_joyce_betti_numbers(torus, cfgs, pattern):
    ss = torus.singular_set()
    z2 = [s.name for s in ss.strata if s.h_order == 2]
    chosen = [z2[i] for i in pattern]
    cert = find_gluing_data(torus, cfgs("torus_gamma").representation, ResolutionChoice({n: RESOLUTION for n in chosen}, SMOOTHING))
    l = len(chosen)
    assert topology_report(cert, torus).betti == (0, 8 + l, 47 - l)


def test_betti_contribution_averages(torus):
    ss = torus.singular_set()
    model = local_model(ss, ss.strata[-1])
    h = model.h[1]
    # the free element reverses two T^3 directions, so tr on H^1(T^3) is -1
    assert sum(h.line_linear[i][i] for i in range(3)) == -1
    assert betti_contribution(model, [1, 1]) == (1, 1)
    assert betti_contribution(model, [1, -1]) == (0, 2)
    # H-trivial strata contribute (r, 3r)
    assert betti_contribution(local_model(ss, ss.strata[0]), []) == (1, 3)
    # a non-integral character average is refused rather than rounded
    with pytest.raises(Unsupported):
        betti_contribution(model, [1, 0])


def test_orbifold_betti(torus):
    cert = find_gluing_data(torus, FlatConnectionRep.trivial(torus.names), ResolutionChoice())
    assert topology_report(cert, torus).orbifold_betti == (0, 0, 7)
