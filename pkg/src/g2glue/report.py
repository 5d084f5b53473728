"""Report assembly for the command-line stages.

Every stage returns plain JSON-ready data (exact rationals as "p/q"
strings) so reports are byte-identical for identical inputs.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .config import FIXTURES, JobConfig, fixture_text, load_fixture
from .forms import (
    PHI0,
    VOL,
    AlternatingForm,
    Metric7,
    extract_triple,
    hodge_star,
    lambda2_split,
    nondegeneracy_and_metric,
    product_form,
    theta,
    two_form_basis,
)
from .gluing import (
    GluingDataCertificate,
    ObstructionList,
    RelationViolation,
    Unsupported,
    find_gluing_data,
    regularity_check,
    stratum_data,
    topology_report,
    validate_rep,
)
from .orbifold import NotAdmissible, NotClosed, local_model, local_pi1

SUCCESS, OBSTRUCTED, NOT_ADMISSIBLE, ERROR = "Success", "Obstructed", "NotAdmissible", "Error"
EXIT_CODES = {SUCCESS: 0, OBSTRUCTED: 2, NOT_ADMISSIBLE: 2, ERROR: 1}


@dataclass
class Report:
    subcommand: str
    input_digest: str
    stages: dict = field(default_factory=dict)
    status: str = SUCCESS
    messages: list[str] = field(default_factory=list)

    def demote(self, status: str, msg: str = ""):
        order = [SUCCESS, OBSTRUCTED, NOT_ADMISSIBLE, ERROR]
        if order.index(status) > order.index(self.status):
            self.status = status
        if msg:
            self.messages.append(msg)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_json(self) -> dict:
        return {
            "tool": "g2glue",
            "version": __version__,
            "subcommand": self.subcommand,
            "input_digest": self.input_digest,
            "stages": self.stages,
            "status": self.status,
            "messages": self.messages,
        }


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    raise TypeError(f"not serialisable: {type(o).__name__}")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def threads() -> int:
    try:
        return max(1, int(os.environ.get("G2GLUE_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    n = threads()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# --- stages -----------------------------------------------------------------


def stage_g2check() -> dict:
    res = nondegeneracy_and_metric(PHI0)
    g = res.metric
    psi = theta(PHI0)
    split = lambda2_split(PHI0)
    basis2 = [AlternatingForm(2, {idx: 1}) for idx in two_form_basis()]
    star_ok = all(hodge_star(hodge_star(b, g), g) == b for b in basis2)
    extract_triple(PHI0, ((0, 1, 2), (3, 4, 5, 6)))
    triple_ok = product_form(((0, 1, 2), (3, 4, 5, 6))) == PHI0
    checks = {
        "metric_is_identity": g.entries == Metric7.euclidean().entries and g.volume == 1,
        "orbit": res.orbit,
        "signature": list(g.signature),
        "phi_wedge_theta_is_7_vol": (PHI0 ^ psi) == VOL.scale(7),
        "theta_is_star_phi": hodge_star(PHI0, g) == psi,
        "lambda2_multiplicities": list(split.multiplicities),
        "star_star_is_identity_on_2_forms": star_ok,
        "product_form_recovers_phi0": triple_ok,
    }
    checks["passed"] = (
        checks["metric_is_identity"]
        and checks["phi_wedge_theta_is_7_vol"]
        and checks["theta_is_star_phi"]
        and checks["lambda2_multiplicities"] == [7, 14]
        and star_ok
        and triple_ok
    )
    return checks


def stage_analyze(cfg: JobConfig, report: Report) -> None:
    y = cfg.presentation()
    ss = y.singular_set(cfg.options.bound)
    dg = y.deck_group(cfg.options.bound)
    names = y.names
    report.stages["group"] = {"order": ss.group.order, "generators": names}
    report.stages["singular_set"] = {
        "counts": ss.counts(),
        "strata": [s.to_json() for s in ss.strata],
        "meeting_components": len(ss.intersections),
    }
    report.stages["deck_group"] = dg.relation_table()

    def one(s):
        try:
            model = local_model(ss, s, y.phi)
        except NotAdmissible as exc:
            return s.name, {"admissible": False, "reason": exc.reason}, None
        return s.name, {"admissible": True, **model.to_json(ss.group, names)}, local_pi1(dg, ss, s).to_json()

    models, pi1 = {}, {}
    for name, m, p in _pmap(one, ss.strata):
        models[name] = m
        if p is not None:
            pi1[name] = p
        if not m["admissible"]:
            report.demote(NOT_ADMISSIBLE, f"{name}: {m['reason']}")
    report.stages["local_models"] = models
    report.stages["local_pi1"] = pi1


def _need_rep(cfg: JobConfig, report: Report) -> bool:
    if cfg.representation is None:
        report.demote(ERROR, "config has no [representation] section")
        return False
    try:
        validate_rep(cfg.representation, cfg.presentation().deck_group(cfg.options.bound))
    except RelationViolation as exc:
        report.stages["representation"] = {"valid": False, "violated": exc.relation}
        report.demote(ERROR, str(exc))
        return False
    report.stages["representation"] = {"valid": True, "assignment": cfg.representation.to_json()}
    return True


def stage_regularity(cfg: JobConfig, report: Report, decisive: bool = True) -> None:
    if not _need_rep(cfg, report):
        return
    r = regularity_check(cfg.representation, cfg.presentation())
    report.stages["regularity"] = r.to_json()
    if decisive and not r.regular:
        report.demote(OBSTRUCTED, "flat connection is not regular")


def stage_gluing(cfg: JobConfig, report: Report):
    if not _need_rep(cfg, report):
        return None
    y = cfg.presentation()
    try:
        mono = stratum_data(y, cfg.representation, y.singular_set(cfg.options.bound), y.deck_group(cfg.options.bound))
        report.stages["monodromy"] = {sd.stratum.name: sd.mono.to_json() for sd in mono}
        result = find_gluing_data(y, cfg.representation, cfg.resolution, ss=y.singular_set(cfg.options.bound), dg=y.deck_group(cfg.options.bound))
    except NotAdmissible as exc:
        report.demote(NOT_ADMISSIBLE, str(exc))
        return None
    except Unsupported as exc:
        report.demote(ERROR, f"unsupported: {exc}")
        return None
    if isinstance(result, ObstructionList):
        report.stages["gluing"] = {"status": "Obstructed", **result.to_json()}
        report.demote(OBSTRUCTED, "obstructed at " + ", ".join(result.strata))
        return None
    report.stages["gluing"] = {"status": "Certificate", "certificate": result.to_json()}
    return result


def stage_topology(cfg: JobConfig, report: Report) -> None:
    cert = stage_gluing(cfg, report)
    if cert is None:
        return
    try:
        t = topology_report(cert, cfg.presentation(), cfg.presentation().singular_set(cfg.options.bound))
    except Unsupported as exc:
        report.demote(ERROR, f"unsupported: {exc}")
        return
    report.stages["topology"] = t.to_json()


def run(cfg: JobConfig | None, subcommand: str) -> Report:
    rep = Report(subcommand, cfg.digest if cfg is not None else _digest(b""))
    try:
        if subcommand == "g2check":
            rep.stages["g2check"] = stage_g2check()
            if not rep.stages["g2check"]["passed"]:
                rep.demote(ERROR, "G2 identity suite failed")
        elif cfg is None:
            rep.demote(ERROR, f"{subcommand} needs --config")
        elif subcommand == "analyze":
            stage_analyze(cfg, rep)
        elif subcommand == "regularity":
            stage_regularity(cfg, rep)
        elif subcommand == "gluing":
            stage_gluing(cfg, rep)
        elif subcommand == "topology":
            stage_topology(cfg, rep)
        elif subcommand == "full":
            stage_analyze(cfg, rep)
            if rep.status == SUCCESS:
                stage_regularity(cfg, rep, decisive=False)
                stage_topology(cfg, rep)
        else:
            rep.demote(ERROR, f"unknown subcommand {subcommand!r}")
    except NotClosed as exc:
        rep.demote(ERROR, f"group closure failed: {exc}")
    return rep


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def golden_path(name: str):
    from importlib import resources

    return resources.files("g2glue").joinpath("data", "golden", f"{name}.json")


def fixture_report(name: str) -> str:
    return canonical_json(run(load_fixture(name), "full").to_json())


def run_examples(update_golden: bool = False, only: list[str] | None = None) -> Report:
    names = list(only or FIXTURES)
    rep = Report("examples", _digest("".join(fixture_text(n) for n in names).encode()))
    results = {}
    for name in names:
        text = fixture_report(name)
        body = json.loads(text)
        gp = golden_path(name)
        if update_golden:
            with open(str(gp), "w") as fh:
                fh.write(text)
            match = True
        else:
            try:
                match = gp.read_text() == text
            except FileNotFoundError:
                match = False
        results[name] = {
            "status": body["status"],
            "matches_golden": match,
            "report_digest": _digest(text.encode()),
            "summary": _summary(body),
        }
        if not match:
            rep.demote(ERROR, f"{name}: output differs from golden file")
    rep.stages["examples"] = results
    return rep


def _summary(body: dict) -> dict:
    st = body["stages"]
    out = {"counts": st.get("singular_set", {}).get("counts")}
    if "regularity" in st:
        out["regular"] = st["regularity"]["regular"]
    if "gluing" in st:
        out["gluing"] = st["gluing"]["status"]
        if st["gluing"]["status"] == "Obstructed":
            out["obstructed_strata"] = st["gluing"]["obstructed_strata"]
    if "topology" in st:
        out["p1"] = st["topology"]["p1_coefficients"]
        out["betti"] = st["topology"]["betti"]
    return out


def to_text(report: Report) -> str:
    lines = [f"g2glue {__version__} {report.subcommand}: {report.status}"]
    st = report.stages
    if "g2check" in st:
        for k, v in st["g2check"].items():
            lines.append(f"  {k}: {v}")
    if "singular_set" in st:
        ss = st["singular_set"]
        lines.append(f"  group order {st['group']['order']}; strata " + ", ".join(f"{n} x {k}" for k, n in ss["counts"].items()))
        for s in ss["strata"]:
            m = st.get("local_models", {}).get(s["name"], {})
            tag = m.get("G", "-") if m.get("admissible") else "not admissible: " + m.get("reason", "?")
            lines.append(f"    {s['name']}: {s['base_type']} (orbit {s['orbit_size']}), G = {tag}, H order {s['H_order']}")
            p = st.get("local_pi1", {}).get(s["name"])
            if p:
                lines.append("      pi1 = <" + ", ".join(p["G"] + p["H"] + p["Z3"]) + ">")
    if "regularity" in st:
        r = st["regularity"]
        lines.append(f"  regular: {r['regular']} (fixed dims g: {r['fixed_dim_g']}, R^7 x g: {r['fixed_dim_R7g']})")
    if "gluing" in st:
        g = st["gluing"]
        if g["status"] == "Obstructed":
            lines.append("  gluing: obstructed at " + ", ".join(g["obstructed_strata"]))
            for o in g["obstructions"]:
                lines.append(f"    {o['stratum']} [{o['bullet']}]: {o['reason']}")
        else:
            lines.append("  gluing: certificate")
            for s in g["certificate"]["strata"]:
                d = s["descriptor"]
                lines.append(f"    {s['stratum']} ({s['choice']}): {d['kind']} k={d['k']} m={d['m']} energy {d['energy']}")
    if "topology" in st:
        t = st["topology"]
        lines.append("  p1 coefficients: " + ", ".join(f"{k}={v}" for k, v in t["p1_coefficients"].items()))
        lines.append(f"  betti (b1, b2, b3): {tuple(t['betti'])}; orbifold part {tuple(t['orbifold_betti'])}")
    if "examples" in st:
        for name, r in st["examples"].items():
            lines.append(f"  {name}: {r['status']}, golden {'ok' if r['matches_golden'] else 'DIFFERS'}")
    for m in report.messages:
        lines.append(f"  ! {m}")
    return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        return canonical_json(report.to_json()).encode()
    if fmt == "text":
        return to_text(report).encode()
    raise ValueError(f"unknown format {fmt!r}")
