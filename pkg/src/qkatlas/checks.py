"""Named verification checks shared by the CLI and the test suite.

Each check returns a JSON-ready report dict with at least the keys
"check", "pass" and "violations".  Reports are deterministic for a fixed
configuration and seed.
"""

from __future__ import annotations

from itertools import permutations

from .cartan import INFINITE_BOND, GeneralizedCartanMatrix, validate, glue_tilde, glue_breve
from .coxeter import CoxeterError, CoxeterGroup
from .posets import (
    BOTTOM,
    build_reflection_order,
    el_check,
    is_thin,
)
from .qk import (
    AtlasContext,
    QKElement,
    build_qk_poset,
    structural_scan,
    verify_convexity_tilde,
    verify_image_tilde,
    verify_iso_breve,
    verify_iso_tilde,
)
from .twisted import TwistedContext

_MAX_LISTED = 12


def _trim(violations: list) -> list:
    if len(violations) <= _MAX_LISTED:
        return violations
    return violations[:_MAX_LISTED] + [
        {"note": f"{len(violations) - _MAX_LISTED} further violations suppressed"}
    ]


# -- glue table -----------------------------------------------------------------

INF = INFINITE_BOND

# Seven reference rows: base diagram, K, and the expected bond graphs of the
# two glued diagrams (None where the construction does not apply).
GLUE_TABLE = [
    {
        "name": "a2-k-none",
        "nodes": ["1", "2"],
        "cartan": [[2, -1], [-1, 2]],
        "K": [],
        "tilde": (4, {(0, 1): 3, (2, 3): 3}),
        "breve": (4, {(0, 1): 3, (2, 3): 3}),
    },
    {
        "name": "a2-k-2",
        "nodes": ["1", "2"],
        "cartan": [[2, -1], [-1, 2]],
        "K": ["2"],
        "tilde": (3, {(0, 1): 3, (1, 2): 3}),
        "breve": (3, {(0, 1): 3, (1, 2): 3}),
    },
    {
        "name": "a3-k-2",
        "nodes": ["1", "2", "3"],
        "cartan": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
        "K": ["2"],
        "tilde": (5, {(0, 4): 3, (1, 4): 3, (2, 4): 3, (3, 4): 3}),
        "breve": (5, {(0, 4): 3, (1, 4): 3, (2, 4): 3, (3, 4): 3}),
    },
    {
        "name": "a3-k-13",
        "nodes": ["1", "2", "3"],
        "cartan": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
        "K": ["1", "3"],
        "tilde": (4, {(0, 1): 3, (1, 2): 3, (2, 3): 3, (0, 3): 3}),
        "breve": (4, {(0, 1): 3, (1, 2): 3, (2, 3): 3, (0, 3): 3}),
    },
    {
        "name": "a3-k-23",
        "nodes": ["1", "2", "3"],
        "cartan": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
        "K": ["2", "3"],
        "tilde": (4, {(0, 3): 3, (1, 3): 3, (2, 3): 3}),
        "breve": (4, {(0, 1): 3, (1, 2): 3, (2, 3): 3}),
    },
    {
        "name": "inf23-k-23",
        "nodes": ["1", "2", "3"],
        "cartan": [[2, -2, 0], [-2, 2, -1], [0, -1, 2]],
        "K": ["2", "3"],
        "tilde": (4, {(0, 3): INF, (1, 3): INF, (2, 3): 3}),
        "breve": (4, {(0, 1): INF, (1, 2): 3, (2, 3): INF}),
    },
    {
        "name": "inf12-k-12",
        "nodes": ["1", "2", "3"],
        "cartan": [[2, -2, 0], [-2, 2, -1], [0, -1, 2]],
        "K": ["1", "2"],
        "tilde": (4, {(0, 1): INF, (1, 2): 3, (1, 3): 3}),
        "breve": None,  # the K-parabolic is infinite
    },
]


def _bond_graph(gcm: GeneralizedCartanMatrix):
    n = len(gcm.nodes)
    edges = {}
    for a in range(n):
        for b in range(a + 1, n):
            if gcm.entries[a][b] != 0:
                edges[(a, b)] = gcm.bond_order(gcm.nodes[a], gcm.nodes[b])
    return n, edges


def bond_graphs_isomorphic(g1, g2) -> bool:
    n1, e1 = g1
    n2, e2 = g2
    if n1 != n2 or len(e1) != len(e2):
        return False

    def degree_profile(n, edges):
        prof = {i: [] for i in range(n)}
        for (a, b), m in edges.items():
            prof[a].append(m)
            prof[b].append(m)
        return {i: tuple(sorted(map(str, v))) for i, v in prof.items()}

    p1, p2 = degree_profile(n1, e1), degree_profile(n2, e2)
    if sorted(p1.values()) != sorted(p2.values()):
        return False
    for perm in permutations(range(n1)):
        if any(p1[i] != p2[perm[i]] for i in range(n1)):
            continue
        mapped = {
            tuple(sorted((perm[a], perm[b]))): m for (a, b), m in e1.items()
        }
        if mapped == e2:
            return True
    return False


def glue_table_check() -> dict:
    violations = []
    for row in GLUE_TABLE:
        gcm = validate(row["cartan"], row["nodes"], name=row["name"])
        group = CoxeterGroup(gcm)
        tilde = glue_tilde(gcm, row["K"])
        if not bond_graphs_isomorphic(_bond_graph(tilde.matrix), row["tilde"]):
            violations.append({"row": row["name"], "mode": "tilde",
                               "got": tilde.matrix.ascii_diagram()})
        if row["breve"] is None:
            try:
                group.minus_wK_permutation(row["K"], cap=10_000)
            except CoxeterError:
                pass
            else:
                violations.append(
                    {"row": row["name"], "mode": "breve",
                     "problem": "expected an infinite K-parabolic"}
                )
            continue
        partner = group.minus_wK_permutation(row["K"])
        breve = glue_breve(gcm, row["K"], partner)
        if not bond_graphs_isomorphic(_bond_graph(breve.matrix), row["breve"]):
            violations.append({"row": row["name"], "mode": "breve",
                               "got": breve.matrix.ascii_diagram()})
    return {
        "check": "glue-table",
        "pass": not violations,
        "rows": len(GLUE_TABLE),
        "violations": _trim(violations),
    }


# -- twisted-order oracles --------------------------------------------------------


def _subsets(nodes):
    nodes = list(nodes)
    out = [[]]
    for n in nodes:
        out += [s + [n] for s in out]
    return sorted(out, key=lambda s: (len(s), s))


def oracles_check(group: CoxeterGroup, max_length: int, name: str = "") -> dict:
    """Cross-check the witness-criterion order against the closure oracle,
    the longest-element translation oracle and both length formulas, for
    every generator subset J."""
    violations = []
    ball = group.ball(max_length)
    sub = group.ball(max(max_length - 2, 0))
    for J in _subsets(group.nodes):
        ctx = TwistedContext(group, J)
        closure = ctx.jleq_closure_oracle(max_length)
        for a, b in sorted(closure, key=lambda p: (p[0].sort_key, p[1].sort_key)):
            if not ctx.jleq(a, b):
                violations.append(
                    {"J": J, "problem": "closure asserts a relation the order denies",
                     "pair": [a.word_str, b.word_str]}
                )
        for a in sub:
            for b in sub:
                if ((a, b) in closure) != ctx.jleq(a, b):
                    violations.append(
                        {"J": J, "problem": "closure and order disagree on the sub-window",
                         "pair": [a.word_str, b.word_str]}
                    )
        try:
            w_J = group.longest_element(J, cap=10_000)
        except CoxeterError:
            w_J = None
        for w in ball:
            if ctx.jlength(w) != ctx.jlength_by_inversions(w):
                violations.append(
                    {"J": J, "problem": "twisted length formulas disagree",
                     "element": w.word_str}
                )
            if not J and ctx.jlength(w) != w.length:
                violations.append({"J": J, "problem": "empty-J length degeneration",
                                   "element": w.word_str})
            if w_J is not None and len(J) == group.rank and ctx.jlength(w) != -w.length:
                violations.append({"J": J, "problem": "full-J length degeneration",
                                   "element": w.word_str})
            if w_J is not None and ctx.jlength(w) != (
                group.multiply(w_J, w).length - w_J.length
            ):
                violations.append(
                    {"J": J, "problem": "translated length oracle disagrees",
                     "element": w.word_str}
                )
        if w_J is not None:
            for a in ball:
                for b in ball:
                    translated = group.bruhat_leq(
                        group.multiply(w_J, a), group.multiply(w_J, b)
                    )
                    if ctx.jleq(a, b) != translated:
                        violations.append(
                            {"J": J, "problem": "translation oracle disagrees",
                             "pair": [a.word_str, b.word_str]}
                        )
        if not J:
            for a in ball:
                for b in ball:
                    if ctx.jleq(a, b) != group.bruhat_leq(a, b):
                        violations.append(
                            {"J": J, "problem": "empty-J does not degenerate to Bruhat",
                             "pair": [a.word_str, b.word_str]}
                        )
    return {
        "check": "oracles",
        "group": name or group.cartan.name,
        "max_length": max_length,
        "pass": not violations,
        "ball": len(ball),
        "violations": _trim(violations),
    }


# -- poset-level checks -------------------------------------------------------------


def thin_check(bundle) -> dict:
    ok, witness = is_thin(bundle.poset)
    return {
        "check": "thin",
        "pass": ok,
        "elements": bundle.poset.n,
        "violations": [] if ok else [witness],
    }


def graded_check(bundle) -> dict:
    violations = []
    rank = bundle.poset.rank
    for i, j in bundle.poset.covers():
        if rank[j] - rank[i] != 1:
            violations.append(
                {"cover": [bundle.poset.names[i], bundle.poset.names[j]],
                 "rank_difference": rank[j] - rank[i]}
            )
    return {
        "check": "graded",
        "pass": not violations,
        "covers": len(bundle.poset.covers()),
        "violations": _trim(violations),
    }


def el_shellability_check(bundle, seed: int = 1729, chain_cap: int = 100_000) -> dict:
    reflections = sorted(
        {t for t in bundle.labels.values() if t != BOTTOM},
        key=lambda t: t.sort_key,
    )
    order = build_reflection_order(
        bundle.atlas.glued, reflections, bundle.atlas.iflat, seed=seed
    )
    report = el_check(
        bundle.poset,
        bundle.labels,
        order.key,
        chain_cap=chain_cap,
        collect_bottom=bundle.bottom_index,
    )
    report["violations"] = _trim(report["violations"])
    report["seed"] = seed
    if bundle.augmented:
        scan = structural_scan(bundle, report)
        scan["failures"] = _trim(scan["failures"])
        report["structural_scan"] = scan
    report.pop("least_chains_from_bottom", None)
    return report


# -- orchestration ------------------------------------------------------------------


def atlas_checks(
    base: CoxeterGroup,
    K,
    max_length: int,
    checks,
    seed: int = 1729,
    chain_cap: int = 100_000,
    name: str = "",
) -> list[dict]:
    """Run the selected atlas-level checks for one (group, K) configuration."""
    wanted = list(checks)
    reports = []
    config = {
        "group": name or base.cartan.name,
        "K": list(K),
        "max_length": max_length,
    }
    needs_tilde = {"iso", "image", "convex", "thin", "el", "graded"} & set(wanted)
    atlas = AtlasContext(base, K, mode="tilde") if needs_tilde else None
    bundle = None
    if {"thin", "el", "graded"} & set(wanted):
        bundle = build_qk_poset(atlas, max_length)
    for check in wanted:
        if check == "iso":
            rep = verify_iso_tilde(atlas, max_length)
        elif check == "image":
            rep = verify_image_tilde(atlas, max_length)
        elif check == "convex":
            rep = verify_convexity_tilde(atlas, max_length)
        elif check == "thin":
            rep = thin_check(bundle)
        elif check == "graded":
            rep = graded_check(bundle)
        elif check == "el":
            rep = el_shellability_check(bundle, seed=seed, chain_cap=chain_cap)
        elif check == "breve":
            try:
                breve_atlas = AtlasContext(base, K, mode="breve")
            except CoxeterError as exc:
                rep = {
                    "check": "breve",
                    "pass": True,
                    "skipped": str(exc),
                    "direction": None,
                    "violations": [],
                }
            else:
                rep = verify_iso_breve(breve_atlas, max_length)
        else:
            raise ValueError(f"unknown check {check!r}")
        rep.setdefault("violations", [])
        rep["violations"] = _trim(rep["violations"])
        rep["config"] = dict(config)
        reports.append(rep)
    return reports
