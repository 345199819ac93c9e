"""Command-line entry point.

Subcommands: glue, enumerate, order, build, verify, configs.  Identical
configuration and seed produce byte-identical JSON outputs.  Exit codes:
0 all selected checks pass, 1 check failure, 2 usage or configuration
error, 3 enumeration or chain cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from importlib import resources
from pathlib import Path

from .cartan import CartanError, glue_breve, glue_tilde, load_group_file
from .checks import atlas_checks, glue_table_check, oracles_check
from .coxeter import CapExceeded, CoxeterError, CoxeterGroup
from .posets import PosetError, poset_to_dict, poset_to_dot
from .qk import AtlasContext, build_qk_poset
from .twisted import TwistedContext

KNOWN_CHECKS = (
    "iso",
    "image",
    "convex",
    "thin",
    "el",
    "oracles",
    "breve",
    "glue-table",
    "graded",
)

ATLAS_CHECKS = ("iso", "image", "convex", "thin", "el", "graded", "breve")


def _dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def resolve_group_path(spec: str) -> Path:
    p = Path(spec)
    if p.exists():
        return p
    name = spec[:-5] if spec.endswith(".json") else spec
    base = resources.files("qkatlas").joinpath("configs")
    candidate = base.joinpath(f"{name}.json")
    if candidate.is_file():
        return Path(str(candidate))
    raise CartanError(f"group file {spec!r} not found (and not a bundled config)")


def bundled_config_names() -> list[str]:
    base = resources.files("qkatlas").joinpath("configs")
    return sorted(p.name[:-5] for p in base.iterdir() if p.name.endswith(".json"))


def _parse_csv(text: str | None) -> list[str]:
    if text is None or text.strip() == "":
        return []
    return [part.strip() for part in text.split(",") if part.strip()]


def _load(args):
    gcm, file_K = load_group_file(resolve_group_path(args.group))
    group = CoxeterGroup(gcm, ball_cap=args.ball_cap)
    K = _parse_csv(args.K) if args.K is not None else file_K
    for k in K:
        if k not in gcm.nodes:
            raise CartanError(f"K node {k!r} is not a node of {gcm.name or args.group}")
    return group, K


def _all_subsets(nodes):
    out = [[]]
    for n in nodes:
        out += [s + [n] for s in out]
    return sorted(out, key=lambda s: (len(s), s))


# -- subcommands ------------------------------------------------------------------


def cmd_glue(args) -> int:
    group, K = _load(args)
    if args.mode == "tilde":
        diagram = glue_tilde(group.cartan, K)
    else:
        partner = group.minus_wK_permutation(K, cap=20_000)
        diagram = glue_breve(group.cartan, K, partner)
    print(diagram.matrix.ascii_diagram())
    payload = _dump_json(diagram.to_dict())
    if args.out:
        out = Path(args.out)
        if out.is_dir() or args.out.endswith("/"):
            out.mkdir(parents=True, exist_ok=True)
            out = out / "glued.json"
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(payload, encoding="utf-8")
        print(f"wrote {out}")
    else:
        sys.stdout.write(payload)
    return 0


def cmd_enumerate(args) -> int:
    group, _ = _load(args)
    J = _parse_csv(args.J) if args.J is not None else None
    ball = group.ball(args.max_length, J=J)
    payload = {
        "count": len(ball),
        "max_length": args.max_length,
        "elements": [w.to_json() for w in ball],
    }
    sys.stdout.write(_dump_json(payload))
    return 0


def cmd_order(args) -> int:
    group, _ = _load(args)
    ctx = TwistedContext(group, _parse_csv(args.J))
    if args.query == "bruhat":
        a, b = group.parse_word(args.a), group.parse_word(args.b)
        print("true" if group.bruhat_leq(a, b) else "false")
    elif args.query == "jleq":
        a, b = group.parse_word(args.a), group.parse_word(args.b)
        print("true" if ctx.jleq(a, b) else "false")
    elif args.query == "jlen":
        w = group.parse_word(args.w if args.w is not None else args.a)
        print(ctx.jlength(w))
    elif args.query == "jinterval":
        a, b = group.parse_word(args.a), group.parse_word(args.b)
        elements = ctx.jinterval(a, b)
        index = {e: i for i, e in enumerate(elements)}
        covers = [
            [index[lo], index[hi]] for lo, hi in ctx.jcovers(a, b)
        ]
        payload = {
            "elements": [e.word_str for e in elements],
            "covers": sorted(covers),
            "rank": [ctx.jlength(e) for e in elements],
        }
        sys.stdout.write(_dump_json(payload))
    else:
        raise CoxeterError(f"unknown order query {args.query!r}")
    return 0


def cmd_build(args) -> int:
    group, K = _load(args)
    atlas = AtlasContext(group, K, mode=args.mode)
    bundle = build_qk_poset(atlas, args.max_length)
    data = poset_to_dict(bundle.poset, labels=bundle.labels)
    data["minimal"] = list(bundle.minimal)
    data["mode"] = args.mode
    data["group"] = group.cartan.name or args.group
    data["K"] = list(K)
    data["max_length"] = args.max_length
    data["nu"] = [
        "" if p is None else atlas.nu(p).word_str for p in bundle.poset.elements
    ]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(_dump_json(data), encoding="utf-8")
    dot_path = out.with_suffix(".dot")
    dot_path.write_text(
        poset_to_dot(bundle.poset, labels=bundle.labels, title=out.stem),
        encoding="utf-8",
    )
    written = [str(out), str(dot_path)]
    if args.figures:
        from .render import render_hasse_png

        png_path = out.with_suffix(".png")
        render_hasse_png(
            bundle.poset,
            png_path,
            labels=bundle.labels,
            title=f"{data['group']} K={{{','.join(K)}}} L={args.max_length}",
        )
        written.append(str(png_path))
    print("wrote " + " ".join(written))
    return 0


def _config_tag(report) -> str:
    cfg = report.get("config", {})
    k = ",".join(cfg.get("K", [])) or "none"
    return f"{cfg.get('group', '?')} K={{{k}}} L={cfg.get('max_length', '?')}"


def cmd_verify(args) -> int:
    checks = _parse_csv(args.check)
    if not checks:
        raise CartanError("no checks selected; use --check with a comma list")
    for c in checks:
        if c not in KNOWN_CHECKS:
            raise CartanError(f"unknown check {c!r}; known: {', '.join(KNOWN_CHECKS)}")
    reports = []
    if "glue-table" in checks:
        reports.append(glue_table_check())
    needs_group = [c for c in checks if c != "glue-table"]
    if needs_group:
        if not args.group:
            raise CartanError(f"checks {needs_group} require --group")
        group, K = _load(args)
        if "oracles" in checks:
            reports.append(
                oracles_check(group, args.max_length, name=group.cartan.name or args.group)
            )
        selected_atlas = [c for c in checks if c in ATLAS_CHECKS]
        if selected_atlas:
            if args.K == "all":
                k_sets = _all_subsets(group.nodes)
            else:
                k_sets = [K]
            for k_set in k_sets:
                reports.extend(
                    atlas_checks(
                        group,
                        k_set,
                        args.max_length,
                        selected_atlas,
                        seed=args.seed,
                        chain_cap=args.chain_cap,
                        name=group.cartan.name or args.group,
                    )
                )
    ok = all(r["pass"] for r in reports)
    summary_rows = []
    for r in reports:
        tag = r["check"] if "config" not in r else f"{r['check']}: {_config_tag(r)}"
        if r.get("skipped"):
            tag += " (skipped: not applicable)"
        if r.get("direction"):
            tag += f" direction={r['direction']}"
        status = "PASS" if r["pass"] else "FAIL"
        print(f"[{status}] {tag}")
        summary_rows.append((tag, r["pass"]))
    aggregated = {
        "pass": ok,
        "seed": args.seed,
        "max_length": args.max_length,
        "checks": reports,
    }
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_text(_dump_json(aggregated), encoding="utf-8")
        with (out_dir / "report.csv").open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["check", "group", "K", "mode", "max_length", "status", "detail"])
            for r in reports:
                cfg = r.get("config", {})
                detail = r.get("direction") or r.get("skipped") or f"{len(r.get('violations', []))} violations"
                writer.writerow(
                    [
                        r["check"],
                        cfg.get("group", ""),
                        ",".join(cfg.get("K", [])),
                        r.get("mode", ""),
                        cfg.get("max_length", args.max_length),
                        "pass" if r["pass"] else "fail",
                        detail,
                    ]
                )
        if args.figures:
            from .render import render_report_png

            render_report_png(summary_rows, out_dir / "report.png")
        print(f"wrote {out_dir}/report.json {out_dir}/report.csv")
    return 0 if ok else 1


def cmd_configs(args) -> int:
    for name in bundled_config_names():
        print(name)
    return 0


# -- parser -------------------------------------------------------------------------


def _add_common(p, with_group=True):
    if with_group:
        p.add_argument("--group", default="a2", help="group JSON file or bundled config name")
    p.add_argument("--K", default=None, help="comma-separated node subset K (default: from file)")
    p.add_argument("--mode", choices=("tilde", "breve"), default="tilde")
    p.add_argument("--max-length", type=int, default=4, dest="max_length")
    p.add_argument("--seed", type=int, default=1729)
    p.add_argument("--ball-cap", type=int, default=1_000_000, dest="ball_cap")
    p.add_argument("--chain-cap", type=int, default=100_000, dest="chain_cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qk",
        description="Twisted Bruhat orders, stratum posets and glued atlas diagrams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("glue", help="build a glued diagram")
    _add_common(p)
    p.add_argument("--out", default=None, help="output file or directory")
    p.set_defaults(func=cmd_glue)

    p = sub.add_parser("enumerate", help="list a length ball")
    _add_common(p)
    p.add_argument("--J", default=None, help="restrict to a parabolic on these nodes")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("order", help="order queries")
    p.add_argument("query", choices=("bruhat", "jleq", "jlen", "jinterval"))
    _add_common(p)
    p.add_argument("--J", default="", help="twisting node subset")
    p.add_argument("--a", default="e", help="first word, space separated")
    p.add_argument("--b", default="e", help="second word")
    p.add_argument("--w", default=None, help="word for jlen")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("build", help="emit the stratum poset for one window")
    _add_common(p)
    p.add_argument("--config", dest="group_alias", default=None,
                   help="alias for --group")
    p.add_argument("--out", default="qk.json")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="run verification checks")
    _add_common(p)
    p.add_argument("--check", default="glue-table", help="comma list of checks")
    p.add_argument("--out", default=None, help="directory for report files")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("configs", help="list bundled group configs")
    p.set_defaults(func=cmd_configs)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "group_alias", None):
        args.group = args.group_alias
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    except (CartanError, CoxeterError, PosetError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
