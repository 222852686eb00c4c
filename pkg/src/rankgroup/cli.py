"""Command-line entry point: ``rankgroup analyze|compare|distribution|validate``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from rankgroup import community, pajek_io
from rankgroup.concordance import (
    concordance_matrix,
    stars,
    top_group,
    w_distribution,
    write_concordance_csv,
    write_distribution_csv,
)
from rankgroup.errors import RankGroupError
from rankgroup.ingest import parse_csv, validate
from rankgroup.pairstats import all_pairs, write_pairs_csv
from rankgroup.pipeline import RunConfig, analyze_scope, output_root, scopes, z_from_alpha

log = logging.getLogger("rankgroup")

EXIT_OK, EXIT_WARN, EXIT_ERROR = 0, 1, 2


def _seed_default() -> int:
    return int(os.environ.get("RANKGROUP_SEED", "0"))


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="indicator table (comma-delimited UTF-8 CSV)")
    p.add_argument("--country", action="append", default=[], help="country to analyze (repeatable)")
    p.add_argument("--world", action="store_true", help="also analyze the whole set as 'world'")
    p.add_argument("--field", help="keep only this field, e.g. 'All sciences'")
    p.add_argument("--period", help="keep only this period, e.g. 2012-2015")
    p.add_argument("--counting", choices=("fractional", "full"))
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--slugify", action="store_true", help="replace spaces in file names by underscores")


def _battery(p: argparse.ArgumentParser) -> None:
    p.add_argument("--criterion", choices=("z", "w", "overlap", "all"), default="all")
    p.add_argument("--alpha", type=float, action="append", help="significance level for a z cutoff (repeatable)")
    p.add_argument("--z-max", type=float, action="append", help="explicit |z| cutoff (repeatable)")
    p.add_argument("--w-max", type=float, action="append", help="w cutoff (repeatable)")
    p.add_argument("--bonferroni", action="store_true", help="divide alpha by the number of pairs in each scope")
    p.add_argument("--edge-weights", choices=("binary", "raw"), default="binary")
    p.add_argument("--seed", type=int, default=None, help="Louvain/bootstrap seed (fallback: $RANKGROUP_SEED, else 0)")
    p.add_argument("--bootstrap-replicates", type=int, default=1000)
    p.add_argument("--coverage", type=float, default=0.95)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rankgroup", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="write Pajek bundles, classifications and reports per scope")
    _common(p)
    _battery(p)

    p = sub.add_parser("compare", help="Cramér's V between classifications and top-lists")
    p.add_argument("--input", help="indicator table; runs the method battery when no other source is given")
    p.add_argument("--classifications", help="classification CSV written by 'analyze'")
    p.add_argument("--clu", action="append", default=[], help="Pajek partition file (repeatable)")
    p.add_argument("--country", action="append", default=[])
    p.add_argument("--world", action="store_true")
    p.add_argument("--field")
    p.add_argument("--period")
    p.add_argument("--counting", choices=("fractional", "full"))
    p.add_argument("--out", default=".")
    p.add_argument("--slugify", action="store_true")
    _battery(p)

    p = sub.add_parser("distribution", help="pairwise w values in decreasing order, one CSV per scope")
    _common(p)

    p = sub.add_parser("validate", help="report records that violate the indicator invariants")
    p.add_argument("--input", required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    criterion = getattr(args, "criterion", "all")
    criteria = ("z", "w", "overlap") if criterion == "all" else (criterion,)
    kwargs = dict(
        input=args.input,
        countries=list(args.country),
        world=args.world,
        criteria=criteria,
        out=args.out,
        slugify=args.slugify,
        field=args.field,
        period=args.period,
        counting=args.counting,
    )
    if hasattr(args, "seed"):
        z = list(args.z_max or [])
        z += [z_from_alpha(a) for a in (args.alpha or [])]
        if z:
            kwargs["z_thresholds"] = tuple(z)
        if args.w_max:
            kwargs["w_thresholds"] = tuple(args.w_max)
        kwargs.update(
            bonferroni=args.bonferroni,
            edge_weights=args.edge_weights,
            seed=_seed_default() if args.seed is None else args.seed,
            replicates=args.bootstrap_replicates,
            coverage=args.coverage,
        )
    return RunConfig(**kwargs)


def _load(config: RunConfig):
    data = parse_csv(config.input)
    data = data.filter(field=config.field, period=config.period, counting=config.counting)
    violations = validate(data)
    for v in violations:
        log.warning("validation: %s", v)
    return data, violations


def _write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def _open(path):
    return open(path, "w", encoding="utf-8", newline="")


REPORT_CSV_FIELDS = (
    "scope", "method", "edges", "louvain_groups", "louvain_q",
    "components", "components_q", "isolates", "top_group_size",
)


def cmd_analyze(config: RunConfig) -> int:
    data, violations = _load(config)
    os.makedirs(config.out, exist_ok=True)
    summary = {"input": os.path.basename(config.input), "seed": config.seed, "scopes": []}
    report_rows = []
    for scope, part in scopes(data, config):
        result = analyze_scope(scope, part, config)
        root = output_root(scope, config)
        written = pajek_io.write_bundle(result.networks, config.out, scope, config.slugify)
        with _open(f"{root}_pairs.csv") as fh:
            write_pairs_csv(result.pairs, fh)
        with _open(f"{root}_classifications.csv") as fh:
            community.write_classifications_csv(
                result.dataset.labels,
                list(result.louvain.values()) + list(result.components.values()),
                fh,
            )
        report = result.report()
        _write_json(f"{root}_report.json", report)
        for method, m in report["methods"].items():
            report_rows.append([
                scope, method, m["edges"], m["louvain_groups"], f"{m['louvain_q']:.6f}",
                m["components"], f"{m['components_q']:.6f}", "; ".join(m["isolates"]), len(m["top_group"]),
            ])
        summary["scopes"].append({
            "scope": scope,
            "universities": report["universities"],
            "pairs": report["pairs"],
            "files": sorted(os.path.basename(p) for p in written),
            "warnings": report["warnings"],
        })
        log.info("%s: %d universities, %d pairs", scope, report["universities"], report["pairs"])
    with _open(os.path.join(config.out, "report.csv")) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_CSV_FIELDS)
        writer.writerows(report_rows)
    summary["validation_warnings"] = [str(v) for v in violations]
    _write_json(os.path.join(config.out, "summary.json"), summary)
    return EXIT_WARN if violations else EXIT_OK


def _compare_sources(args, config):
    """Yield (scope, names, classifications, records-or-None)."""
    if args.classifications or args.clu:
        classifications = []
        if args.classifications:
            with open(args.classifications, encoding="utf-8") as fh:
                _, found = community.read_classifications_csv(fh)
            classifications += [c for c in found if c.method != "components"]
        for path in args.clu:
            labels = pajek_io.read_clu(path)
            classifications.append(community.external(labels, name=Path(path).stem))
        scope = Path(args.classifications or args.clu[0]).stem.replace("_classifications", "")
        yield scope, [c.name for c in classifications], classifications, None
        return
    if not config.input:
        raise RankGroupError("compare needs --input, --classifications or --clu")
    data, _ = _load(config)
    for scope, part in scopes(data, config):
        result = analyze_scope(scope, part, config)
        yield scope, list(result.louvain), list(result.louvain.values()), result.dataset.records


def cmd_compare(config: RunConfig, args: argparse.Namespace) -> int:
    os.makedirs(config.out, exist_ok=True)
    for scope, names, classifications, records in _compare_sources(args, config):
        if len(classifications) < 2 or len(classifications[0].labels) < 2:
            log.warning("%s: fewer than two classifications or universities; nothing to compare", scope)
            continue
        root = output_root(scope, config)
        matrix = concordance_matrix(classifications, names)
        with _open(f"{root}_concordance.csv") as fh:
            write_concordance_csv(matrix, fh)
        _write_json(f"{root}_concordance.json", {
            "scope": scope,
            "n": matrix.n,
            "methods": list(matrix.methods),
            "v": [[round(float(x), 6) for x in row] for row in matrix.v],
            "p": [[float(x) for x in row] for row in matrix.pvalue],
            "stars": [[stars(x) for x in row] for row in matrix.pvalue],
        })
        if records is not None:
            lists = {name: top_group(c, records) for name, c in zip(names, classifications)}
            depth = max(len(v) for v in lists.values())
            with _open(f"{root}_toplists.csv") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(names)
                for k in range(depth):
                    writer.writerow([lists[n][k] if k < len(lists[n]) else "" for n in names])
        print(f"{scope}: {len(names)} classifications compared")
    return EXIT_OK


def cmd_distribution(config: RunConfig) -> int:
    data, violations = _load(config)
    os.makedirs(config.out, exist_ok=True)
    for scope, part in scopes(data, config):
        curve = w_distribution(all_pairs(part))
        with _open(f"{output_root(scope, config)}_w_distribution.csv") as fh:
            write_distribution_csv(curve, fh)
        print(f"{scope}: {len(curve)} effect sizes")
    return EXIT_WARN if violations else EXIT_OK


def cmd_validate(path: str) -> int:
    violations = validate(parse_csv(path))
    for v in violations:
        print(v)
    print(f"{len(violations)} violation(s)")
    return EXIT_WARN if violations else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "validate":
            return cmd_validate(args.input)
        config = config_from_args(args)
        if args.command == "analyze":
            return cmd_analyze(config)
        if args.command == "compare":
            return cmd_compare(config, args)
        return cmd_distribution(config)
    except (RankGroupError, OSError, ValueError) as exc:
        print(f"rankgroup: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
