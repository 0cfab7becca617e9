"""Command-line front door.

    crsegre <classify|chains|normalize|map-check> <manifest>
            [--order N] [--seed S] [--trials T] [--degree-bound D]
            [--format json|text] [--linear-change "a,b;c,d"]
            [--slice-trials T]

Exit codes: 0 success (inconclusive verdicts included), 2 manifest or input
errors, 3 reality failure of the defining equations, 4 a map fails the
fundamental identity.  For a fixed manifest and flags the JSON output is
byte-identical between runs.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import __version__
from .frontend import (
    load_manifest, FrontendError, parse_expr_text, constant_value,
)
from .manifold import (
    build_from_spec, build_with_linear_change, ManifoldError, RealityError,
    to_normal_coordinates,
)
from .chains import segre_type, psi_generic_ranks, find_submersive_slice, \
    SubmersiveSliceWitness
from .nondegen import classify_at_origin, classify_at_point, \
    tangent_holomorphic_fields
from .crmap import mapping_from_spec, verify_cr_map, classify_map, \
    necessary_and_transfer_checks, CRMapError

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_MANIFEST = 2
EXIT_REALITY = 3
EXIT_MAP = 4


@dataclass
class RunConfig:
    command: str
    manifest_path: str
    order: int = None
    seed: int = 0
    trials: int = 8
    degree_bound: int = None
    fmt: str = "text"
    linear_change: str = None
    slice_trials: int = 20


class CliError(Exception):
    def __init__(self, message, code):
        self.code = code
        super().__init__(message)


def build_parser():
    p = argparse.ArgumentParser(
        prog="crsegre",
        description="exact local CR invariants from truncated defining "
                    "equations")
    p.add_argument("command",
                   choices=["classify", "chains", "normalize", "map-check"])
    p.add_argument("manifest", help="manifest file path")
    p.add_argument("--order", type=int, default=None,
                   help="override the truncation order of every manifold")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=8,
                   help="sample count per disjoint set for generic ranks")
    p.add_argument("--degree-bound", type=int, default=None,
                   help="degree bound for transversality annihilator search")
    p.add_argument("--format", dest="fmt", choices=["json", "text"],
                   default="text")
    p.add_argument("--linear-change", default=None,
                   help="n x n matrix 'a,b;c,d' (entries in expression "
                        "syntax) applied as t' = A t before solving")
    p.add_argument("--slice-trials", type=int, default=20,
                   help="sample budget for the submersive-slice search")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    config = RunConfig(args.command, args.manifest, args.order, args.seed,
                       args.trials, args.degree_bound, args.fmt,
                       args.linear_change, args.slice_trials)
    try:
        report = run(config)
    except CliError as exc:
        sys.stderr.write("crsegre: %s\n" % exc)
        return exc.code
    if config.fmt == "json":
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2))
        sys.stdout.write("\n")
    else:
        sys.stdout.write(render_text(report))
    return report.get("exit_code", EXIT_OK)


def run(config):
    try:
        with open(config.manifest_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError("cannot read manifest: %s" % exc, EXIT_MANIFEST)
    try:
        manifest = load_manifest(text)
    except FrontendError as exc:
        raise CliError("manifest error: %s" % exc, EXIT_MANIFEST)
    if not manifest.manifolds:
        raise CliError("manifest contains no manifold block", EXIT_MANIFEST)

    linear_change = None
    if config.linear_change:
        linear_change = _parse_matrix(config.linear_change)

    report = {
        "tool": "crsegre",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "command": config.command,
        "inputs": {
            "manifest": config.manifest_path,
            "order_override": config.order,
            "seed": config.seed,
            "trials": config.trials,
            "degree_bound": config.degree_bound,
            "linear_change": config.linear_change,
        },
        "exit_code": EXIT_OK,
    }

    manifolds = {}
    for name, spec in manifest.manifolds.items():
        if config.order is not None:
            spec.order = config.order
        if spec.order < 4:
            raise CliError("order must be >= 4", EXIT_MANIFEST)
        try:
            if linear_change is not None:
                M = build_with_linear_change(spec, linear_change)
            else:
                M = build_from_spec(spec)
        except RealityError as exc:
            raise CliError("manifold %r: %s" % (name, exc), EXIT_REALITY)
        except (ManifoldError, FrontendError) as exc:
            raise CliError("manifold %r: %s" % (name, exc), EXIT_MANIFEST)
        manifolds[name] = (spec, M)

    if config.command == "classify":
        report["manifolds"] = {
            name: _cmd_classify(spec, M, config)
            for name, (spec, M) in manifolds.items()}
    elif config.command == "chains":
        report["manifolds"] = {
            name: _cmd_chains(M, config)
            for name, (spec, M) in manifolds.items()}
    elif config.command == "normalize":
        report["manifolds"] = {
            name: _cmd_normalize(M)
            for name, (spec, M) in manifolds.items()}
    elif config.command == "map-check":
        if not manifest.maps:
            raise CliError("map-check needs at least one map block",
                           EXIT_MANIFEST)
        sections = {}
        worst = EXIT_OK
        for name, mspec in manifest.maps.items():
            src = manifolds[mspec.source][1]
            dst = manifolds[mspec.target][1]
            section, code = _cmd_map_check(mspec, src, dst, config)
            sections[name] = section
            worst = max(worst, code)
        report["maps"] = sections
        report["exit_code"] = worst
    return report


def _parse_matrix(text):
    try:
        rows = []
        for row_text in text.split(";"):
            row = [constant_value(parse_expr_text(cell))
                   for cell in row_text.split(",")]
            rows.append(row)
        return rows
    except FrontendError as exc:
        raise CliError("bad --linear-change matrix: %s" % exc, EXIT_MANIFEST)


def _echo(M):
    return {
        "m": M.m, "d": M.d, "order": M.order,
        "theta": M.theta_strings(),
    }


def _cmd_classify(spec, M, config):
    out = {"input": _echo(M)}
    rep = classify_at_origin(M, seed=config.seed, trials=config.trials)
    out["at_origin"] = rep.to_dict()
    fields = tangent_holomorphic_fields(M, seed=config.seed,
                                        trials=config.trials)
    names = ["z_%d" % (k + 1) for k in range(M.m)] + \
            ["w_%d" % (j + 1) for j in range(M.d)]
    out["tangent_holomorphic_fields"] = [
        [c.to_str(names) for c in f] for f in fields]
    points = []
    for entry in spec.points:
        z_p = [constant_value(ast) for ast in entry]
        try:
            p = M.surface_point(z_p)
        except ManifoldError as exc:
            points.append({"z": [str(c) for c in z_p], "error": str(exc)})
            continue
        prep = classify_at_point(M, p, seed=config.seed, trials=config.trials)
        points.append(prep.to_dict())
    if points:
        out["at_points"] = points
    return out


def _cmd_chains(M, config):
    out = {"input": _echo(M)}
    rep = segre_type(M, seed=config.seed, trials=config.trials)
    out["segre_type"] = rep.to_dict()
    k_max = min(rep.mu0 + 1, M.order - 1)
    ranks, nu0 = psi_generic_ranks(M, k_max, seed=config.seed,
                                   trials=config.trials)
    out["psi_generic_ranks"] = ranks
    out["nu0"] = nu0
    slice_result = find_submersive_slice(M, trials=config.slice_trials,
                                         seed=config.seed, report=rep)
    key = "submersive_slice" if isinstance(slice_result, SubmersiveSliceWitness) \
        else "submersive_slice_failure"
    out[key] = slice_result.to_dict()
    return out


def _cmd_normalize(M):
    out = {"input": _echo(M)}
    Mn, h = to_normal_coordinates(M)
    names = ["z_%d" % (k + 1) for k in range(M.m)] + \
            ["w_%d" % (j + 1) for j in range(M.d)]
    out["normalized_theta"] = Mn.theta_strings()
    out["change_of_coordinates"] = [s.to_str(names) for s in h]
    out["is_normal"] = Mn.is_normal()
    out["reality"] = Mn.check_reality().to_dict()
    return out


def _cmd_map_check(mspec, src, dst, config):
    out = {
        "source": mspec.source,
        "target": mspec.target,
    }
    try:
        mapping = mapping_from_spec(mspec, src, dst)
    except (CRMapError, FrontendError) as exc:
        raise CliError("map %r: %s" % (mspec.name, exc), EXIT_MANIFEST)
    verdict = verify_cr_map(mapping)
    out["fundamental_identity"] = verdict.to_dict()
    if not verdict.ok:
        return out, EXIT_MAP
    rep = classify_map(mapping, degree_bound=config.degree_bound,
                       seed=config.seed, trials=config.trials)
    out.update(rep.to_dict())
    cons = necessary_and_transfer_checks(
        mapping, map_report=rep, degree_bound=config.degree_bound,
        seed=config.seed, trials=config.trials)
    out["consistency"] = cons.to_dict()
    return out, EXIT_OK


# ---------------------------------------------------------------------------
# text rendering
# ---------------------------------------------------------------------------

def render_text(report):
    lines = ["crsegre %s  (schema %d)" % (report["version"],
                                          report["schema_version"]),
             "command: %s" % report["command"],
             "manifest: %s" % report["inputs"]["manifest"]]
    for section in ("manifolds", "maps"):
        for name, body in report.get(section, {}).items():
            lines.append("")
            lines.append("%s %s" % (section[:-1], name))
            lines.extend(_render_value(body, 1))
    lines.append("")
    return "\n".join(lines)


def _render_value(value, depth):
    pad = "  " * depth
    lines = []
    if isinstance(value, dict):
        for key in sorted(value):
            sub = value[key]
            if isinstance(sub, (dict, list)):
                lines.append("%s%s:" % (pad, key))
                lines.extend(_render_value(sub, depth + 1))
            else:
                lines.append("%s%s: %s" % (pad, key, sub))
    elif isinstance(value, list):
        simple = all(not isinstance(v, (dict, list)) for v in value)
        if simple:
            lines.append("%s%s" % (pad, ", ".join(str(v) for v in value)))
        else:
            for v in value:
                lines.extend(_render_value(v, depth))
    else:
        lines.append("%s%s" % (pad, value))
    return lines


if __name__ == "__main__":
    sys.exit(main())
