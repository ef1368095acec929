"""Command-line entry point.

Subcommands: validate, run, compare, sweep, report.  Every command
that writes artifacts takes --out and drops a manifest.json recording
the scenario fingerprint, effective seed, policies, and a sha256
checksum per artifact; re-running with identical flags reproduces
identical bytes.  Exit codes: 0 success, 1 validation or usage error,
2 runtime error (I/O, degenerate denominators).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from pathlib import Path

from .allocator import PolicyKind
from .charts import ChartKind, ChartSpec, emit_svg
from .errors import DtaSimError, ValidationError
from .scenario import RangeSpec, Scenario, default_scenario_path, parse_scenario
from .simulator import compare_policies, run
from .sweep import (
    AxisTarget,
    SweepAxis,
    default_axis_range,
    emit_csv,
    series_table,
    summarize,
    sweep1d,
    sweep2d,
)

_POLICY_ALIASES = {
    "static": PolicyKind.STATIC,
    "lb": PolicyKind.LOAD_BALANCE_ONLY,
    "dynamic": PolicyKind.DYNAMIC,
    "optimal": PolicyKind.OPTIMAL_REFERENCE,
}

SUMMARY_FORMAT_VERSION = 1
MANIFEST_FORMAT_VERSION = 1


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract wants 1
    def error(self, message):
        raise _UsageError(message)


def _policy(name: str) -> PolicyKind:
    try:
        return _POLICY_ALIASES[name]
    except KeyError:
        raise ValidationError(
            f"unknown policy {name!r} (choose from {', '.join(_POLICY_ALIASES)})"
        ) from None


def _policy_list(text: str) -> list[PolicyKind]:
    names = [p.strip() for p in text.split(",") if p.strip()]
    if not names:
        raise ValidationError("--policies must name at least one policy")
    return [_policy(n) for n in names]


def _load_scenario(args) -> Scenario:
    path = args.scenario
    if path == "default":
        path = default_scenario_path()
    scenario = parse_scenario(path)
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "epochs", None) is not None:
        updates["epochs"] = args.epochs
    if updates:
        scenario = dataclasses.replace(scenario, **updates)
    return scenario


def _parse_range(text: str) -> RangeSpec:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"range must be min:max:count, got {text!r}")
    try:
        return RangeSpec(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise ValidationError(f"bad range {text!r}: {exc}") from None


def _parse_axis(text: str, range_text: str | None, scenario: Scenario) -> SweepAxis:
    name, _, rest = text.partition(":")
    try:
        target = AxisTarget(name)
    except ValueError:
        valid = ", ".join(t.value for t in AxisTarget)
        raise ValidationError(
            f"unknown axis target {name!r} (choose from {valid})"
        ) from None
    class_id = None
    if rest:
        try:
            class_id = int(rest)
        except ValueError:
            raise ValidationError(
                f"axis class id must be an integer, got {rest!r}"
            ) from None
    if range_text is not None:
        spec = _parse_range(range_text)
    else:
        spec = default_axis_range(scenario, target)
    return SweepAxis(target=target, range=spec, class_id=class_id)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload) -> None:
    data = (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")
    path.write_bytes(data)


def _write_manifest(
    out: Path,
    command: str,
    fingerprint: str,
    seed: int,
    policies,
    artifact_names,
) -> None:
    checksums = {}
    for name in sorted(artifact_names):
        digest = hashlib.sha256((out / name).read_bytes()).hexdigest()
        checksums[name] = digest
    _write_json(
        out / "manifest.json",
        {
            "format_version": MANIFEST_FORMAT_VERSION,
            "command": command,
            "fingerprint": fingerprint,
            "seed": seed,
            "policies": [p.value for p in policies],
            "artifacts": checksums,
        },
    )


def _chart_footer(scenario: Scenario, policy_text: str) -> str:
    return (
        f"policy={policy_text} seed={scenario.seed} "
        f"pool={scenario.pool_total:g} classes={scenario.n_classes} "
        f"epochs={scenario.epochs} trace={scenario.trace_model.value} "
        f"scenario={scenario.fingerprint()[:12]}"
    )


def _cmd_validate(args) -> int:
    scenario = _load_scenario(args)
    print(
        f"OK fingerprint={scenario.fingerprint()} classes={scenario.n_classes} "
        f"pool={scenario.pool_total:g} epochs={scenario.epochs} "
        f"seed={scenario.seed}"
    )
    return 0


def _cmd_run(args) -> int:
    scenario = _load_scenario(args)
    policy = _policy(args.policy)
    result = run(scenario, policy)
    out = _out_dir(args)

    table = series_table(result)
    emit_csv(table, out / "series.csv")
    spec = ChartSpec(
        kind=ChartKind.LINE,
        footer=_chart_footer(scenario, policy.value),
    )
    emit_svg(table, spec, out / "series.svg")
    _write_json(
        out / "summary.json",
        {
            "format_version": SUMMARY_FORMAT_VERSION,
            "kind": "run",
            "fingerprint": scenario.fingerprint(),
            "seed": scenario.seed,
            "epochs": scenario.epochs,
            "pool_total": scenario.pool_total,
            "policies": summarize([result])["policies"],
        },
    )
    _write_manifest(
        out,
        "run",
        scenario.fingerprint(),
        scenario.seed,
        [policy],
        ["series.csv", "series.svg", "summary.json"],
    )
    print(f"wrote {out}/series.csv, series.svg, summary.json, manifest.json")
    return 0


def _cmd_compare(args) -> int:
    scenario = _load_scenario(args)
    policies = _policy_list(args.policies)
    comparison = compare_policies(scenario, policies)
    out = _out_dir(args)

    artifacts = []
    for result in comparison.results:
        name = result.policy.value
        table = series_table(result)
        emit_csv(table, out / f"series_{name}.csv")
        spec = ChartSpec(
            kind=ChartKind.LINE,
            footer=_chart_footer(scenario, name),
        )
        emit_svg(table, spec, out / f"series_{name}.svg")
        artifacts += [f"series_{name}.csv", f"series_{name}.svg"]

    _write_json(
        out / "summary.json",
        {
            "format_version": SUMMARY_FORMAT_VERSION,
            "kind": "compare",
            "fingerprint": scenario.fingerprint(),
            "seed": scenario.seed,
            "epochs": scenario.epochs,
            "pool_total": scenario.pool_total,
            "policies": summarize(comparison.results)["policies"],
            "deltas": [
                {
                    "policy": d.policy.value,
                    "mean_throughput": d.mean_throughput,
                    "mean_objective": d.mean_objective,
                    "mean_effective_throughput": d.mean_effective_throughput,
                }
                for d in comparison.deltas
            ],
        },
    )
    artifacts.append("summary.json")
    _write_manifest(
        out,
        "compare",
        scenario.fingerprint(),
        scenario.seed,
        policies,
        sorted(set(artifacts)),
    )
    print(f"wrote {len(set(artifacts)) + 1} artifacts to {out}")
    return 0


def _cmd_sweep(args) -> int:
    scenario = _load_scenario(args)
    policy = _policy(args.policy)
    axis = _parse_axis(args.axis, args.range, scenario)
    out = _out_dir(args)

    if args.axis2 is not None:
        axis2 = _parse_axis(args.axis2, args.range2, scenario)
        table = sweep2d(scenario, axis, axis2, policy)
        spec = ChartSpec(
            kind=ChartKind.HEATMAP,
            footer=_chart_footer(scenario, policy.value),
        )
    else:
        table = sweep1d(scenario, axis, policy)
        spec = ChartSpec(
            kind=ChartKind.LINE,
            footer=_chart_footer(scenario, policy.value),
        )
    emit_csv(table, out / "sweep.csv")
    emit_svg(table, spec, out / "sweep.svg")
    _write_manifest(
        out,
        "sweep",
        scenario.fingerprint(),
        scenario.seed,
        [policy],
        ["sweep.csv", "sweep.svg"],
    )
    print(f"wrote {out}/sweep.csv, sweep.svg, manifest.json ({len(table.rows)} rows)")
    return 0


def _cmd_report(args) -> int:
    path = Path(args.result)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON: {exc}") from None
    for key in ("kind", "fingerprint", "seed", "policies"):
        if key not in data:
            raise ValidationError(f"{path}: summary is missing key {key!r}")
    if not isinstance(data["seed"], int) or isinstance(data["seed"], bool):
        raise ValidationError(f"{path}: 'seed' must be an integer")
    if not isinstance(data["policies"], list):
        raise ValidationError(f"{path}: 'policies' must be a list")

    out = _out_dir(args)
    lines = [
        "# Simulation report",
        "",
        f"- kind: {data['kind']}",
        f"- scenario fingerprint: {data['fingerprint']}",
        f"- seed: {data['seed']}",
        f"- epochs: {data.get('epochs', 'n/a')}",
        f"- pool total: {data.get('pool_total', 'n/a')}",
        "",
        "| policy | mean thr | min thr | max thr | mean objective "
        "| mean eff thr | violations | plateau CV |",
        "| --- | --- | --- | --- | --- | --- | --- | --- |",
    ]
    for pos, rec in enumerate(data["policies"]):
        try:
            lines.append(
                "| {policy} | {mean_throughput:.6g} | {min_throughput:.6g} "
                "| {max_throughput:.6g} | {mean_objective:.6g} "
                "| {mean_effective_throughput:.6g} | {total_violations} "
                "| {plateau_cv:.6g} |".format(**rec)
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(
                f"{path}: malformed policy record {pos}: {exc}"
            ) from None
    if data.get("deltas"):
        lines += [
            "",
            "Deltas against the first policy:",
            "",
            "| policy | d mean thr | d mean objective | d mean eff thr |",
            "| --- | --- | --- | --- |",
        ]
        for pos, rec in enumerate(data["deltas"]):
            try:
                lines.append(
                    "| {policy} | {mean_throughput:+.6g} | {mean_objective:+.6g} "
                    "| {mean_effective_throughput:+.6g} |".format(**rec)
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValidationError(
                    f"{path}: malformed delta record {pos}: {exc}"
                ) from None
    payload = ("\n".join(lines) + "\n").encode("utf-8")
    (out / "report.md").write_bytes(payload)
    _write_manifest(
        out,
        "report",
        data["fingerprint"],
        int(data["seed"]),
        [_policy_from_value(v) for v in _summary_policy_values(data)],
        ["report.md"],
    )
    print(f"wrote {out}/report.md, manifest.json")
    return 0


def _summary_policy_values(data) -> list[str]:
    return [rec["policy"] for rec in data["policies"]]


def _policy_from_value(value: str) -> PolicyKind:
    try:
        return PolicyKind(value)
    except ValueError:
        raise ValidationError(f"summary names unknown policy {value!r}") from None


def _add_common(sub, epochs=True) -> None:
    sub.add_argument("--seed", type=int, default=None, help="override scenario seed")
    if epochs:
        sub.add_argument(
            "--epochs", type=int, default=None, help="override scenario epochs"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dtasim",
        description=(
            "Deterministic QoS-aware traffic allocation simulator: validate "
            "scenarios, run policies, compare them on one trace, sweep "
            "parameters, and render reports."
        ),
    )
    subs = parser.add_subparsers(dest="command", required=True)

    scenario_help = "scenario file path, or 'default' for the bundled scenario"

    p = subs.add_parser("validate", help="parse and validate a scenario file")
    p.add_argument("scenario", help=scenario_help)
    _add_common(p)
    p.set_defaults(func=_cmd_validate)

    p = subs.add_parser("run", help="run one policy over the scenario trace")
    p.add_argument("scenario", help=scenario_help)
    p.add_argument(
        "--policy",
        default="dynamic",
        help="static|lb|dynamic|optimal (default dynamic)",
    )
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p)
    p.set_defaults(func=_cmd_run)

    p = subs.add_parser("compare", help="run several policies on one trace")
    p.add_argument("scenario", help=scenario_help)
    p.add_argument(
        "--policies",
        default="static,dynamic",
        help="comma list of policies (default static,dynamic)",
    )
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p)
    p.set_defaults(func=_cmd_compare)

    p = subs.add_parser("sweep", help="sweep one or two parameter axes")
    p.add_argument("scenario", help=scenario_help)
    p.add_argument(
        "--axis",
        required=True,
        help="axis target[:class_id]; targets: "
        + ", ".join(t.value for t in AxisTarget),
    )
    p.add_argument("--axis2", default=None, help="second axis target[:class_id]")
    p.add_argument("--range", default=None, help="axis grid as min:max:count")
    p.add_argument("--range2", default=None, help="second axis grid as min:max:count")
    p.add_argument(
        "--policy",
        default="dynamic",
        help="static|lb|dynamic|optimal (default dynamic)",
    )
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = subs.add_parser("report", help="render a summary.json as markdown")
    p.add_argument("result", help="path to a summary.json from run/compare")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DtaSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
