"""Presentation layer: JSON, Markdown and CSV views of reports.

Percents are kept at full precision inside the package and rounded half-up
only here. Adaptivity-mode reports print degree names with an apostrophe
(LA', AA', FA', GA'); the computation is identical in both modes.
"""

from __future__ import annotations

import csv
import io
import json
from decimal import ROUND_HALF_UP, Decimal

from .analysis import ComparisonReport, MergedEvaluation
from .gridmodel import Mode
from .scoring import LocalDegree, MicroDegree, ScoreReport

UNDEFINED_CELL = "-"  # rendered for all-N/A (undefined) degrees


def round_half_up(value: float, decimals: int = 2) -> float:
    """Round a float half-up (0.005 -> 0.01) at the given number of decimals."""
    quantum = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def degree_suffix(mode: Mode) -> str:
    """Apostrophe marking adaptivity degrees; empty for adaptability."""
    return "'" if mode is Mode.ADAPTIVITY else ""


def _fmt(value: float | None, decimals: int, *, signed: bool = False) -> str:
    if value is None:
        return UNDEFINED_CELL
    rounded = round_half_up(value, decimals)
    sign = "+" if signed else ""
    return f"{rounded:{sign}.{decimals}f}"


def _round_opt(value: float | None, decimals: int) -> float | None:
    return None if value is None else round_half_up(value, decimals)


# ---------------------------------------------------------------------------
# ScoreReport
# ---------------------------------------------------------------------------

def _local_rows(report: ScoreReport) -> list[LocalDegree]:
    return [
        report.local[(aid, fid)]
        for aid in report.aspect_ids
        for fid in report.factor_ids
    ]


def score_report_to_dict(report: ScoreReport, decimals: int = 2) -> dict:
    """Full-precision JSON document plus a `rounded` convenience block."""
    suffix = degree_suffix(report.mode)
    return {
        "kind": "score_report",
        "taxonomy": {"id": report.taxonomy_id, "version": report.taxonomy_version},
        "system": report.system,
        "evaluator": report.evaluator,
        "mode": report.mode.value,
        "degree_suffix": suffix,
        "aspects": [{"id": aid, "label": label} for aid, label in report.aspects],
        "factors": [{"id": fid, "label": label} for fid, label in report.factors],
        "micro_degrees": [
            {
                "sub_aspect": sa,
                "sub_factor": sf,
                "na": d.is_na,
                "degree": d.value,
            }
            for (sa, sf), d in report.micro.items()
        ],
        "local": [
            {
                "aspect": ld.aspect_id,
                "factor": ld.factor_id,
                "percent": ld.percent,
                "n": ld.n,
                "m": ld.m,
                "degree_sum": ld.degree_sum,
            }
            for ld in _local_rows(report)
        ],
        "aspect_degrees": [
            {"aspect": aid, "percent": report.aspect_degrees[aid]}
            for aid in report.aspect_ids
        ],
        "factor_degrees": [
            {"factor": fid, "percent": report.factor_degrees[fid]}
            for fid in report.factor_ids
        ],
        "global_percent": report.global_percent,
        "identity_warning": report.identity_warning,
        "rounded": {
            "decimals": decimals,
            "local": [
                {
                    "aspect": ld.aspect_id,
                    "factor": ld.factor_id,
                    "percent": _round_opt(ld.percent, decimals),
                }
                for ld in _local_rows(report)
            ],
            "aspect_degrees": {
                aid: _round_opt(report.aspect_degrees[aid], decimals)
                for aid in report.aspect_ids
            },
            "factor_degrees": {
                fid: _round_opt(report.factor_degrees[fid], decimals)
                for fid in report.factor_ids
            },
            "global_percent": round_half_up(report.global_percent, decimals),
        },
    }


def score_report_from_dict(doc: dict) -> ScoreReport:
    """Rebuild a ScoreReport from its JSON document (full-precision fields)."""
    micro = {
        (row["sub_aspect"], row["sub_factor"]): MicroDegree(row["degree"])
        for row in doc["micro_degrees"]
    }
    local = {
        (row["aspect"], row["factor"]): LocalDegree(
            aspect_id=row["aspect"],
            factor_id=row["factor"],
            percent=row["percent"],
            n=row["n"],
            m=row["m"],
            degree_sum=row["degree_sum"],
        )
        for row in doc["local"]
    }
    return ScoreReport(
        taxonomy_id=doc["taxonomy"]["id"],
        taxonomy_version=doc["taxonomy"]["version"],
        system=doc["system"],
        evaluator=doc["evaluator"],
        mode=Mode(doc["mode"]),
        aspects=tuple((a["id"], a["label"]) for a in doc["aspects"]),
        factors=tuple((f["id"], f["label"]) for f in doc["factors"]),
        micro=micro,
        local=local,
        aspect_degrees={r["aspect"]: r["percent"] for r in doc["aspect_degrees"]},
        factor_degrees={r["factor"]: r["percent"] for r in doc["factor_degrees"]},
        global_percent=doc["global_percent"],
        identity_warning=doc["identity_warning"],
    )


def render_score_markdown(report: ScoreReport, decimals: int = 2) -> str:
    """Result grid shaped like the published example: aspects as columns,
    factors as rows, AA/FA margins and the GA corner."""
    s = degree_suffix(report.mode)
    lines = [
        f"# {report.system}: {report.mode.value} degrees",
        "",
        f"Evaluator: {report.evaluator}  ",
        f"Taxonomy: {report.taxonomy_id} v{report.taxonomy_version}",
        "",
    ]
    header = [f"LA{s}"] + [label for _, label in report.aspects] + [f"FA{s}"]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + " --- |" * len(header))
    for fid, flabel in report.factors:
        cells = [flabel]
        for aid in report.aspect_ids:
            cells.append(_fmt(report.local[(aid, fid)].percent, decimals) + " %")
        cells.append(_fmt(report.factor_degrees[fid], decimals) + " %")
        lines.append("| " + " | ".join(cells) + " |")
    bottom = [f"AA{s}"]
    for aid in report.aspect_ids:
        bottom.append(_fmt(report.aspect_degrees[aid], decimals) + " %")
    bottom.append(f"**{_fmt(report.global_percent, decimals)} %**")
    lines.append("| " + " | ".join(bottom) + " |")
    lines.append("")
    lines.append(f"GA{s} = {_fmt(report.global_percent, decimals)} %")
    if report.identity_warning:
        lines.append("")
        lines.append(f"Note: {report.identity_warning}")
    lines.append("")
    return "\n".join(lines)


def render_score_csv(report: ScoreReport, decimals: int = 2) -> str:
    """Same table as the Markdown view, bare numbers, ids as headers."""
    s = degree_suffix(report.mode)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([f"LA{s}"] + list(report.aspect_ids) + [f"FA{s}"])
    for fid in report.factor_ids:
        row: list[str] = [fid]
        for aid in report.aspect_ids:
            row.append(_fmt_csv(report.local[(aid, fid)].percent, decimals))
        row.append(_fmt_csv(report.factor_degrees[fid], decimals))
        writer.writerow(row)
    bottom = [f"AA{s}"]
    for aid in report.aspect_ids:
        bottom.append(_fmt_csv(report.aspect_degrees[aid], decimals))
    bottom.append(_fmt_csv(report.global_percent, decimals))
    writer.writerow(bottom)
    return buffer.getvalue()


def _fmt_csv(value: float | None, decimals: int) -> str:
    return "" if value is None else f"{round_half_up(value, decimals):.{decimals}f}"


# ---------------------------------------------------------------------------
# ComparisonReport
# ---------------------------------------------------------------------------

def comparison_to_dict(report: ComparisonReport, decimals: int = 2) -> dict:
    def delta_rows(rounded: bool) -> list[dict]:
        rows = []
        for aid in (a for a, _ in report.aspects):
            for fid in (f for f, _ in report.factors):
                value = report.la_delta[(aid, fid)]
                rows.append({
                    "aspect": aid,
                    "factor": fid,
                    "delta": _round_opt(value, decimals) if rounded else value,
                })
        return rows

    return {
        "kind": "comparison_report",
        "taxonomy": {"id": report.taxonomy_id, "version": report.taxonomy_version},
        "mode": report.mode.value,
        "left": {"system": report.left_system, "evaluator": report.left_evaluator},
        "right": {"system": report.right_system, "evaluator": report.right_evaluator},
        "aspects": [{"id": a, "label": label} for a, label in report.aspects],
        "factors": [{"id": f, "label": label} for f, label in report.factors],
        "la_delta": delta_rows(rounded=False),
        "aa_delta": [
            {"aspect": aid, "delta": report.aa_delta[aid]} for aid, _ in report.aspects
        ],
        "fa_delta": [
            {"factor": fid, "delta": report.fa_delta[fid]} for fid, _ in report.factors
        ],
        "ga_delta": report.ga_delta,
        "micro_diffs": [
            {
                "sub_aspect": d.sub_aspect_id,
                "sub_factor": d.sub_factor_id,
                "left": d.left,
                "right": d.right,
            }
            for d in report.micro_diffs
        ],
        "na_disagreements": [
            {
                "sub_aspect": d.sub_aspect_id,
                "sub_factor": d.sub_factor_id,
                "left_na": d.left_na,
                "right_na": d.right_na,
            }
            for d in report.na_disagreements
        ],
        "identical": report.is_identical,
        "rounded": {
            "decimals": decimals,
            "la_delta": delta_rows(rounded=True),
            "ga_delta": round_half_up(report.ga_delta, decimals),
        },
    }


def render_comparison_markdown(report: ComparisonReport, decimals: int = 2) -> str:
    s = degree_suffix(report.mode)
    lines = [
        f"# Comparison: {report.left_label} vs {report.right_label}",
        "",
        f"Mode: {report.mode.value}; deltas are right minus left, in percentage points.",
        "",
    ]
    if report.is_identical:
        lines.append("No differences.")
        lines.append("")
        return "\n".join(lines)

    header = [f"LA{s} delta"] + [label for _, label in report.aspects] + [f"FA{s} delta"]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + " --- |" * len(header))
    for fid, flabel in report.factors:
        cells = [flabel]
        for aid, _ in report.aspects:
            cells.append(_fmt(report.la_delta[(aid, fid)], decimals, signed=True))
        cells.append(_fmt(report.fa_delta[fid], decimals, signed=True))
        lines.append("| " + " | ".join(cells) + " |")
    bottom = [f"AA{s} delta"]
    for aid, _ in report.aspects:
        bottom.append(_fmt(report.aa_delta[aid], decimals, signed=True))
    bottom.append(f"**{_fmt(report.ga_delta, decimals, signed=True)}**")
    lines.append("| " + " | ".join(bottom) + " |")
    lines.append("")
    lines.append(f"GA{s} delta = {_fmt(report.ga_delta, decimals, signed=True)} points")

    if report.micro_diffs:
        lines.append("")
        lines.append("## Micro-grids scored differently")
        for d in report.micro_diffs:
            lines.append(
                f"- ({d.sub_aspect_id}, {d.sub_factor_id}): {d.left} -> {d.right}"
            )
    if report.na_disagreements:
        lines.append("")
        lines.append("## N/A disagreements")
        for d in report.na_disagreements:
            lines.append(
                f"- ({d.sub_aspect_id}, {d.sub_factor_id}): "
                f"left {'N/A' if d.left_na else 'scored'}, "
                f"right {'N/A' if d.right_na else 'scored'}"
            )
    lines.append("")
    return "\n".join(lines)


def render_comparison_csv(report: ComparisonReport, decimals: int = 2) -> str:
    s = degree_suffix(report.mode)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([f"LA{s}-delta"] + [a for a, _ in report.aspects] + [f"FA{s}-delta"])
    for fid, _ in report.factors:
        row = [fid]
        for aid, _ in report.aspects:
            row.append(_fmt_csv(report.la_delta[(aid, fid)], decimals))
        row.append(_fmt_csv(report.fa_delta[fid], decimals))
        writer.writerow(row)
    bottom = [f"AA{s}-delta"]
    for aid, _ in report.aspects:
        bottom.append(_fmt_csv(report.aa_delta[aid], decimals))
    bottom.append(_fmt_csv(report.ga_delta, decimals))
    writer.writerow(bottom)
    return buffer.getvalue()


# ---------------------------------------------------------------------------
# MergedEvaluation
# ---------------------------------------------------------------------------

def merged_to_dict(merged: MergedEvaluation, decimals: int = 2) -> dict:
    return {
        "kind": "merged_report",
        "taxonomy": {"id": merged.taxonomy_id, "version": merged.taxonomy_version},
        "system": merged.system,
        "mode": merged.mode.value,
        "evaluators": list(merged.evaluators),
        "aspects": [{"id": a, "label": label} for a, label in merged.aspects],
        "factors": [{"id": f, "label": label} for f, label in merged.factors],
        "mean_degrees": [
            {
                "sub_aspect": sa,
                "sub_factor": sf,
                "na": value is None,
                "mean": value,
            }
            for (sa, sf), value in merged.mean_degrees.items()
        ],
        "local": [
            {
                "aspect": ld.aspect_id,
                "factor": ld.factor_id,
                "percent": ld.percent,
                "n": ld.n,
                "m": ld.m,
                "degree_sum": ld.degree_sum,
            }
            for (aid, _) in merged.aspects
            for ld in (merged.local[(aid, fid)] for fid, _ in merged.factors)
        ],
        "aspect_degrees": [
            {"aspect": aid, "percent": merged.aspect_degrees[aid]}
            for aid, _ in merged.aspects
        ],
        "factor_degrees": [
            {"factor": fid, "percent": merged.factor_degrees[fid]}
            for fid, _ in merged.factors
        ],
        "global_percent": merged.global_percent,
        "identity_warning": merged.identity_warning,
        "rounded": {
            "decimals": decimals,
            "global_percent": round_half_up(merged.global_percent, decimals),
            "aspect_degrees": {
                aid: _round_opt(merged.aspect_degrees[aid], decimals)
                for aid, _ in merged.aspects
            },
            "factor_degrees": {
                fid: _round_opt(merged.factor_degrees[fid], decimals)
                for fid, _ in merged.factors
            },
        },
    }


def render_merged_markdown(merged: MergedEvaluation, decimals: int = 2) -> str:
    s = degree_suffix(merged.mode)
    lines = [
        f"# {merged.system}: merged {merged.mode.value} degrees",
        "",
        f"Evaluators: {', '.join(merged.evaluators)}",
        "",
    ]
    header = [f"LA{s}"] + [label for _, label in merged.aspects] + [f"FA{s}"]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + " --- |" * len(header))
    for fid, flabel in merged.factors:
        cells = [flabel]
        for aid, _ in merged.aspects:
            cells.append(_fmt(merged.local[(aid, fid)].percent, decimals) + " %")
        cells.append(_fmt(merged.factor_degrees[fid], decimals) + " %")
        lines.append("| " + " | ".join(cells) + " |")
    bottom = [f"AA{s}"]
    for aid, _ in merged.aspects:
        bottom.append(_fmt(merged.aspect_degrees[aid], decimals) + " %")
    bottom.append(f"**{_fmt(merged.global_percent, decimals)} %**")
    lines.append("| " + " | ".join(bottom) + " |")
    lines.append("")
    lines.append(f"GA{s} = {_fmt(merged.global_percent, decimals)} %")
    if merged.identity_warning:
        lines.append("")
        lines.append(f"Note: {merged.identity_warning}")
    lines.append("")
    return "\n".join(lines)


def render_merged_csv(merged: MergedEvaluation, decimals: int = 2) -> str:
    s = degree_suffix(merged.mode)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    aspect_ids = [a for a, _ in merged.aspects]
    writer.writerow([f"LA{s}"] + aspect_ids + [f"FA{s}"])
    for fid, _ in merged.factors:
        row = [fid]
        for aid in aspect_ids:
            row.append(_fmt_csv(merged.local[(aid, fid)].percent, decimals))
        row.append(_fmt_csv(merged.factor_degrees[fid], decimals))
        writer.writerow(row)
    bottom = [f"AA{s}"]
    for aid in aspect_ids:
        bottom.append(_fmt_csv(merged.aspect_degrees[aid], decimals))
    bottom.append(_fmt_csv(merged.global_percent, decimals))
    writer.writerow(bottom)
    return buffer.getvalue()


def to_json(document: dict) -> str:
    """Stable JSON text for any report document."""
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"
