"""Deterministic settlement reports: delimited files, aligned tables, audits.

CSV files carry full-precision values (shortest round-trip ``repr``) so two
runs over the same scenario are byte-identical and diffs are meaningful.
Aligned-table files are for human eyes and display 2 to 4 decimals.
"""

from __future__ import annotations

import csv
import re
from pathlib import Path

import numpy as np

from .curve import LoadCurve, evaluate, grid
from .settlement import AuditReport, BillBreakdown, SettlementResult
from .tariff import EquivalentPrices

_SLUG_RE = re.compile(r"[^A-Za-z0-9_.-]+")


def _slug(name: str) -> str:
    return _SLUG_RE.sub("-", name) or "unnamed"


def _display(v: float) -> str:
    if v != v:  # NaN never reaches reports; belt and braces
        return "nan"
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("", "-0") else s


# ---------------------------------------------------------------------------
# bill breakdowns
# ---------------------------------------------------------------------------


def write_breakdown_csv(bill: BillBreakdown, path: "str | Path") -> None:
    """Write one breakdown as ``subscriber,n,kind,coefficient,price,charge``.

    Line rows come first (kinds ``a0``, ``a``, ``b``), then three summary
    rows (``non_dynamic``, ``dynamic``, ``total``) with only the charge
    column filled.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["subscriber", "n", "kind", "coefficient", "price", "charge"])
        for line in bill.lines:
            writer.writerow(
                [bill.party, str(line.n), line.kind, repr(line.coefficient), repr(line.price), repr(line.charge)]
            )
        writer.writerow([bill.party, "", "non_dynamic", "", "", repr(bill.non_dynamic_total)])
        writer.writerow([bill.party, "", "dynamic", "", "", repr(bill.dynamic_total)])
        writer.writerow([bill.party, "", "total", "", "", repr(bill.total)])


def format_breakdown_table(bill: BillBreakdown) -> str:
    """Aligned, human-readable rendering of one breakdown."""
    title = f"settlement for {bill.party}"
    if bill.counterparty:
        title += f" with {bill.counterparty}"
    headers = ["n", "kind", "coefficient", "price", "charge"]
    rows = [
        [str(l.n), l.kind, _display(l.coefficient), _display(l.price), _display(l.charge)]
        for l in bill.lines
    ]
    rows.append(["", "non_dynamic", "", "", _display(bill.non_dynamic_total)])
    rows.append(["", "dynamic", "", "", _display(bill.dynamic_total)])
    rows.append(["", "total", "", "", _display(bill.total)])
    widths = [
        max(len(headers[i]), max((len(r[i]) for r in rows), default=0))
        for i in range(len(headers))
    ]
    lines = [title, ""]
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(r))).rstrip())
    return "\n".join(lines) + "\n"


def write_breakdown_table(bill: BillBreakdown, path: "str | Path") -> None:
    Path(path).write_text(format_breakdown_table(bill))


# ---------------------------------------------------------------------------
# audits and equivalent prices
# ---------------------------------------------------------------------------


def format_audit(audit: AuditReport) -> str:
    lines = [
        f"audit: {'PASS' if audit.passed else 'FAIL'}",
        f"total billed:      {audit.total_billed!r}",
        f"total income:      {audit.total_income!r}",
        f"total unallocated: {audit.total_unallocated!r}",
        f"money residual:    {audit.residual!r} (tolerance {audit.tolerance!r})",
        f"energy generated:  {audit.energy_generated!r}",
        f"energy consumed:   {audit.energy_consumed!r}",
        f"energy residual:   {audit.energy_residual!r} (tolerance {audit.energy_tolerance!r})",
    ]
    if audit.negative_parties:
        lines.append("negative totals:   " + ", ".join(sorted(set(audit.negative_parties))))
    else:
        lines.append("negative totals:   none")
    if audit.flows:
        lines.append("")
        lines.append("money per frequency slot (billed / earned / unallocated):")
        for flow in audit.flows:
            lines.append(
                f"  n={flow.n} {flow.component}: {flow.billed!r} / {flow.earned!r} / {flow.unallocated!r}"
            )
    return "\n".join(lines) + "\n"


def write_audit_text(audit: AuditReport, path: "str | Path") -> None:
    Path(path).write_text(format_audit(audit))


def write_equivalent_csv(eq: EquivalentPrices, path: "str | Path") -> None:
    """Equivalent bus prices as ``n,alpha,beta`` rows (n=0 row carries alpha0)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "alpha", "beta"])
        writer.writerow(["0", repr(eq.alpha0), repr(0.0)])
        for hp in eq.per_harmonic:
            writer.writerow([str(hp.n), repr(hp.alpha), repr(hp.beta)])
        for entry in eq.unallocated:
            writer.writerow([f"unallocated_{entry.component}{entry.n}", repr(entry.value), ""])


# ---------------------------------------------------------------------------
# whole settlements
# ---------------------------------------------------------------------------


def _pair_name(prefix: str, bill: BillBreakdown) -> str:
    if bill.counterparty:
        return f"{prefix}_{_slug(bill.party)}__{_slug(bill.counterparty)}"
    return f"{prefix}_{_slug(bill.party)}"


def write_settlement(
    result: SettlementResult, out_dir: "str | Path", fmt: str = "csv"
) -> list[Path]:
    """Write the full artifact set for a settlement into ``out_dir``.

    One bill file per subscriber (or per combination when settlements are
    pairwise), one income file per source, the equivalent price schedule
    when one exists, and ``audit.txt``. Files are written in sorted-name
    order and their contents are deterministic. Returns the paths written.
    """
    if fmt not in ("csv", "table"):
        raise ValueError(f"format must be 'csv' or 'table', got {fmt!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ext = "csv" if fmt == "csv" else "txt"
    writer = write_breakdown_csv if fmt == "csv" else write_breakdown_table

    named: list[tuple[str, BillBreakdown]] = []
    named.extend((_pair_name("bill", b), b) for b in result.bills)
    named.extend((_pair_name("income", b), b) for b in result.incomes)
    names = [n for n, _ in named]
    if len(set(names)) != len(names):
        raise ValueError(f"party ids collide after filename sanitization: {sorted(names)}")

    paths = []
    for name, bill in sorted(named, key=lambda item: item[0]):
        path = out / f"{name}.{ext}"
        writer(bill, path)
        paths.append(path)
    if result.equivalent is not None:
        path = out / "equivalent_prices.csv"
        write_equivalent_csv(result.equivalent, path)
        paths.append(path)
    audit_path = out / "audit.txt"
    write_audit_text(result.audit, audit_path)
    paths.append(audit_path)
    return paths


# ---------------------------------------------------------------------------
# curve traces
# ---------------------------------------------------------------------------


def write_curve_csv(p: LoadCurve, samples: int, path: "str | Path") -> None:
    """Sample a curve onto a closed uniform grid and write ``t,p`` rows.

    The output is itself a valid meter file, so a plotted curve can be read
    back for further processing.
    """
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    t = grid(p.interval, samples)
    values = np.asarray(evaluate(p, t), dtype=float)
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "p"])
        for ti, pi in zip(t, values):
            writer.writerow([repr(float(ti)), repr(float(pi))])
