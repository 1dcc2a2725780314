"""Decode-table conformance: the generated maps versus frozen reference
vectors.

The 2- and 3-user partial-cooperation decode correlations are fixed
acceptance vectors (publication, outcome glyph) -> sent bits.  The maps in
use are always the generated ones; any disagreement is reported, never
silently patched, and a non-empty mismatch list is a release blocker unless
a documented waiver names the offending row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .comms import Mode, decode_map

# (publication, glyph) -> bits, upper half '+' and mirrored lower half '-'
REFERENCE_DECODE_2U_PARTIAL = {
    ("+", "Phi+"): "00", ("+", "psi+"): "01", ("+", "psi-"): "10", ("+", "Phi-"): "11",
    ("-", "Phi-"): "00", ("-", "psi-"): "01", ("-", "psi+"): "10", ("-", "Phi+"): "11",
}

REFERENCE_DECODE_3U_PARTIAL = {
    ("+", "Psi+"): "000", ("+", "phi+"): "001",
    ("+", "psi+"): "010", ("+", "vphi+"): "011",
    ("+", "psi-"): "100", ("+", "vphi-"): "101",
    ("+", "Psi-"): "110", ("+", "phi-"): "111",
    ("-", "Psi-"): "000", ("-", "phi-"): "001",
    ("-", "psi-"): "010", ("-", "vphi-"): "011",
    ("-", "psi+"): "100", ("-", "vphi+"): "101",
    ("-", "Psi+"): "110", ("-", "phi+"): "111",
}

# glyph -> canonical pattern for the outcome labels used in the vectors
_PATTERNS_BY_WIDTH = {
    2: {"Phi": "00", "psi": "01"},
    3: {"Psi": "000", "psi": "011", "phi": "010", "vphi": "001"},
}


@dataclass
class Mismatch:
    n_users: int
    mode: str
    publication: str
    outcome: str
    expected: str
    generated: str


@dataclass
class ConformanceReport:
    tables: dict[str, dict[str, str]]
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "tables": self.tables,
            "mismatches": [vars(m) for m in self.mismatches],
        }


def glyph_table(n_users: int, mode: Mode | str) -> dict[tuple[str, str], str]:
    """The generated decode map re-keyed by (publication, outcome glyph)."""
    table = {}
    for (pattern, sign, pub), bits in decode_map(n_users, Mode(mode)).items():
        glyphs = _PATTERNS_BY_WIDTH.get(len(pattern), {})
        names = [g for g, p in glyphs.items() if p == pattern]
        glyph = names[0] if names else pattern
        table[(pub, glyph + ("+" if sign > 0 else "-"))] = bits
    return table


def _diff(n_users: int, mode: Mode, reference: dict[tuple[str, str], str],
          ) -> list[Mismatch]:
    generated = glyph_table(n_users, mode)
    out = []
    for key, expected in reference.items():
        got = generated.get(key, "<missing>")
        if got != expected:
            out.append(Mismatch(n_users, mode.value, key[0], key[1], expected, got))
    return out


def conformance_report() -> ConformanceReport:
    """Generate the 2- and 3-user tables for both modes and diff the partial
    ones against the reference vectors.

    Full-mode tables have no frozen vectors; they are checked to mirror the
    partial tables exactly (the shared state is symmetric under exchanging
    the non-sender parties, so the role swap cannot change the map).
    """
    tables: dict[str, dict[str, str]] = {}
    for n in (2, 3):
        for mode in Mode:
            table = glyph_table(n, mode)
            tables[f"{n}u_{mode.value}"] = {
                f"{pub}|{glyph}": bits for (pub, glyph), bits in sorted(table.items())}

    mismatches = _diff(2, Mode.PARTIAL, REFERENCE_DECODE_2U_PARTIAL)
    mismatches += _diff(3, Mode.PARTIAL, REFERENCE_DECODE_3U_PARTIAL)
    for n in (2, 3):
        partial, full = glyph_table(n, Mode.PARTIAL), glyph_table(n, Mode.FULL)
        for key, expected in partial.items():
            got = full.get(key, "<missing>")
            if got != expected:
                mismatches.append(
                    Mismatch(n, "full-vs-partial", key[0], key[1], expected, got))
    return ConformanceReport(tables, mismatches)


def render_report_text(report: ConformanceReport) -> str:
    lines = ["decode-table conformance report",
             f"status: {'PASS' if report.ok else 'FAIL'}", ""]
    for name, table in report.tables.items():
        lines.append(f"[{name}]")
        for key, bits in table.items():
            lines.append(f"  {key} -> {bits}")
        lines.append("")
    if report.mismatches:
        lines.append("mismatches:")
        for m in report.mismatches:
            lines.append(f"  {m.n_users}u {m.mode} ({m.publication}, {m.outcome}): "
                         f"expected {m.expected}, generated {m.generated}")
    else:
        lines.append("mismatches: none")
    return "\n".join(lines) + "\n"
