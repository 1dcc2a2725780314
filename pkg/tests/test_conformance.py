from qsdcsim.conformance import (
    REFERENCE_DECODE_2U_PARTIAL,
    REFERENCE_DECODE_3U_PARTIAL,
    conformance_report,
    glyph_table,
    render_report_text,
)
from qsdcsim.comms import Mode


def test_reference_vectors_cover_full_tables():
    assert len(REFERENCE_DECODE_2U_PARTIAL) == 8
    assert len(REFERENCE_DECODE_3U_PARTIAL) == 16


def test_generated_tables_match_reference_vectors():
    report = conformance_report()
    assert report.ok, report.mismatches
    assert set(report.tables) == {"2u_partial", "2u_full",
                                  "3u_partial", "3u_full"}
    assert len(report.tables["2u_partial"]) == 8
    assert len(report.tables["3u_partial"]) == 16


def test_glyph_table_round_trip():
    table = glyph_table(2, Mode.PARTIAL)
    assert table[("+", "Phi+")] == "00"
    assert table[("-", "psi-")] == "01"
    three = glyph_table(3, Mode.PARTIAL)
    assert three[("-", "vphi+")] == "101"


def test_report_text_rendering():
    text = render_report_text(conformance_report())
    assert "status: PASS" in text
    assert "mismatches: none" in text
    assert "3u_full" in text
