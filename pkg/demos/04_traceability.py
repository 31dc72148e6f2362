"""Verifying claims against their cited pages and catching example leakage.

Run: python demos/04_traceability.py
"""

from esglens.corpus import ingest_report
from esglens.extract import ExtractedClaim, S3_EXAMPLE_POINTS, Section
from esglens.trace import TraceConfig, audit_run, verify_claim

pages = [
    (1, "Opening letter from the chief executive on sustainability strategy."),
    (2, "In 2023, the annual total energy reduction reached 280 GWh, and the "
        "cumulative total reached 810 GWh across all fabrication sites."),
    (3, "Suppliers reduced water consumption by a cumulative 42.58 million "
        "metric tons, surpassing the 30 million target."),
]
report = ingest_report(pages, company_id="demo-co", fiscal_year=2023)


def claim(point, page):
    return ExtractedClaim(question_id="GRI_302_1", point=point,
                          source_page=page, section=Section.SUMMARY)


# A faithful claim verifies on its cited page with a high match score.
good = claim("The annual total energy reduction reached 280 GWh, and the "
             "cumulative total reached 810 GWh.", 2)
result = verify_claim(good, report)
print(f"faithful claim: {result.status.value} on page {result.matched_page} "
      f"(score {result.match_score:.2f})")

# A claim with the right text but wrong citation: the match is found
# elsewhere, outside the one-page tolerance window.
misplaced = claim(good.point, 1)  # page 2 is within the +-1 window, verifies
print(f"off-by-one citation: {verify_claim(misplaced, report).status.value}")

# Numbers are load-bearing: a claim whose numerals are absent from the
# cited neighborhood never verifies, however similar the prose.
wrong_number = claim(good.point.replace("810", "999"), 2)
print(f"altered number: {verify_claim(wrong_number, report).status.value}")

# Few-shot example leakage: a "finding" that reproduces a prompt
# demonstration is flagged before any document matching happens.
leaked = claim(S3_EXAMPLE_POINTS[1], 2)
result = verify_claim(leaked, report, few_shot_examples=S3_EXAMPLE_POINTS)
print(f"leaked demonstration: {result.status.value} "
      f"(leakage score {result.leakage_score:.2f})")

# Audits roll everything up with per-status counts.
audit = audit_run([good, misplaced, wrong_number, leaked], report,
                  few_shot_examples=S3_EXAMPLE_POINTS, cfg=TraceConfig())
print(f"\naudit counts: {audit.counts}")
print(f"verified fraction: {audit.verified_fraction:.2f}")
