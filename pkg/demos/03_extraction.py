"""Prompt strategies and response parsing, strict and lenient.

Run: python demos/03_extraction.py
"""

from esglens.corpus import SplitterConfig, ingest_report, split_document
from esglens.errors import ParseFailureError
from esglens.extract import (
    Strategy,
    assemble_prompt,
    load_registry,
    parse_response,
    parse_value,
    template_for,
)

registry = load_registry()
question = registry.get("GRI_302_1")
print(f"question pack ships {len(registry)} questions; using {question.question_id}")

report = ingest_report(
    [(1, "In 2023 the total energy consumption within the organization was "
         "810 GWh, including electricity, natural gas, and renewables.")],
    company_id="demo-co", fiscal_year=2023)
chunks = split_document(report, SplitterConfig())

# The four strategies order the same ingredients differently.
for strategy in Strategy:
    prompt = assemble_prompt(template_for(strategy), question, chunks)
    head = prompt.splitlines()[0][:68]
    print(f"\n--- {strategy.value}: {len(prompt)} chars ---\n  {head}...")

# Strict parsing accepts well-formed responses in the strategy's schema.
well_formed = """{
  "Summary": [
    {"point": "Total energy consumption was 810 GWh.", "source": "1"}
  ]
}"""
result = parse_response(well_formed, Strategy.S3)
print(f"\nstrict parse: {len(result.claims)} claim(s), lenient={result.lenient}")

# Lenient mode recovers near-JSON that real models emit: bare keys, bare
# values, trailing commas. Recovery is recorded, never silent.
near_json = """total energy: {
value: 810 GWh,
source: 1
},"""
result = parse_response(near_json, Strategy.S2)
print(f"lenient parse: {len(result.claims)} claim(s), lenient={result.lenient}")
print(f"  point: {result.claims[0].point!r} (source {result.claims[0].source_page})")

try:
    parse_response("nothing extractable here", Strategy.S3)
except ParseFailureError as exc:
    print(f"unrecoverable input raises {exc.code} carrying the raw text")

# Numeric values: first number plus trailing unit words; percent wins.
for text in ("55,200 metric tons CO2e", "a 30% reduction by 2025", "No data."):
    print(f"  parse_value({text!r}) -> {parse_value(text)}")
