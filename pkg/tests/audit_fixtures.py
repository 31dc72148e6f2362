"""Shared fixture data for the extraction and traceability suites.

RESULT_* are model-output fixtures in the four response shapes the parser
must handle; RESULT_2_* are deliberately malformed (bare keys, bare values,
trailing commas) and must fail strict parsing. The audit fixture encodes a
ten-claim energy-consumption run against a 113-page report whose cited pages
carry the supporting paragraphs, with two claims that reproduce the
demonstration examples and are supported nowhere in the report.
"""

from esglens.corpus import ingest_report
from esglens.extract import S3_EXAMPLE_POINTS

RESULT_1 = """{
    "GRI_302_1": {
        "Total_Energy_Consumption": "810 GWh",
        "Source": "93"
    }
}"""

RESULT_2_1 = """total energy consumption: {
value: 280 GWh annually, 810 GWh accumulative,
source: 93
},
energy efficiency target failure: {
description: The energy efficiency of 5nm volume production failed to achieve the annual target. The Company plans to expand energy-saving actions and invest resources to improve energy efficiency.,
source: 105
},
energy saving measures: {
measures: [
  Smart lighting in non-cleanroom areas,
  Replace bulbs with LED lighting,
  AI powered chilled water energy saving system,
  Replace cold water with PCW for cooling air compressors throughout first- and second-stage compression,
  Modify wet film plate for makeup air handling unit (MAU),
  Energy-efficient fan blades for PCW towers,
  Replace tool components with energy-saving components,
  Hot DI water circulation system
],
source: 107
},
"""

RESULT_2_2 = """energy conservation_results: {
annual total energy reduction: 280 GWh,
accumulative total energy reduction: 810 GWh,
annual total water reduction: 13.5 million metric tons,
accumulative total water reduction: 42.58 million metric tons,
waste production reduction among major waste-producing suppliers: 39
ISO 14064-1 verification for 84
requirement for suppliers to introduce energy-saving evaluation when building new plants: Required,
source: 93
}
"""

RESULT_3_1 = """{
    "Summary": [
        {
            "point": "The annual total energy reduction reached 280 GWh, and the accumulative total reached 810 GWh.",
            "source": "93"
        },
        {
            "point": "The company implemented 822 energy-conservation programs, resulting in a total reduction of 800 GWh in electricity consumption.",
            "source": "20"
        },
        {
            "point": "The company reported a 5% increase in renewable energy use, reaching 20% of total energy consumption.",
            "source": "4"
        },
        {
            "point": "The total energy consumption for electricity alone was 500 GW.",
            "source": "5"
        },
        {
            "point": "The company planned and carried out 822 energy-saving measures across eight major categories, saving an additional 830 GWh.",
            "source": "100"
        }
    ]
}"""

RESULT_3_2 = """{
    "Summary": [
        {
            "point": "The company missed the annual target for the energy efficiency of 5nm volume production.",
            "source": "105"
        },
        {
            "point": "The company aims to increase the use of renewable energy to 60% by 2030.",
            "source": "20"
        },
        {
            "point": "The company requires suppliers to introduce energy-saving evaluation when building new plants.",
            "source": "93"
        },
        {
            "point": "The company reduced supplier energy consumption by a cumulative total of 810 GWh, surpassing the target of 550 GWh.",
            "source": "78"
        },
        {
            "point": "The company reduced supplier water consumption by a cumulative total of 42.58 million metric tons, surpassing the target of 30 million metric tons.",
            "source": "78"
        }
    ]
}"""

PROMPT4_MISSING = """{
    "ContentExtraction": [
        {
            "point": "No data available.",
            "tone": "Neutral",
            "value": "Null",
            "source": 0
        }
    ]
}"""

# The three demonstration points shipped inside the S3 prompt template.
FEW_SHOT_EXAMPLES = list(S3_EXAMPLE_POINTS)

# Ten-item audit: (point, cited page, expected to verify without examples).
AUDIT_ITEMS = [
    ("The annual total energy reduction reached 280 GWh, and the cumulative "
     "total reached 810 GWh.", 93, True),
    ("The company implemented 822 energy-conservation programs, resulting in "
     "a total reduction of 800 GWh in electricity consumption.", 20, True),
    ("The company reported a 5% increase in renewable energy use, reaching "
     "20% of total energy consumption.", 4, False),
    ("The total energy consumption for electricity alone was 500 GW.", 5, False),
    ("The company planned and carried out 822 energy-saving measures across "
     "eight major categories, saving an additional 830 GWh.", 100, True),
    ("The company missed the annual target for the energy efficiency of 5nm "
     "volume production.", 105, True),
    ("The company targets increased use of renewable energy to 60% by 2030.", 20, True),
    ("The company requires suppliers to introduce energy-saving evaluation "
     "when building new plants.", 93, True),
    ("The company reduced supplier energy consumption by a cumulative total "
     "of 810 GWh, surpassing the target of 550 GWh.", 78, True),
    ("The company reduced supplier water consumption by a cumulative total "
     "of 42.58 million metric tons, surpassing the target of 30 million "
     "metric tons.", 78, True),
]

LEAKED_ITEM_INDICES = (2, 3)  # zero-based positions of the leaked claims

# Supporting paragraphs placed on the cited pages of the fixture report.
SOURCE_PARAGRAPHS = {
    93: (
        "Suppliers obtained an average grade of B-, exceeding the initial "
        "target of C. TSMC requires and assists suppliers to improve their "
        "sustainability performance. In 2023, the annual total energy "
        "reduction reached 280 GWh, and the cumulative total reached 810 GWh. "
        "The annual total water reduction reached 13.5 million metric tons, "
        "and the cumulative total reached 42.58 million metric tons. "
        "Additionally, the waste production among major waste-producing "
        "suppliers continued to decline. TSMC requires suppliers to introduce "
        "energy-saving evaluation when building new plants."
    ),
    20: (
        "Made significant strides in climate change mitigation, achieving "
        "net-zero emissions in scope 1 and scope 2 at TSMC overseas "
        "operations; expanded its onshore wind farm power supply, increasing "
        "the proportion of renewable energy usage from 40% to 60% by 2030, "
        "and proposed 822 energy-conservation programs, resulting in a total "
        "reduction of 800 GWh in electricity consumption."
    ),
    100: (
        "Planned and carried out 822 energy-saving measures across eight "
        "major categories, saving an additional 830 GWh. See Increase Energy "
        "Efficiency for more information."
    ),
    105: (
        "In 2023, TSMC consumed a total of 24,700 GWh in energy, which "
        "resulted in a 0.1% shortfall from its 5nm production efficiency "
        "target. This was mainly due to global supply chain disruptions. The "
        "failure to achieve this target prompted TSMC to invest further in "
        "energy-saving measures and implement additional guidelines."
    ),
    78: (
        "Reduced supplier energy consumption by a cumulative total of "
        "810 GWh. Target: 550 GWh. Reduced supplier water consumption by a "
        "cumulative total of 42.58 million metric tons. Target: 30 million "
        "metric tons."
    ),
}

FIXTURE_PAGE_COUNT = 113

_FILLER_THEMES = [
    "board oversight and committee charters",
    "community outreach and local partnership stories",
    "workforce wellbeing and training narratives",
    "stakeholder dialogue summaries from regional forums",
    "ethics hotline governance and escalation paths",
    "philanthropic grants and volunteering highlights",
]


def _filler(page_number: int) -> str:
    theme = _FILLER_THEMES[page_number % len(_FILLER_THEMES)]
    return (
        f"This part of the report reflects on {theme}. The discussion here "
        "is qualitative and intentionally carries no figures, serving as "
        "connective narrative between the disclosure chapters."
    )


def build_traceability_report():
    """113-page fixture report carrying the source paragraphs on cited pages."""
    pages = []
    for number in range(1, FIXTURE_PAGE_COUNT + 1):
        text = SOURCE_PARAGRAPHS.get(number, _filler(number))
        pages.append((number, text))
    return ingest_report(pages, company_id="tsmc-style-fixture",
                         fiscal_year=2023, source_uri="fixture://traceability",
                         report_id="fixture-trace-2023")


def audit_claims():
    from esglens.extract import ExtractedClaim, Section

    return [
        ExtractedClaim(question_id="GRI_302_1", point=point, source_page=page,
                       section=Section.SUMMARY)
        for point, page, _ in AUDIT_ITEMS
    ]
