"""Synthetic corpus generator for hermetic end-to-end runs.

Each company gets a latent "green intensity" in (0, 1). Its report is built
from per-topic sentence slots whose positive/negative flavor split is the
intensity quantized over the slots (deterministic, so the text carries the
signal with almost no sampling noise), and its raw measure values are the
intensity plus seeded measurement jitter. Reference scores synthesized from
those measures are therefore a noisy monotone function of the same signal
the report text encodes: the pipeline can recover the shared signal to a
high correlation, while the jitter leaves a realistic irreducible loss
floor that training settles onto within a few epochs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .score import (
    CATEGORIES,
    CompanyMeasures,
    MeasureDefinition,
    MeasureKind,
    Polarity,
    ScoreRecord,
    synthesize_reference_scores,
)

# One slot per topic; sentences are phrased so the shipped question pack
# retrieves them (energy, emissions, water, waste, recycling, biodiversity,
# certifications, policies, innovation).
TOPIC_SENTENCES: List[Tuple[str, str]] = [
    ("Total energy consumption declined as the renewable generation fleet "
     "expanded and efficiency retrofits matured.",
     "Total energy consumption climbed steeply because diesel backup units "
     "ran for long stretches during grid instability."),
    ("Scope 1 and Scope 2 greenhouse gas emissions dropped thanks to "
     "aggressive electrification of the vehicle pool.",
     "Scope 1 and Scope 2 greenhouse gas emissions grew alongside the "
     "commissioning of new gas-fired boilers."),
    ("Scope 3 emissions across the supply chain shrank after suppliers "
     "adopted cleaner logistics corridors.",
     "Scope 3 emissions across the supply chain swelled as air freight "
     "volumes returned to peak levels."),
    ("Carbon intensity per unit of revenue improved markedly, beating the "
     "internal reduction trajectory.",
     "Carbon intensity per unit of revenue deteriorated, missing the "
     "internal reduction trajectory."),
    ("Carbon reduction targets stayed on track with interim milestones "
     "achieved ahead of schedule.",
     "Carbon reduction targets slipped as interim milestones were deferred "
     "to later years."),
    ("Air pollutant controls captured nitrogen oxides and sulfur oxides "
     "well below permitted ceilings.",
     "Air pollutant exceedances for nitrogen oxides and sulfur oxides "
     "triggered corrective notices."),
    ("The renewable share of total energy consumption rose on new wind and "
     "solar power purchase agreements.",
     "The renewable share of total energy consumption stagnated while "
     "legacy coal contracts persisted."),
    ("Water consumption fell and the recycling rate of process water "
     "reached record highs.",
     "Water consumption surged and the recycling rate of process water "
     "regressed at older plants."),
    ("Raw material efficiency improved with closed-loop recycling "
     "initiatives in every fabrication line.",
     "Raw material efficiency lagged and recycling initiatives stalled at "
     "the pilot stage."),
    ("Waste diverted from landfill increased under the zero-waste program "
     "and stricter sorting.",
     "Waste sent to landfill increased after the zero-waste program lost "
     "funding."),
    ("Green product lines expanded, with eco-certified offerings leading "
     "category growth.",
     "Green product lines contracted as eco-certified offerings were "
     "discontinued."),
    ("Investment in environmental innovation and clean R&D projects grew "
     "across storage and materials.",
     "Investment in environmental innovation was cut, pausing clean R&D "
     "projects mid-stream."),
    ("Circular economy initiatives scaled, with take-back and "
     "remanufacturing programs thriving.",
     "Circular economy initiatives were shelved, leaving take-back "
     "programs dormant."),
    ("Biodiversity policies protected habitats near operating sites, with "
     "restoration plots expanding.",
     "Biodiversity commitments weakened and habitat restoration plots were "
     "abandoned."),
    ("Conservation projects for wetlands and mangroves advanced with "
     "community partners.",
     "Conservation projects for wetlands and mangroves were cancelled amid "
     "budget cuts."),
    ("Supply chain land use impact assessments covered nearly all sourcing "
     "regions.",
     "Supply chain land use impact assessments lapsed for most sourcing "
     "regions."),
    ("Environmental management certifications including ISO 14001 were "
     "renewed across all sites, and disclosure transparency deepened.",
     "Environmental management certifications including ISO 14001 lapsed "
     "at several sites, and disclosure transparency narrowed."),
]

SENTENCES_PER_PAGE = 3


@dataclass(frozen=True)
class SyntheticCompany:
    company_id: str
    fiscal_year: int
    green_intensity: float
    index_membership: Tuple[str, ...]
    pages: Tuple[Tuple[int, str], ...]
    measures: Dict[str, float]


@dataclass(frozen=True)
class SyntheticCorpus:
    companies: Tuple[SyntheticCompany, ...]
    measures: Tuple[MeasureDefinition, ...]
    weights: Dict[str, float]
    reference_scores: Tuple[ScoreRecord, ...]

    def reference_by_company(self) -> Dict[str, float]:
        return {r.company_id: r.score for r in self.reference_scores}


def _company_pages(intensity: float, fiscal_year: int) -> Tuple[Tuple[int, str], ...]:
    n = len(TOPIC_SENTENCES)
    positive_count = int(round(intensity * n))
    sentences = [
        positive if i < positive_count else negative
        for i, (positive, negative) in enumerate(TOPIC_SENTENCES)
    ]
    pages = [(1, f"This report covers environmental performance for fiscal "
                 f"year {fiscal_year}. It summarizes programs, metrics and "
                 "governance for the period.")]
    for start in range(0, n, SENTENCES_PER_PAGE):
        body = " ".join(sentences[start:start + SENTENCES_PER_PAGE])
        pages.append((len(pages) + 1, body))
    return tuple(pages)


def default_measures() -> List[MeasureDefinition]:
    return [
        MeasureDefinition(measure_id=f"{category}_score", kind=MeasureKind.NUMERIC,
                          polarity=Polarity.HIGHER_BETTER, category=category)
        for category in CATEGORIES
    ]


def default_weights() -> Dict[str, float]:
    return {category: 1.0 for category in CATEGORIES}


def generate_corpus(n_companies: int, fiscal_year: int = 2022,
                    seed: int = 0, jitter: float = 0.15) -> SyntheticCorpus:
    """Build companies, reports, measures and synthesized reference scores."""
    rng = np.random.default_rng(seed)
    measures = default_measures()
    weights = default_weights()
    memberships = ("QQQ", "SP500", "Russell1000")

    companies = []
    measure_rows = []
    for i in range(n_companies):
        intensity = float(rng.uniform(0.02, 0.98))
        member = tuple(sorted(rng.choice(
            memberships, size=int(rng.integers(1, len(memberships) + 1)),
            replace=False).tolist()))
        values = {
            m.measure_id: intensity + float(rng.normal(0.0, jitter))
            for m in measures
        }
        company = SyntheticCompany(
            company_id=f"synth-{i:04d}",
            fiscal_year=fiscal_year,
            green_intensity=intensity,
            index_membership=member,
            pages=_company_pages(intensity, fiscal_year),
            measures=values,
        )
        companies.append(company)
        measure_rows.append(CompanyMeasures(company_id=company.company_id,
                                            fiscal_year=fiscal_year,
                                            values=values))

    reference = synthesize_reference_scores(measure_rows, measures, weights)
    return SyntheticCorpus(
        companies=tuple(companies),
        measures=tuple(measures),
        weights=weights,
        reference_scores=tuple(reference),
    )
