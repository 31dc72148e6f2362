"""Reference ESG score synthesis for hermetic corpora.

Follows the percentile-and-weighted-category scheme: boolean measures map to
1/0 (Yes -> 1, No or Null -> 0), lower-is-better measures are negated before
ranking, each measure is converted to a peer-group percentile crediting ties
half weight, category scores average their member-measure percentiles, and
the company score is 100 times the weighted category mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence

from ..errors import EmptyPeerGroupError, UnknownCategoryError
from .metrics import ScoreKind, ScoreRecord


class MeasureKind(str, Enum):
    BOOLEAN = "Boolean"
    NUMERIC = "Numeric"


class Polarity(str, Enum):
    HIGHER_BETTER = "HigherBetter"
    LOWER_BETTER = "LowerBetter"


# The ten weighted categories and their pillars.
CATEGORIES: Dict[str, str] = {
    "emissions": "Environment",
    "innovation": "Environment",
    "resource_use": "Environment",
    "human_rights": "Social",
    "workforce": "Social",
    "community": "Social",
    "product_responsibility": "Social",
    "management": "Governance",
    "shareholders": "Governance",
    "csr_strategy": "Governance",
}


@dataclass(frozen=True)
class MeasureDefinition:
    measure_id: str
    kind: MeasureKind
    polarity: Polarity
    category: str

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise UnknownCategoryError(f"unknown category {self.category!r}")

    @property
    def pillar(self) -> str:
        return CATEGORIES[self.category]


@dataclass(frozen=True)
class CompanyMeasures:
    company_id: str
    fiscal_year: int
    values: Mapping[str, object]


_BOOLEAN_MAP = {
    "yes": 1.0, "no": 0.0, "null": 0.0,
    True: 1.0, False: 0.0, None: 0.0,
}


def _numeric_value(measure: MeasureDefinition, raw: object) -> float:
    if measure.kind is MeasureKind.BOOLEAN:
        if isinstance(raw, str):
            key = raw.strip().lower()
            if key not in _BOOLEAN_MAP:
                raise ValueError(f"boolean measure got {raw!r}")
            value = _BOOLEAN_MAP[key]
        else:
            value = _BOOLEAN_MAP.get(raw)
            if value is None and raw is not None:
                raise ValueError(f"boolean measure got {raw!r}")
            value = 0.0 if value is None else value
    else:
        if raw is None or (isinstance(raw, str) and raw.strip().lower() == "null"):
            value = 0.0  # missing numeric data defaults to 0, like Null booleans
        else:
            value = float(raw)
    if measure.polarity is Polarity.LOWER_BETTER:
        value = -value
    return value


def _percentile(values: Sequence[float], own: float) -> float:
    worse = sum(1 for v in values if v < own)
    equal = sum(1 for v in values if v == own)
    return (worse + equal / 2.0) / len(values)


def synthesize_reference_scores(
    companies: Sequence[CompanyMeasures],
    measures: Sequence[MeasureDefinition],
    weights: Mapping[str, float],
) -> List[ScoreRecord]:
    """Percentile-rank every measure across the peer group and roll up.

    Weights must cover every category that has measures; they are normalized
    by their sum, so any positive weighting is accepted. All percentiles land
    strictly inside (0, 1) because a company always ties with itself.
    """
    if not companies:
        raise EmptyPeerGroupError("no companies in peer group")
    for category in weights:
        if category not in CATEGORIES:
            raise UnknownCategoryError(f"unknown weight category {category!r}")

    by_category: Dict[str, List[MeasureDefinition]] = {}
    for measure in measures:
        by_category.setdefault(measure.category, []).append(measure)
    for category in by_category:
        if category not in weights:
            raise UnknownCategoryError(
                f"category {category!r} has measures but no weight")

    adjusted: Dict[str, List[float]] = {}
    for measure in measures:
        adjusted[measure.measure_id] = [
            _numeric_value(measure, company.values.get(measure.measure_id))
            for company in companies
        ]

    records = []
    for i, company in enumerate(companies):
        numerator = 0.0
        denominator = 0.0
        for category, members in sorted(by_category.items()):
            total = 0.0
            for measure in members:
                column = adjusted[measure.measure_id]
                total += _percentile(column, column[i])
            category_score = total / len(members)
            weight = float(weights[category])
            numerator += weight * category_score
            denominator += weight
        score = 100.0 * numerator / denominator
        records.append(ScoreRecord(
            company_id=company.company_id,
            fiscal_year=company.fiscal_year,
            score=score,
            kind=ScoreKind.REFERENCE,
        ))
    return records
