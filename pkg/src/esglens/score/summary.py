"""Render extracted claims into one summary text and embed it."""

from __future__ import annotations

from typing import Optional, Sequence

from ..embed import EmbeddingCache, EmbeddingVector, ProviderSpec, embed_texts
from ..errors import EmptyClaimsError
from ..extract import ExtractedClaim


def render_summary(claims: Sequence[ExtractedClaim]) -> str:
    """Deterministic one-text rendering, order-invariant over the claim list.

    Claims are sorted by (question_id, section, point) and rendered one per
    line as "question_id: point (tone, value)".
    """
    if not claims:
        raise EmptyClaimsError("no claims to render")
    ordered = sorted(claims, key=lambda c: (c.question_id, c.section.value, c.point))
    lines = []
    for claim in ordered:
        tone = claim.tone.value if claim.tone is not None else "None"
        value = claim.value.render() if claim.value is not None else "Null"
        lines.append(f"{claim.question_id}: {claim.point} ({tone}, {value})")
    return "\n".join(lines)


def build_summary_embedding(
    claims: Sequence[ExtractedClaim],
    provider: ProviderSpec,
    cache: Optional[EmbeddingCache] = None,
) -> EmbeddingVector:
    """Embed the rendered claim summary as a single text."""
    return embed_texts([render_summary(claims)], provider, cache=cache)[0]
