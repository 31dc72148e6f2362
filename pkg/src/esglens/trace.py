"""Claim verification against source pages and few-shot leakage detection.

Verification is a mechanized cross-reference: a claim is checked against the
pages around its citation by (1) requiring every numeric token of the claim
to appear on a candidate page and (2) scoring the best sliding window of
page tokens against the claim's content-token multiset. Leakage is checked
first - a claim that reproduces a prompt demonstration example must never be
Verified, however well it happens to match the report.

Thresholds were tuned once against a ten-item audit fixture and frozen; the
checks are intentionally textual and make no judgement of topical relevance.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from .corpus import ReportDocument
from .errors import MissingPageError
from .extract import ExtractedClaim, _STOPWORDS

_WORD_RE = re.compile(r"[a-z0-9]+")
_NUMERAL_RE = re.compile(r"\d[\d,]*(?:\.\d+)?")


class VerifyStatus(str, Enum):
    VERIFIED = "Verified"
    PAGE_MISMATCH = "PageMismatch"
    NOT_FOUND = "NotFound"
    LEAKAGE_SUSPECTED = "LeakageSuspected"


@dataclass(frozen=True)
class TraceConfig:
    verify_threshold: float = 0.5
    leakage_threshold: float = 0.8
    ngram_n: int = 5
    page_window: int = 1

    def __post_init__(self):
        for name in ("verify_threshold", "leakage_threshold"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"{name} must be in (0, 1]")
        if self.ngram_n < 2:
            raise ValueError("ngram_n must be >= 2")
        if self.page_window < 0:
            raise ValueError("page_window must be >= 0")


@dataclass(frozen=True)
class VerificationResult:
    claim: ExtractedClaim
    status: VerifyStatus
    matched_page: Optional[int]
    match_score: float
    leakage_score: float
    matched_span: Optional[Tuple[int, int]] = None


@dataclass(frozen=True)
class AuditEntry:
    claim: ExtractedClaim
    result: Optional[VerificationResult]
    error: Optional[str] = None


@dataclass(frozen=True)
class AuditReport:
    entries: Tuple[AuditEntry, ...]
    counts: Dict[str, int]
    verified_fraction: float

    @property
    def results(self) -> List[VerificationResult]:
        return [e.result for e in self.entries if e.result is not None]


# --- tokenization --------------------------------------------------------------

def _word_tokens(text: str) -> List[str]:
    return _WORD_RE.findall(text.lower())


def _content_tokens(text: str) -> List[str]:
    tokens = _word_tokens(text)
    content = [t for t in tokens if t not in _STOPWORDS]
    return content or tokens  # all-stopword text falls back to raw tokens


def _numerals(text: str) -> set:
    out = set()
    for match in _NUMERAL_RE.finditer(text):
        raw = match.group(0).replace(",", "")
        try:
            out.add(str(Decimal(raw).normalize()))
        except InvalidOperation:
            continue
    return out


def _spanned_content_tokens(text: str) -> List[Tuple[str, int, int]]:
    spans = [(m.group(0), m.start(), m.end())
             for m in _WORD_RE.finditer(text.lower())]
    content = [(t, s, e) for t, s, e in spans if t not in _STOPWORDS]
    return content or spans


# --- leakage --------------------------------------------------------------------

def _ngrams(tokens: Sequence[str], n: int) -> set:
    if len(tokens) < n:
        return {tuple(tokens)} if tokens else set()
    return {tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)}


def _jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    return len(a & b) / len(a | b)


def _strip_numbers(tokens: Sequence[str]) -> List[str]:
    return ["#" if t.isdigit() else t for t in tokens]


def leakage_score(point: str, examples: Sequence[str], n: int) -> float:
    """Max n-gram Jaccard similarity against the demonstration examples.

    A second pass compares number-stripped token streams so that edits
    confined to numerals (the observed leakage pattern) are still caught.
    """
    claim_tokens = _word_tokens(point)
    best = 0.0
    for example in examples:
        example_tokens = _word_tokens(example)
        raw = _jaccard(_ngrams(claim_tokens, n), _ngrams(example_tokens, n))
        stripped = _jaccard(_ngrams(_strip_numbers(claim_tokens), n),
                            _ngrams(_strip_numbers(example_tokens), n))
        best = max(best, raw, stripped)
    return best


# --- fuzzy page matching ----------------------------------------------------------

def _best_window(claim_tokens: List[str],
                 page_tokens: List[Tuple[str, int, int]]) -> Tuple[float, Optional[Tuple[int, int]]]:
    """Best token-multiset overlap of any sliding window on the page.

    The window is twice the claim's content-token length (at least 20 tokens)
    so a paraphrase interleaved with page context still scores; score is the
    matched fraction of the claim's tokens.
    """
    if not claim_tokens or not page_tokens:
        return 0.0, None
    need = Counter(claim_tokens)
    total = len(claim_tokens)
    window = min(max(2 * total, 20), len(page_tokens))
    have: Counter = Counter()
    matched = 0
    best_score, best_range = -1.0, None
    for i, (token, _, _) in enumerate(page_tokens):
        if need[token] > 0:
            have[token] += 1
            if have[token] <= need[token]:
                matched += 1
        if i >= window:
            old = page_tokens[i - window][0]
            if need[old] > 0:
                if have[old] <= need[old]:
                    matched -= 1
                have[old] -= 1
        if i >= window - 1:
            score = matched / total
            if score > best_score:
                best_score = score
                best_range = (i - window + 1, i)
    if best_range is None:  # page shorter than one window
        score = matched / total
        return score, (0, len(page_tokens) - 1)
    return best_score, best_range


def _match_span(claim_tokens: List[str], page_tokens: List[Tuple[str, int, int]],
                token_range: Tuple[int, int]) -> Optional[Tuple[int, int]]:
    """Char span from the first to the last matched token within the window."""
    lo, hi = token_range
    wanted = set(claim_tokens)
    hits = [i for i in range(lo, hi + 1) if page_tokens[i][0] in wanted]
    if not hits:
        return None
    return page_tokens[hits[0]][1], page_tokens[hits[-1]][2]


def _page_match(claim_point: str, page_text: str) -> Tuple[float, Optional[Tuple[int, int]], bool]:
    """(overlap score, matched span, numerals-contained) for one page."""
    claim_tokens = _content_tokens(claim_point)
    page_tokens = _spanned_content_tokens(page_text)
    score, token_range = _best_window(claim_tokens, page_tokens)
    span = _match_span(claim_tokens, page_tokens, token_range) if token_range else None
    contained = _numerals(claim_point) <= _numerals(page_text)
    return score, span, contained


def verify_claim(
    claim: ExtractedClaim,
    report: ReportDocument,
    few_shot_examples: Sequence[str] = (),
    cfg: TraceConfig = TraceConfig(),
) -> VerificationResult:
    """Verify one claim against its cited page neighborhood.

    Pipeline: leakage check first (a leaked claim can accidentally match real
    text), then the numeric + fuzzy match on the cited page +- page_window,
    then a whole-report scan to distinguish PageMismatch from NotFound.
    """
    leak = leakage_score(claim.point, few_shot_examples, cfg.ngram_n)
    if few_shot_examples and leak >= cfg.leakage_threshold:
        return VerificationResult(claim=claim, status=VerifyStatus.LEAKAGE_SUSPECTED,
                                  matched_page=None, match_score=0.0,
                                  leakage_score=leak)

    cited = claim.source_page
    page_count = report.page_count
    if cited > page_count:
        raise MissingPageError(
            f"claim cites page {cited} of a {page_count}-page report",
            page=cited)

    if cited >= 1:
        window_pages = [p for p in range(cited - cfg.page_window,
                                         cited + cfg.page_window + 1)
                        if 1 <= p <= page_count]
    else:
        window_pages = []

    best_in_window: Optional[Tuple[float, int, Optional[Tuple[int, int]]]] = None
    window_best_score = 0.0
    for page in sorted(window_pages, key=lambda p: (abs(p - cited), p)):
        score, span, contained = _page_match(claim.point, report.page_text(page))
        window_best_score = max(window_best_score, score)
        if contained and score >= cfg.verify_threshold:
            if best_in_window is None or score > best_in_window[0]:
                best_in_window = (score, page, span)
    if best_in_window is not None:
        score, page, span = best_in_window
        return VerificationResult(claim=claim, status=VerifyStatus.VERIFIED,
                                  matched_page=page, match_score=score,
                                  leakage_score=leak, matched_span=span)

    best_outside: Optional[Tuple[float, int, Optional[Tuple[int, int]]]] = None
    for page in range(1, page_count + 1):
        if page in window_pages:
            continue
        score, span, contained = _page_match(claim.point, report.page_text(page))
        if contained and score >= cfg.verify_threshold:
            if best_outside is None or score > best_outside[0]:
                best_outside = (score, page, span)
    if best_outside is not None:
        score, page, span = best_outside
        return VerificationResult(claim=claim, status=VerifyStatus.PAGE_MISMATCH,
                                  matched_page=page, match_score=score,
                                  leakage_score=leak, matched_span=span)

    return VerificationResult(claim=claim, status=VerifyStatus.NOT_FOUND,
                              matched_page=None, match_score=window_best_score,
                              leakage_score=leak)


def audit_run(
    claims: Sequence[ExtractedClaim],
    report: ReportDocument,
    few_shot_examples: Sequence[str] = (),
    cfg: TraceConfig = TraceConfig(),
) -> AuditReport:
    """Verify every claim; page-range errors become entries, not exceptions."""
    entries: List[AuditEntry] = []
    counts: Counter = Counter()
    for claim in claims:
        try:
            result = verify_claim(claim, report, few_shot_examples, cfg)
        except MissingPageError as exc:
            entries.append(AuditEntry(claim=claim, result=None, error=exc.code))
            counts[exc.code] += 1
        else:
            entries.append(AuditEntry(claim=claim, result=result))
            counts[result.status.value] += 1
    for status in VerifyStatus:
        counts.setdefault(status.value, 0)
    verified = counts[VerifyStatus.VERIFIED.value]
    fraction = verified / len(claims) if claims else 0.0
    return AuditReport(entries=tuple(entries), counts=dict(counts),
                       verified_fraction=fraction)
