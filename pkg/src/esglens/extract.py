"""Question registry, prompt assembly, LLM adapters and response parsing.

Four prompt strategies are supported, differing in slot order and guidance:

* S1 - instruction, question, context, final instruction
* S2 - instruction, context, question
* S3 - instruction with output examples, context, question
* S4 - instruction with a three-section schema and missing-data rules,
  context, question

Responses are parsed strictly first (well-formed JSON matching the strategy
schema). Lenient mode is a deliberate second pass for near-JSON model output:
code fences stripped, bare keys quoted, trailing commas dropped, sources
coerced to integers, with a final source-block scanner as a last resort.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, replace
from decimal import Decimal
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Dict, List, Optional, Protocol, Sequence, Tuple

from .corpus import Chunk, ReportDocument
from .embed import EmbeddingCache, ProviderSpec, embed_texts
from .errors import (
    BudgetExceededError,
    EmptyIndexError,
    EmptyRetrievalError,
    ParseFailureError,
    ProviderUnavailableError,
    SchemaViolationError,
    UnknownQuestionError,
)
from .index import RetrievalConfig, VectorIndex

MAX_CLAIMS_PER_RESPONSE = 10
DEFAULT_CONTEXT_BUDGET = 12_000


class Strategy(str, Enum):
    S1 = "s1"
    S2 = "s2"
    S3 = "s3"
    S4 = "s4"


class Section(str, Enum):
    SUMMARY = "Summary"
    CONTENT_EXTRACTION = "ContentExtraction"
    TONE_ANALYSIS = "ToneAnalysis"
    NUMERICAL_DATA = "NumericalData"


S4_SECTIONS = (Section.CONTENT_EXTRACTION, Section.TONE_ANALYSIS, Section.NUMERICAL_DATA)


class Tone(str, Enum):
    NEUTRAL = "Neutral"
    POSITIVE = "Positive"
    NEGATIVE = "Negative"


@dataclass(frozen=True)
class Quantity:
    magnitude: Decimal
    unit: str

    def render(self) -> str:
        text = format(self.magnitude, "f")
        if text.endswith(".0"):
            text = text[:-2]
        if self.unit == "%":
            return f"{text}%"
        return f"{text} {self.unit}".strip()


@dataclass(frozen=True)
class ExtractedClaim:
    """One extracted point with its cited source page."""

    question_id: str
    point: str
    source_page: int
    section: Section = Section.SUMMARY
    tone: Optional[Tone] = None
    value: Optional[Quantity] = None

    def __post_init__(self):
        if not self.point:
            raise ValueError("claim point must be non-empty")
        if self.source_page < 0:
            raise ValueError("source_page must be >= 0 (0 means no source)")
        if self.section is Section.SUMMARY and self.tone is not None:
            raise ValueError("Summary claims carry no tone")
        if self.section is not Section.SUMMARY and self.tone is None:
            raise ValueError(f"{self.section.value} claims require a tone")


@dataclass(frozen=True)
class QuestionSpec:
    question_id: str
    category: str
    pillar: str
    text: str
    editorial: bool = False

    def __post_init__(self):
        if not self.text:
            raise ValueError("question text must be non-empty")


class QuestionRegistry:
    """Immutable lookup of the shipped question pack plus ad-hoc additions."""

    def __init__(self, questions: Sequence[QuestionSpec]):
        self._by_id: Dict[str, QuestionSpec] = {}
        for question in questions:
            if question.question_id in self._by_id:
                raise ValueError(f"duplicate question_id {question.question_id}")
            self._by_id[question.question_id] = question

    def __contains__(self, question_id: str) -> bool:
        return question_id in self._by_id

    def __len__(self) -> int:
        return len(self._by_id)

    def get(self, question_id: str) -> QuestionSpec:
        try:
            return self._by_id[question_id]
        except KeyError:
            raise UnknownQuestionError(f"unknown question {question_id!r}") from None

    def all(self) -> List[QuestionSpec]:
        return list(self._by_id.values())

    def category_questions(self) -> List[QuestionSpec]:
        return [q for q in self._by_id.values() if q.category != "gri"]


def load_registry(path: str | Path | None = None) -> QuestionRegistry:
    """Load the registry from a JSONL file (default: the shipped pack)."""
    if path is None:
        text = resources.files("esglens").joinpath("data/questions.jsonl").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    questions = []
    for line in text.splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        questions.append(QuestionSpec(
            question_id=record["question_id"],
            category=record["category"],
            pillar=record["pillar"],
            text=record["text"],
            editorial=bool(record.get("editorial", False)),
        ))
    return QuestionRegistry(questions)


# --- prompt templates --------------------------------------------------------

BASE_INSTRUCTION = (
    "You are tasked with the role of an ESG expert, assigned to analyze a "
    "company's ESG report. Based on the following extracted parts from the "
    "sustainability report, answer the given QUESTIONS. If you don't know the "
    "answer, just say that you don't know. Don't try to make up an answer.\n\n"
    "Format your answers in JSON format and list up to 10 related points. "
    "Each point should include its corresponding SOURCE."
)

S3_EXAMPLE_BLOCK = (
    "Your FINAL_ANSWER should be structured as follows:\n\n"
    "{\n"
    '  "Summary": [\n'
    "    {\n"
    '      "point": "Energy consumption in 2023 was 810 GW, including electricity, natural gas, and renewable sources.",\n'
    '      "source": "12"\n'
    "    },\n"
    "    {\n"
    '      "point": "The company reported a 5% increase in renewable energy use, reaching 20% of total energy consumption.",\n'
    '      "source": "14"\n'
    "    },\n"
    "    {\n"
    '      "point": "The total energy consumption for electricity alone was 500 GW.",\n'
    '      "source": "16"\n'
    "    }\n"
    "  ]\n"
    "}"
)

S3_EXAMPLE_POINTS = (
    "Energy consumption in 2023 was 810 GW, including electricity, natural gas, and renewable sources.",
    "The company reported a 5% increase in renewable energy use, reaching 20% of total energy consumption.",
    "The total energy consumption for electricity alone was 500 GW.",
)

S4_INSTRUCTION = (
    "You are an ESG (Environmental, Social, and Governance) expert assigned "
    "to analyze a company's sustainability report. Your task is to analyze "
    "the extracted parts of the report and answer the given QUESTIONS. If the "
    "information required to answer a question is not present in the provided "
    'context, respond with: "No data available." Do not fabricate answers.\n\n'
    "Your response must follow these requirements:\n"
    "1. **Format your answer in JSON** with three structured sections: "
    "`ContentExtraction`, `ToneAnalysis`, and `NumericalData`.\n"
    "2. Each section must list **exactly one point**, including its "
    "corresponding `source`, `tone`, and (if applicable) `value`.\n"
    "3. **Tone** must be classified as one of: `Neutral`, `Positive`, or `Negative`.\n"
    "4. **Source** must be an integer and represent the associated reference "
    "number for the information.\n\n"
    "Your FINAL_ANSWER should be structured as follows:\n"
    "{\n"
    '    "ContentExtraction": [\n'
    "        {\n"
    '            "point": "The company aims to reduce carbon emissions by 30% by 2025.",\n'
    '            "tone": "Positive",\n'
    '            "value": "Null",\n'
    '            "source": 8\n'
    "        }\n"
    "    ]\n"
    "}\n\n"
    "### **Handling Missing Data**\n"
    "If relevant data is not available for a specific section, use the following structure:\n"
    "{\n"
    '    "ContentExtraction": [\n'
    "        {\n"
    '            "point": "No data available.",\n'
    '            "tone": "Neutral",\n'
    '            "value": "Null",\n'
    '            "source": 0\n'
    "        }\n"
    "    ]\n"
    "}"
)

CONTEXT_DELIMITER = "========="
PAGE_MARKER_RE = re.compile(r"^\[page (\d+)\]$", re.MULTILINE)


@dataclass(frozen=True)
class PromptTemplate:
    strategy: Strategy
    instruction: str
    few_shot_examples: Optional[str] = None
    final_instruction: Optional[str] = None


def template_for(strategy: Strategy) -> PromptTemplate:
    if strategy is Strategy.S1:
        return PromptTemplate(
            strategy=strategy,
            instruction=BASE_INSTRUCTION,
            final_instruction="# Your FINAL_ANSWER in JSON (ensure there's no format error).",
        )
    if strategy is Strategy.S2:
        return PromptTemplate(strategy=strategy, instruction=BASE_INSTRUCTION)
    if strategy is Strategy.S3:
        return PromptTemplate(
            strategy=strategy,
            instruction=BASE_INSTRUCTION,
            few_shot_examples=S3_EXAMPLE_BLOCK,
        )
    return PromptTemplate(strategy=Strategy.S4, instruction=S4_INSTRUCTION)


@dataclass(frozen=True)
class LlmRequestConfig:
    endpoint_url: str = ""
    model_name: str = "fixture"
    temperature: float = 0.0
    max_attempts: int = 3
    timeout: float = 60.0

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


def render_question(question: QuestionSpec) -> str:
    return f"{question.question_id}: {question.text}"


def _render_context(chunks: Sequence[Chunk]) -> str:
    blocks = [f"[page {chunk.page_start}]\n{chunk.text}" for chunk in chunks]
    body = "\n\n".join(blocks)
    return f"{CONTEXT_DELIMITER}\n{body}\n{CONTEXT_DELIMITER}"


def _render_prompt(template: PromptTemplate, question: QuestionSpec,
                   chunks: Sequence[Chunk]) -> str:
    context = _render_context(chunks)
    q = render_question(question)
    if template.strategy is Strategy.S1:
        return "\n\n".join([
            template.instruction,
            f"QUESTIONS:\n{q}",
            context,
            template.final_instruction or "",
        ]).rstrip()
    if template.strategy is Strategy.S2:
        return "\n\n".join([
            template.instruction,
            context,
            f"Now, answer the following question using the provided context:\n\n{q}",
        ])
    if template.strategy is Strategy.S3:
        return "\n\n".join([
            template.instruction,
            template.few_shot_examples or "",
            context,
            f"Now, answer the following question using the provided context:\n\n{q}",
        ])
    return "\n\n".join([
        template.instruction,
        context,
        "**Instructions**\nNow, using the provided context and question, "
        "answer the question while adhering to the JSON format above. Ensure "
        "each section is labeled and includes all required fields "
        f"(`point`, `tone`, `value`, `source`).\n\n{q}",
    ])


def assemble_prompt(template: PromptTemplate, question: QuestionSpec,
                    context_chunks: Sequence[Chunk],
                    budget: int = DEFAULT_CONTEXT_BUDGET) -> str:
    """Deterministic prompt assembly under a character budget.

    Chunks are assumed ranked best-first; when the assembled prompt exceeds
    the budget, lowest-ranked chunks are dropped from the tail first.
    """
    if not context_chunks:
        raise EmptyRetrievalError("no context chunks to assemble")
    for n in range(len(context_chunks), 0, -1):
        prompt = _render_prompt(template, question, context_chunks[:n])
        if len(prompt) <= budget:
            return prompt
    raise BudgetExceededError(
        f"even a single chunk exceeds the {budget}-character budget")


# --- value parsing -----------------------------------------------------------

_NUMBER_RE = re.compile(r"\d{1,3}(?:,\d{3})+(?:\.\d+)?|\d+(?:\.\d+)?")
_UNIT_WORD_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*")
_UNIT_STOPWORDS = {
    "a", "an", "and", "annually", "are", "as", "at", "by", "for", "from",
    "in", "is", "it", "on", "or", "per", "the", "to", "was", "were", "with",
}
_MAX_UNIT_WORDS = 3


def parse_value(text: str) -> Optional[Quantity]:
    """Extract the first number and its trailing unit words, if any.

    A percent sign immediately after the number wins as the unit; otherwise
    up to three following words are taken, stopping at punctuation, digits or
    function words. Returns None when the text has no number.
    """
    match = _NUMBER_RE.search(text)
    if match is None:
        return None
    magnitude = Decimal(match.group(0).replace(",", ""))
    rest = text[match.end():]
    if rest.startswith("%"):
        return Quantity(magnitude=magnitude, unit="%")
    words = []
    pos = 0
    while len(words) < _MAX_UNIT_WORDS:
        while pos < len(rest) and rest[pos] == " ":
            pos += 1
        word_match = _UNIT_WORD_RE.match(rest, pos)
        if word_match is None:
            break
        word = word_match.group(0)
        if word.lower() in _UNIT_STOPWORDS:
            break
        words.append(word)
        pos = word_match.end()
    return Quantity(magnitude=magnitude, unit=" ".join(words))


# --- response parsing ---------------------------------------------------------

@dataclass(frozen=True)
class ParseResult:
    claims: Tuple[ExtractedClaim, ...]
    lenient: bool


def _coerce_source(value, strict: bool) -> int:
    if isinstance(value, bool):
        raise SchemaViolationError("source must be an integer")
    if isinstance(value, int):
        if value < 0:
            raise SchemaViolationError("source must be >= 0")
        return value
    if isinstance(value, str):
        if value.strip().isdigit():
            return int(value.strip())
        if not strict:
            digits = re.search(r"\d+", value)
            if digits:
                return int(digits.group(0))
            return 0
    raise SchemaViolationError(f"unparseable source {value!r}")


def _require_keys(entry: dict, required: set, label: str) -> None:
    if not isinstance(entry, dict):
        raise SchemaViolationError(f"{label} entry is not an object")
    missing = required - set(entry)
    if missing:
        raise SchemaViolationError(f"{label} entry missing {sorted(missing)}")


def _claims_from_summary(data: dict, strict: bool) -> List[ExtractedClaim]:
    if set(data.keys()) != {"Summary"}:
        raise SchemaViolationError("expected a single top-level Summary array")
    entries = data["Summary"]
    if not isinstance(entries, list) or not entries:
        raise SchemaViolationError("Summary must be a non-empty array")
    claims = []
    for entry in entries:
        _require_keys(entry, {"point", "source"}, "Summary")
        if strict and set(entry) - {"point", "source"}:
            raise SchemaViolationError("unexpected keys in Summary entry")
        point = entry["point"]
        if not isinstance(point, str) or not point.strip():
            raise SchemaViolationError("point must be a non-empty string")
        claims.append(ExtractedClaim(
            question_id="",
            point=point,
            source_page=_coerce_source(entry["source"], strict),
            section=Section.SUMMARY,
        ))
    return claims


def _claims_from_sections(data: dict, strict: bool) -> List[ExtractedClaim]:
    section_names = {s.value for s in S4_SECTIONS}
    if not set(data.keys()) <= section_names:
        raise SchemaViolationError(
            f"unexpected top-level keys {sorted(set(data) - section_names)}")
    if not data:
        raise SchemaViolationError("no sections present")
    claims = []
    for section in S4_SECTIONS:
        entries = data.get(section.value)
        if entries is None:
            continue
        if not isinstance(entries, list):
            raise SchemaViolationError(f"{section.value} must be an array")
        for entry in entries:
            _require_keys(entry, {"point", "tone", "source"}, section.value)
            if strict and set(entry) - {"point", "tone", "value", "source"}:
                raise SchemaViolationError(f"unexpected keys in {section.value} entry")
            point = entry["point"]
            if not isinstance(point, str) or not point.strip():
                raise SchemaViolationError("point must be a non-empty string")
            tone_raw = entry["tone"]
            try:
                tone = Tone(tone_raw)
            except ValueError:
                raise SchemaViolationError(f"tone {tone_raw!r} not in "
                                           "{Neutral, Positive, Negative}") from None
            raw_value = entry.get("value")
            if raw_value is None or (isinstance(raw_value, str)
                                     and raw_value.strip().lower() == "null"):
                value = None
            elif isinstance(raw_value, (int, float)):
                value = Quantity(magnitude=Decimal(str(raw_value)), unit="")
            elif isinstance(raw_value, str):
                value = parse_value(raw_value)
            else:
                raise SchemaViolationError(f"unparseable value {raw_value!r}")
            claims.append(ExtractedClaim(
                question_id="",
                point=point,
                source_page=_coerce_source(entry["source"], strict),
                section=section,
                tone=tone,
                value=value,
            ))
    return claims


def _claims_from_keyed_object(data: dict, strict: bool) -> List[ExtractedClaim]:
    """S1/S2 shape: an object keyed by question or topic names.

    Each value object carries a Source field plus arbitrary content fields,
    which are rendered into the claim point.
    """
    if not data:
        raise SchemaViolationError("empty object")
    claims = []
    for key, entry in data.items():
        if not isinstance(entry, dict):
            raise SchemaViolationError(f"value for {key!r} is not an object")
        source_key = next((k for k in entry if k.lower() == "source"), None)
        if source_key is None:
            raise SchemaViolationError(f"entry {key!r} has no Source field")
        content = {k: v for k, v in entry.items() if k != source_key}
        if not content:
            raise SchemaViolationError(f"entry {key!r} has no content fields")
        rendered = "; ".join(
            f"{k}: {v if isinstance(v, str) else json.dumps(v, ensure_ascii=False)}"
            for k, v in content.items())
        claims.append(ExtractedClaim(
            question_id=key if re.fullmatch(r"[A-Za-z]\w*", key) else "",
            point=rendered,
            source_page=_coerce_source(entry[source_key], strict),
            section=Section.SUMMARY,
        ))
    return claims


_SCHEMA_PARSERS: Dict[Strategy, Callable[[dict, bool], List[ExtractedClaim]]] = {
    Strategy.S1: _claims_from_keyed_object,
    Strategy.S2: _claims_from_keyed_object,
    Strategy.S3: _claims_from_summary,
    Strategy.S4: _claims_from_sections,
}

_CODE_FENCE_RE = re.compile(r"```[a-zA-Z]*\n?|```")
_BARE_KEY_RE = re.compile(r'([{,]\s*)([A-Za-z_][^":{}\[\],\n]*?)(\s*:)')
_TRAILING_COMMA_RE = re.compile(r",(\s*[}\]])")
_SOURCE_FIELD_RE = re.compile(r'[\'"]?source[\'"]?\s*[:=]\s*[\'"]?(\d+)[\'"]?',
                              re.IGNORECASE)


def _repair_json(raw: str) -> Optional[dict]:
    text = _CODE_FENCE_RE.sub("", raw).strip()
    candidates = [text]
    first, last = text.find("{"), text.rfind("}")
    if first != -1 and last > first:
        candidates.append(text[first:last + 1])
    candidates.append("{" + text + "}")
    for candidate in candidates:
        repaired = _BARE_KEY_RE.sub(lambda m: f'{m.group(1)}"{m.group(2).strip()}"{m.group(3)}',
                                    candidate)
        repaired = _TRAILING_COMMA_RE.sub(r"\1", repaired)
        try:
            data = json.loads(repaired)
        except json.JSONDecodeError:
            continue
        if isinstance(data, dict):
            return data
    return None


def _scan_source_blocks(raw: str) -> List[ExtractedClaim]:
    """Last-resort recovery: split raw text at source fields, one claim each."""
    claims = []
    prev_end = 0
    for match in _SOURCE_FIELD_RE.finditer(raw):
        block = raw[prev_end:match.start()]
        prev_end = match.end()
        cleaned = re.sub(r"[{}\[\]\"`]", " ", block)
        cleaned = re.sub(r"\s+", " ", cleaned).strip(" ,:;")
        if not cleaned:
            cleaned = "(unlabelled extract)"
        claims.append(ExtractedClaim(
            question_id="",
            point=cleaned[:500],
            source_page=int(match.group(1)),
            section=Section.SUMMARY,
        ))
    return claims


def parse_response(raw: str, strategy: Strategy) -> ParseResult:
    """Parse model output into claims: strict first, lenient on malformed JSON.

    Well-formed JSON of the wrong shape raises SchemaViolationError (no
    lenient rescue, the model answered in a parseable but invalid schema).
    Unrecoverable input raises ParseFailureError carrying the raw text.
    """
    schema = _SCHEMA_PARSERS[strategy]
    try:
        data = json.loads(raw)
        well_formed = isinstance(data, dict)
    except json.JSONDecodeError:
        data, well_formed = None, False
    if well_formed:
        claims = schema(data, strict=True)[:MAX_CLAIMS_PER_RESPONSE]
        return ParseResult(claims=tuple(claims), lenient=False)

    repaired = _repair_json(raw)
    if repaired is not None:
        try:
            claims = schema(repaired, strict=False)[:MAX_CLAIMS_PER_RESPONSE]
            return ParseResult(claims=tuple(claims), lenient=True)
        except SchemaViolationError:
            pass
    scanned = _scan_source_blocks(raw)
    if scanned:
        return ParseResult(claims=tuple(scanned[:MAX_CLAIMS_PER_RESPONSE]),
                           lenient=True)
    raise ParseFailureError("response is neither valid JSON nor recoverable",
                            raw=raw)


def serialize_claims(claims: Sequence[ExtractedClaim]) -> str:
    """Canonical JSON for a homogeneous claim list (strict-mode schemas)."""
    sections = {claim.section for claim in claims}
    if sections == {Section.SUMMARY}:
        data = {"Summary": [
            {"point": c.point, "source": str(c.source_page)} for c in claims]}
    elif Section.SUMMARY not in sections:
        data: Dict[str, list] = {}
        for section in S4_SECTIONS:
            entries = [c for c in claims if c.section is section]
            if entries:
                data[section.value] = [{
                    "point": c.point,
                    "tone": c.tone.value,
                    "value": c.value.render() if c.value is not None else "Null",
                    "source": c.source_page,
                } for c in entries]
    else:
        raise ValueError("cannot serialize a mix of Summary and section claims")
    return json.dumps(data, indent=2, ensure_ascii=False)


# --- LLM adapters --------------------------------------------------------------

class LlmAdapter(Protocol):
    def complete(self, prompt: str, cfg: LlmRequestConfig) -> str: ...


class FixtureResponder:
    """Canned responses keyed by the SHA-256 digest of the prompt.

    A default response may be supplied for prompts with no registered
    fixture; otherwise an unknown prompt raises ProviderUnavailableError.
    """

    def __init__(self, default: Optional[str] = None):
        self._by_digest: Dict[str, str] = {}
        self.default = default
        self.calls: List[str] = []

    @staticmethod
    def digest(prompt: str) -> str:
        return hashlib.sha256(prompt.encode("utf-8")).hexdigest()

    def register(self, prompt: str, response: str) -> None:
        self._by_digest[self.digest(prompt)] = response

    def register_digest(self, digest: str, response: str) -> None:
        self._by_digest[digest] = response

    def complete(self, prompt: str, cfg: LlmRequestConfig) -> str:
        self.calls.append(prompt)
        response = self._by_digest.get(self.digest(prompt), self.default)
        if response is None:
            raise ProviderUnavailableError("no fixture registered for prompt")
        return response


_STOPWORDS = frozenset("""
a about above after again all also am an and any are as at be because been
before being below between both but by can did do does doing down during each
few for from further had has have having he her here hers him his how i if in
into is it its itself just me more most my no nor not now of off on once only
or other our ours out over own same she should so some such than that the
their theirs them then there these they this those through to too under until
up very was we were what when where which while who whom why will with you
your yours
""".split())

_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")
_WORD_RE = re.compile(r"[a-z0-9]+")


def _content_words(text: str) -> set:
    return {w for w in _WORD_RE.findall(text.lower()) if w not in _STOPWORDS}


class RuleBasedResponder:
    """Extractive stand-in for an LLM, usable fully offline.

    From the assembled prompt it recovers the page-marked context and the
    question, then selects up to 10 context sentences sharing the most
    content words with the question and emits them in the schema the prompt
    asks for. Citations use the page marker of the chunk each sentence came
    from (a chunk spanning a page boundary cites its first page; the
    verifier's page window absorbs that).
    """

    max_points = MAX_CLAIMS_PER_RESPONSE

    def complete(self, prompt: str, cfg: LlmRequestConfig) -> str:
        blocks = self._context_blocks(prompt)
        question = self._question_text(prompt)
        qwords = _content_words(question)
        ranked = self._ranked_sentences(blocks, qwords)
        if "ContentExtraction" in prompt:
            return self._render_sections(ranked)
        return self._render_summary(ranked)

    def _context_blocks(self, prompt: str) -> List[Tuple[int, str]]:
        start = prompt.find(CONTEXT_DELIMITER)
        end = prompt.rfind(CONTEXT_DELIMITER)
        if start == -1 or end <= start:
            return []
        section = prompt[start + len(CONTEXT_DELIMITER):end]
        blocks = []
        matches = list(PAGE_MARKER_RE.finditer(section))
        for i, match in enumerate(matches):
            page = int(match.group(1))
            body_end = matches[i + 1].start() if i + 1 < len(matches) else len(section)
            blocks.append((page, section[match.end():body_end].strip()))
        return blocks

    def _question_text(self, prompt: str) -> str:
        matches = re.findall(r"^([A-Za-z]\w*_\w+):\s+(.+)$", prompt, re.MULTILINE)
        if matches:
            return matches[-1][1]
        return ""

    def _ranked_sentences(self, blocks: List[Tuple[int, str]],
                          qwords: set) -> List[Tuple[int, str]]:
        scored = []
        position = 0
        for page, body in blocks:
            for sentence in _SENTENCE_SPLIT_RE.split(body):
                sentence = " ".join(sentence.split())
                if len(sentence) < 15:
                    continue
                score = len(_content_words(sentence) & qwords)
                if score >= 1:
                    scored.append((-score, position, page, sentence))
                position += 1
        scored.sort()
        picked = []
        seen = set()
        for _, _, page, sentence in scored:
            if sentence in seen:
                continue
            seen.add(sentence)
            picked.append((page, sentence))
            if len(picked) >= self.max_points:
                break
        return picked

    def _render_summary(self, ranked: List[Tuple[int, str]]) -> str:
        if not ranked:
            entries = [{"point": "No data available.", "source": "0"}]
        else:
            entries = [{"point": s, "source": str(p)} for p, s in ranked]
        return json.dumps({"Summary": entries}, indent=2, ensure_ascii=False)

    def _render_sections(self, ranked: List[Tuple[int, str]]) -> str:
        if not ranked:
            entry = {"point": "No data available.", "tone": "Neutral",
                     "value": "Null", "source": 0}
            return json.dumps({"ContentExtraction": [entry]}, indent=2,
                              ensure_ascii=False)
        data = {}
        for section, (page, sentence) in zip(
                ("ContentExtraction", "ToneAnalysis", "NumericalData"), ranked):
            quantity = parse_value(sentence)
            data[section] = [{
                "point": sentence,
                "tone": "Neutral",
                "value": quantity.render() if quantity else "Null",
                "source": page,
            }]
        return json.dumps(data, indent=2, ensure_ascii=False)


# --- end-to-end extraction -----------------------------------------------------

@dataclass(frozen=True)
class ExtractionResult:
    claims: Tuple[ExtractedClaim, ...]
    prompt: str
    raw_response: str
    lenient: bool
    strategy: Strategy


def run_extraction(
    report: ReportDocument,
    question: QuestionSpec,
    strategy: Strategy,
    retrieval_cfg: RetrievalConfig,
    llm_cfg: LlmRequestConfig,
    *,
    index: VectorIndex,
    chunks_by_id: Dict[int, Chunk],
    provider: ProviderSpec,
    adapter: LlmAdapter,
    cache: Optional[EmbeddingCache] = None,
    budget: int = DEFAULT_CONTEXT_BUDGET,
) -> ExtractionResult:
    """Retrieve context for a question, call the model, parse the claims.

    Retrieval is restricted to the target report unless the config overrides
    the filter. Claims are capped at 10 per response and tagged with the
    question id.
    """
    if retrieval_cfg.report_filter is None:
        retrieval_cfg = replace(retrieval_cfg, report_filter=report.report_id)
    query = embed_texts([question.text], provider, cache=cache)[0]
    try:
        hits = index.search(query, retrieval_cfg)
    except EmptyIndexError as exc:
        raise EmptyRetrievalError(f"no chunks retrievable for {report.report_id}") from exc
    context = [chunks_by_id[chunk_id] for (_, chunk_id), _ in hits
               if chunk_id in chunks_by_id]
    if not context:
        raise EmptyRetrievalError(f"retrieved keys missing from chunk store")
    template = template_for(strategy)
    prompt = assemble_prompt(template, question, context, budget=budget)
    raw = adapter.complete(prompt, llm_cfg)
    parsed = parse_response(raw, strategy)
    claims = tuple(
        replace(claim, question_id=claim.question_id or question.question_id)
        for claim in parsed.claims[:MAX_CLAIMS_PER_RESPONSE])
    return ExtractionResult(claims=claims, prompt=prompt, raw_response=raw,
                            lenient=parsed.lenient, strategy=strategy)
