"""Report ingestion and page-anchored chunking.

A report is an ordered list of page texts. For splitting, pages are joined
with a single "\\n" so every chunk is a literal substring of one well-defined
document string; chunk spans carry character offsets into that string and are
mapped back to page ranges through a page-offset table.

The splitter is recursive-character style: it tries separators coarsest
first, merges adjacent splits greedily up to ``chunk_size`` and carries up to
``chunk_overlap`` trailing characters into the next chunk. Because every
chunk is a contiguous span and consecutive spans overlap without gaps,
stripping each chunk's leading overlap and concatenating reconstructs the
source text byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import re
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

from .errors import DataError, DuplicatePageError, EmptyDocumentError

PAGE_JOIN = "\n"

DEFAULT_SEPARATORS = ("\n\n", "\n", " ", "")


class ChunkKind(str, Enum):
    TEXT = "Text"
    TABLE = "Table"
    CHART_CAPTION = "ChartCaption"


@dataclass(frozen=True)
class ReportDocument:
    """A company report as ordered page texts plus identity metadata."""

    report_id: str
    company_id: str
    fiscal_year: int
    pages: Tuple[Tuple[int, str], ...]
    source_uri: str
    checksum: str

    def page_text(self, page_number: int) -> str:
        if not 1 <= page_number <= len(self.pages):
            raise DataError(f"page {page_number} out of range", page=page_number)
        return self.pages[page_number - 1][1]

    @property
    def page_count(self) -> int:
        return len(self.pages)


@dataclass(frozen=True)
class Chunk:
    """A page-anchored span of report text; the unit of embedding and citation."""

    chunk_id: int
    report_id: str
    page_start: int
    page_end: int
    char_start: int
    char_end: int
    text: str
    kind: ChunkKind
    oversized: bool = False


@dataclass(frozen=True)
class SplitterConfig:
    chunk_size: int = 1000
    chunk_overlap: int = 200
    separators: Tuple[str, ...] = DEFAULT_SEPARATORS

    def __post_init__(self):
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")
        if not 0 <= self.chunk_overlap < self.chunk_size:
            raise ValueError("chunk_overlap must be in [0, chunk_size)")
        if not self.separators:
            raise ValueError("separators must be non-empty")
        if self.separators[-1] != "":
            raise ValueError("separators must end with the empty-string fallback")
        if "" in self.separators[:-1]:
            raise ValueError("empty-string separator only allowed in last position")


def compute_checksum(page_texts: Sequence[str]) -> str:
    """Hex digest of the page texts joined by the page separator."""
    return hashlib.sha256(PAGE_JOIN.join(page_texts).encode("utf-8")).hexdigest()


def document_text(doc: ReportDocument) -> str:
    return PAGE_JOIN.join(text for _, text in doc.pages)


def page_offsets(doc: ReportDocument) -> List[int]:
    """Start offset of each page within document_text(doc)."""
    offsets = []
    pos = 0
    for _, text in doc.pages:
        offsets.append(pos)
        pos += len(text) + len(PAGE_JOIN)
    return offsets


def ingest_report(
    pages: Sequence[Tuple[int, str]],
    company_id: str,
    fiscal_year: int,
    source_uri: str = "",
    report_id: str | None = None,
) -> ReportDocument:
    """Normalize raw pages into a ReportDocument.

    Pages are renumbered 1..N preserving input order; the checksum is
    computed over the normalized page texts.
    """
    if not pages:
        raise EmptyDocumentError("report has no pages")
    seen = set()
    for number, _ in pages:
        if number in seen:
            raise DuplicatePageError(f"page number {number} appears twice", page=number)
        seen.add(number)
    texts = [text for _, text in pages]
    if all(not text.strip() for text in texts):
        raise EmptyDocumentError("all pages are blank")
    renumbered = tuple((i + 1, text) for i, text in enumerate(texts))
    rid = report_id or f"{company_id}-{fiscal_year}"
    return ReportDocument(
        report_id=rid,
        company_id=company_id,
        fiscal_year=fiscal_year,
        pages=renumbered,
        source_uri=source_uri,
        checksum=compute_checksum(texts),
    )


# --- recursive splitting ----------------------------------------------------

def _atomize(text: str, lo: int, hi: int, separators: Sequence[str], si: int,
             chunk_size: int) -> List[Tuple[int, int]]:
    """Split [lo, hi) into spans of at most chunk_size chars where possible.

    Separators are tried in order starting at index ``si``; each separator
    stays attached to the piece it terminates so pieces concatenate back to
    the original span. A span with no remaining separator occurrence is
    returned whole even if oversized.
    """
    if hi - lo <= chunk_size:
        return [(lo, hi)]
    chosen = None
    for i in range(si, len(separators)):
        sep = separators[i]
        if sep == "" or text.find(sep, lo, hi) != -1:
            chosen = i
            break
    if chosen is None:
        return [(lo, hi)]  # unsplittable run, flagged oversized downstream
    sep = separators[chosen]
    if sep == "":
        return [(p, min(p + chunk_size, hi)) for p in range(lo, hi, chunk_size)]
    atoms: List[Tuple[int, int]] = []
    pos = lo
    while pos < hi:
        found = text.find(sep, pos, hi)
        end = hi if found == -1 else found + len(sep)
        if end - pos > chunk_size:
            atoms.extend(_atomize(text, pos, end, separators, chosen + 1, chunk_size))
        else:
            atoms.append((pos, end))
        pos = end
    return atoms


def _merge(atoms: Sequence[Tuple[int, int]], chunk_size: int,
           chunk_overlap: int) -> List[Tuple[int, int]]:
    """Greedily merge contiguous atoms into chunk spans, carrying overlap.

    The carried tail never exceeds chunk_overlap, never consumes the whole
    previous chunk (start positions stay strictly increasing) and leaves room
    for the incoming atom within chunk_size.
    """
    spans: List[Tuple[int, int]] = []
    cur_start = cur_end = None
    for a, b in atoms:
        if cur_start is None:
            cur_start, cur_end = a, b
            continue
        if b - cur_start <= chunk_size:
            cur_end = b
            continue
        spans.append((cur_start, cur_end))
        take = min(chunk_overlap, cur_end - cur_start - 1, max(chunk_size - (b - a), 0))
        cur_start = cur_end - take
        cur_end = b
    if cur_start is not None:
        spans.append((cur_start, cur_end))
    return spans


def split_text_spans(text: str, cfg_or_separators, chunk_size: int | None = None,
                     chunk_overlap: int | None = None) -> List[Tuple[int, int]]:
    """Chunk spans for a raw text. Accepts a SplitterConfig or raw parameters.

    The raw-parameter form skips config validation so separator lists without
    the empty-string fallback can be exercised (producing flagged oversized
    chunks for unsplittable runs).
    """
    if isinstance(cfg_or_separators, SplitterConfig):
        cfg = cfg_or_separators
        separators, chunk_size, chunk_overlap = cfg.separators, cfg.chunk_size, cfg.chunk_overlap
    else:
        separators = tuple(cfg_or_separators)
    if not text:
        return []
    atoms = _atomize(text, 0, len(text), separators, 0, chunk_size)
    return _merge(atoms, chunk_size, chunk_overlap)


def split_document(doc: ReportDocument, cfg: SplitterConfig) -> List[Chunk]:
    """Split a report into page-anchored chunks, ordered by char_start."""
    text = document_text(doc)
    spans = split_text_spans(text, cfg)
    offsets = page_offsets(doc)
    chunks = []
    for i, (start, end) in enumerate(spans):
        piece = text[start:end]
        page_start = bisect_right(offsets, start)
        page_end = bisect_right(offsets, max(start, end - 1))
        # a chunk ending on the synthetic page join spans into the next page,
        # so its page range concatenation reproduces the join character
        if page_end < len(offsets) and end == offsets[page_end]:
            page_end += 1
        chunks.append(Chunk(
            chunk_id=i,
            report_id=doc.report_id,
            page_start=page_start,
            page_end=page_end,
            char_start=start,
            char_end=end,
            text=piece,
            kind=classify_chunk_kind(piece),
            oversized=len(piece) > cfg.chunk_size,
        ))
    return chunks


def reconstruct_text(chunks: Sequence[Chunk]) -> str:
    """Concatenate chunks with their leading overlaps deduplicated."""
    parts = []
    prev_end = None
    for chunk in chunks:
        if prev_end is None:
            parts.append(chunk.text)
        else:
            parts.append(chunk.text[prev_end - chunk.char_start:])
        prev_end = chunk.char_end
    return "".join(parts)


# --- chunk-kind tagging ------------------------------------------------------

_CAPTION_RE = re.compile(r"^\s*(Figure|Chart)\s*\d+", re.IGNORECASE)
_WS_RUN_RE = re.compile(r"[ \t]{2,}")
_NUMERIC_CELL_RE = re.compile(r"(?<![\w.])\d[\d,]*(?:\.\d+)?%?(?![\w])")


def classify_chunk_kind(chunk_text: str) -> ChunkKind:
    """Rule-based content-kind label.

    Table: at least 3 lines that each carry >= 2 multi-space/tab runs or
    >= 2 numeric cells. ChartCaption: first non-empty line starts with
    "Figure"/"Chart" plus a number. Everything else is Text. Kind is
    metadata for filtering and display; misclassification is non-fatal.
    """
    lines = [line for line in chunk_text.splitlines() if line.strip()]
    tabular = 0
    for line in lines:
        if len(_WS_RUN_RE.findall(line)) >= 2 or len(_NUMERIC_CELL_RE.findall(line)) >= 2:
            tabular += 1
    if tabular >= 3:
        return ChunkKind.TABLE
    if lines and _CAPTION_RE.match(lines[0]):
        return ChunkKind.CHART_CAPTION
    return ChunkKind.TEXT


# --- file I/O ----------------------------------------------------------------

_PAGE_FILE_RE = re.compile(r"^page_(\d+)\.txt$")


def load_report_from_text_file(path: str | Path, company_id: str, fiscal_year: int,
                               report_id: str | None = None) -> ReportDocument:
    """Input format A: one UTF-8 plain text file, treated as a single page."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    return ingest_report([(1, text)], company_id, fiscal_year,
                         source_uri=str(p), report_id=report_id)


def load_report_from_page_dir(path: str | Path, company_id: str, fiscal_year: int,
                              report_id: str | None = None) -> ReportDocument:
    """Input format B: a directory of page_0001.txt, page_0002.txt, ..."""
    p = Path(path)
    numbered = []
    for child in p.iterdir():
        match = _PAGE_FILE_RE.match(child.name)
        if match:
            numbered.append((int(match.group(1)), child))
    if not numbered:
        raise EmptyDocumentError(f"no page_NNNN.txt files in {p}")
    numbered.sort()
    pages = [(number, child.read_text(encoding="utf-8")) for number, child in numbered]
    return ingest_report(pages, company_id, fiscal_year,
                         source_uri=str(p), report_id=report_id)


def write_chunks_jsonl(chunks: Iterable[Chunk], path: str | Path) -> None:
    """Persist chunks as line-delimited records with the documented fields."""
    with open(path, "w", encoding="utf-8") as fh:
        for chunk in chunks:
            record = {
                "chunk_id": chunk.chunk_id,
                "report_id": chunk.report_id,
                "page_start": chunk.page_start,
                "page_end": chunk.page_end,
                "char_start": chunk.char_start,
                "char_end": chunk.char_end,
                "kind": chunk.kind.value,
                "text": chunk.text,
            }
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def read_chunks_jsonl(path: str | Path) -> List[Chunk]:
    chunks = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            chunks.append(Chunk(
                chunk_id=record["chunk_id"],
                report_id=record["report_id"],
                page_start=record["page_start"],
                page_end=record["page_end"],
                char_start=record["char_start"],
                char_end=record["char_end"],
                text=record["text"],
                kind=ChunkKind(record["kind"]),
            ))
    return chunks
