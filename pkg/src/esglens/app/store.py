"""Structured-file persistence under a single data directory.

Everything is line-delimited or canonical JSON so reruns are byte-stable:
stage outputs never embed wall-clock time (timestamps live only in the run
ledger). Mutations are serialized by a store-level lock; reads work on
immutable snapshots of files.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..corpus import Chunk, ReportDocument, read_chunks_jsonl, write_chunks_jsonl
from ..errors import DataError, ReportNotFoundError
from ..extract import ExtractedClaim, Quantity, Section, Strategy, Tone
from ..score import ScoreKind, ScoreRecord

from decimal import Decimal


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False,
                      separators=(",", ":"))


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CompanyRecord:
    company_id: str
    name: str
    index_membership: Tuple[str, ...] = ()
    reports: Tuple[str, ...] = ()


@dataclass(frozen=True)
class RunRecord:
    run_id: str
    stage: str
    inputs_digest: str
    outputs_path: str
    config_digest: str
    timestamp: float
    config_snapshot: Optional[dict] = None  # replaying with it reproduces the run


def claim_to_record(claim: ExtractedClaim, **extra) -> dict:
    record = {
        "question_id": claim.question_id,
        "point": claim.point,
        "source_page": claim.source_page,
        "section": claim.section.value,
        "tone": claim.tone.value if claim.tone else None,
        "value_magnitude": (format(claim.value.magnitude, "f")
                            if claim.value else None),
        "value_unit": claim.value.unit if claim.value else None,
    }
    record.update(extra)
    return record


def claim_from_record(record: dict) -> ExtractedClaim:
    value = None
    if record.get("value_magnitude") is not None:
        value = Quantity(magnitude=Decimal(record["value_magnitude"]),
                         unit=record.get("value_unit") or "")
    tone = Tone(record["tone"]) if record.get("tone") else None
    return ExtractedClaim(
        question_id=record["question_id"],
        point=record["point"],
        source_page=record["source_page"],
        section=Section(record["section"]),
        tone=tone,
        value=value,
    )


class FileStore:
    SUBDIRS = ("reports", "chunks", "indexes", "claims", "audits", "models",
               "metrics", "scores", "cache")

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        self.lock = threading.Lock()
        self.root.mkdir(parents=True, exist_ok=True)
        for sub in self.SUBDIRS:
            (self.root / sub).mkdir(exist_ok=True)

    # --- companies -----------------------------------------------------------

    @property
    def companies_path(self) -> Path:
        return self.root / "companies.jsonl"

    def list_companies(self) -> List[CompanyRecord]:
        if not self.companies_path.exists():
            return []
        records = {}
        for line in self.companies_path.read_text("utf-8").splitlines():
            if not line.strip():
                continue
            data = json.loads(line)
            records[data["company_id"]] = CompanyRecord(
                company_id=data["company_id"],
                name=data.get("name", data["company_id"]),
                index_membership=tuple(data.get("index_membership", ())),
                reports=tuple(data.get("reports", ())),
            )
        return sorted(records.values(), key=lambda r: r.company_id)

    def upsert_company(self, record: CompanyRecord) -> None:
        with self.lock:
            existing = {r.company_id: r for r in self.list_companies()}
            current = existing.get(record.company_id)
            if current is not None:
                reports = tuple(dict.fromkeys((*current.reports, *record.reports)))
                membership = record.index_membership or current.index_membership
                record = CompanyRecord(company_id=record.company_id,
                                       name=record.name or current.name,
                                       index_membership=membership,
                                       reports=reports)
            existing[record.company_id] = record
            lines = [canonical_json(asdict(r))
                     for r in sorted(existing.values(), key=lambda r: r.company_id)]
            self.companies_path.write_text("\n".join(lines) + "\n", "utf-8")

    # --- reports and chunks ----------------------------------------------------

    def report_path(self, report_id: str) -> Path:
        return self.root / "reports" / f"{report_id}.json"

    def save_report(self, doc: ReportDocument) -> Path:
        path = self.report_path(doc.report_id)
        payload = {
            "report_id": doc.report_id,
            "company_id": doc.company_id,
            "fiscal_year": doc.fiscal_year,
            "source_uri": doc.source_uri,
            "checksum": doc.checksum,
            "pages": [{"page_number": n, "text": t} for n, t in doc.pages],
        }
        with self.lock:
            path.write_text(canonical_json(payload) + "\n", "utf-8")
        return path

    def load_report(self, report_id: str) -> ReportDocument:
        path = self.report_path(report_id)
        if not path.exists():
            raise ReportNotFoundError(f"report {report_id!r} not found",
                                      report_id=report_id)
        data = json.loads(path.read_text("utf-8"))
        return ReportDocument(
            report_id=data["report_id"],
            company_id=data["company_id"],
            fiscal_year=data["fiscal_year"],
            pages=tuple((p["page_number"], p["text"]) for p in data["pages"]),
            source_uri=data.get("source_uri", ""),
            checksum=data["checksum"],
        )

    def has_report(self, report_id: str) -> bool:
        return self.report_path(report_id).exists()

    def list_report_ids(self) -> List[str]:
        return sorted(p.stem for p in (self.root / "reports").glob("*.json"))

    def chunks_path(self, report_id: str) -> Path:
        return self.root / "chunks" / f"{report_id}.jsonl"

    def save_chunks(self, report_id: str, chunks: Sequence[Chunk]) -> Path:
        path = self.chunks_path(report_id)
        with self.lock:
            write_chunks_jsonl(chunks, path)
        return path

    def load_chunks(self, report_id: str) -> List[Chunk]:
        path = self.chunks_path(report_id)
        if not path.exists():
            raise DataError(f"no chunks for report {report_id!r}")
        return read_chunks_jsonl(path)

    def index_path(self, report_id: str) -> Path:
        return self.root / "indexes" / f"{report_id}.bin"

    # --- claims / audits / metrics ----------------------------------------------

    def claims_path(self, run_id: str) -> Path:
        return self.root / "claims" / f"{run_id}.jsonl"

    def save_claims(self, run_id: str, records: Iterable[dict]) -> Path:
        path = self.claims_path(run_id)
        body = "".join(canonical_json(r) + "\n" for r in records)
        with self.lock:
            path.write_text(body, "utf-8")
        return path

    def load_claim_records(self, run_id: str) -> List[dict]:
        path = self.claims_path(run_id)
        if not path.exists():
            raise DataError(f"no claims for run {run_id!r}")
        return [json.loads(line)
                for line in path.read_text("utf-8").splitlines() if line.strip()]

    def audit_path(self, run_id: str) -> Path:
        return self.root / "audits" / f"{run_id}.json"

    def save_audit(self, run_id: str, payload: dict) -> Path:
        path = self.audit_path(run_id)
        with self.lock:
            path.write_text(canonical_json(payload) + "\n", "utf-8")
        return path

    def load_audit(self, run_id: str) -> dict:
        path = self.audit_path(run_id)
        if not path.exists():
            raise DataError(f"no audit for run {run_id!r}")
        return json.loads(path.read_text("utf-8"))

    def metrics_path(self, run_id: str) -> Path:
        return self.root / "metrics" / f"{run_id}.json"

    def save_metrics(self, run_id: str, payload: dict) -> Path:
        path = self.metrics_path(run_id)
        with self.lock:
            path.write_text(canonical_json(payload) + "\n", "utf-8")
        return path

    def load_metrics(self, run_id: str) -> dict:
        path = self.metrics_path(run_id)
        if not path.exists():
            raise DataError(f"no metrics for run {run_id!r}")
        return json.loads(path.read_text("utf-8"))

    def model_path(self, run_id: str) -> Path:
        return self.root / "models" / f"{run_id}.bin"

    # --- scores -----------------------------------------------------------------

    def scores_path(self, company_id: str) -> Path:
        return self.root / "scores" / f"{company_id}.jsonl"

    def save_scores(self, company_id: str, records: Sequence[ScoreRecord]) -> Path:
        path = self.scores_path(company_id)
        existing = self.load_scores(company_id)
        merged: Dict[Tuple[int, str, Optional[str]], ScoreRecord] = {
            (r.fiscal_year, r.kind.value, r.model_run_id): r for r in existing}
        for record in records:
            merged[(record.fiscal_year, record.kind.value, record.model_run_id)] = record
        ordered = sorted(merged.values(),
                         key=lambda r: (r.fiscal_year, r.kind.value,
                                        r.model_run_id or ""))
        body = "".join(canonical_json({
            "company_id": r.company_id,
            "fiscal_year": r.fiscal_year,
            "score": r.score,
            "kind": r.kind.value,
            "model_run_id": r.model_run_id,
        }) + "\n" for r in ordered)
        with self.lock:
            path.write_text(body, "utf-8")
        return path

    def load_scores(self, company_id: str) -> List[ScoreRecord]:
        path = self.scores_path(company_id)
        if not path.exists():
            return []
        out = []
        for line in path.read_text("utf-8").splitlines():
            if not line.strip():
                continue
            data = json.loads(line)
            out.append(ScoreRecord(
                company_id=data["company_id"],
                fiscal_year=data["fiscal_year"],
                score=data["score"],
                kind=ScoreKind(data["kind"]),
                model_run_id=data.get("model_run_id"),
            ))
        return out

    # --- run ledger ----------------------------------------------------------------

    @property
    def runs_path(self) -> Path:
        return self.root / "runs.jsonl"

    def append_run(self, record: RunRecord) -> None:
        with self.lock:
            with open(self.runs_path, "a", encoding="utf-8") as fh:
                fh.write(canonical_json(asdict(record)) + "\n")

    def list_runs(self) -> List[RunRecord]:
        if not self.runs_path.exists():
            return []
        out = []
        for line in self.runs_path.read_text("utf-8").splitlines():
            if not line.strip():
                continue
            out.append(RunRecord(**json.loads(line)))
        return out

    def find_run(self, stage: str, inputs_digest: str,
                 config_digest: str) -> Optional[RunRecord]:
        for record in reversed(self.list_runs()):
            if (record.stage == stage and record.inputs_digest == inputs_digest
                    and record.config_digest == config_digest):
                return record
        return None


def make_run_id(stage: str, inputs_digest: str, config_digest: str) -> str:
    return hashlib.sha256(
        f"{stage}:{inputs_digest}:{config_digest}".encode("utf-8")).hexdigest()[:16]


def record_run(store: FileStore, stage: str, inputs_digest: str,
               config_digest: str, outputs_path: Path,
               config_snapshot: Optional[dict] = None) -> RunRecord:
    record = RunRecord(
        run_id=make_run_id(stage, inputs_digest, config_digest),
        stage=stage,
        inputs_digest=inputs_digest,
        outputs_path=str(outputs_path),
        config_digest=config_digest,
        timestamp=time.time(),
        config_snapshot=config_snapshot,
    )
    store.append_run(record)
    return record
