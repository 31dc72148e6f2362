"""Stage orchestration: ingest, index, extract, trace, train, predict, ask.

Every stage derives a deterministic run id from (stage, inputs digest,
config digest); a stage whose run record and output file both exist is
skipped on rerun, and a forced rerun regenerates byte-identical output
because nothing time-dependent is written into stage outputs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..corpus import ReportDocument, ingest_report, split_document
from ..embed import EmbeddingCache, embed_texts
from ..errors import (
    DataError,
    EsgLensError,
    ReportNotFoundError,
    ReportNotIndexedError,
    UnknownQuestionError,
    ZeroVarianceError,
)
from ..extract import (
    ExtractedClaim,
    FixtureResponder,
    QuestionSpec,
    RuleBasedResponder,
    S3_EXAMPLE_POINTS,
    Strategy,
    load_registry,
    run_extraction,
)
from ..index import VectorIndex
from ..score import (
    ScoreKind,
    ScoreRecord,
    build_summary_embedding,
    load_model,
    save_model,
    train_gbt,
    train_mlp,
)
from ..score.metrics import metrics_or_error, pearson
from ..trace import audit_run
from .config import AppConfig
from .store import (
    CompanyRecord,
    FileStore,
    RunRecord,
    canonical_json,
    claim_from_record,
    claim_to_record,
    digest_text,
    make_run_id,
    record_run,
)


def _adapter_for(config: AppConfig):
    name = str(config.get("llm.adapter", "rule")).lower()
    if name == "rule":
        return RuleBasedResponder()
    if name.startswith("fixture:"):
        responder = FixtureResponder()
        fixture_path = Path(name.split(":", 1)[1])
        data = json.loads(fixture_path.read_text("utf-8"))
        for digest, response in data.items():
            responder.register_digest(digest, response)
        return responder
    raise DataError(f"unknown llm.adapter {name!r}")


def _cache_for(config: AppConfig) -> Optional[EmbeddingCache]:
    path = config.cache_path()
    if path is None:
        return None
    path.parent.mkdir(parents=True, exist_ok=True)
    return EmbeddingCache(path)


def _stage_done(store: FileStore, stage: str, inputs_digest: str,
                config_digest: str, output: Path) -> Optional[RunRecord]:
    record = store.find_run(stage, inputs_digest, config_digest)
    if record is not None and output.exists():
        return record
    return None


# --- ingest -----------------------------------------------------------------

def stage_ingest(store: FileStore, config: AppConfig, company_id: str,
                 fiscal_year: int, pages: Sequence[Tuple[int, str]],
                 source_uri: str = "", report_id: Optional[str] = None,
                 company_name: str = "",
                 index_membership: Sequence[str] = ()) -> ReportDocument:
    """Normalize, persist and chunk one report; registers the company.

    A company's report fiscal years stay unique: re-ingesting the same
    report id replaces it, but a second report id for the same year is
    rejected.
    """
    doc = ingest_report(pages, company_id, fiscal_year,
                        source_uri=source_uri, report_id=report_id)
    for record in store.list_companies():
        if record.company_id != company_id:
            continue
        for existing_id in record.reports:
            if existing_id == doc.report_id or not store.has_report(existing_id):
                continue
            if store.load_report(existing_id).fiscal_year == fiscal_year:
                raise DataError(
                    f"company {company_id!r} already has report "
                    f"{existing_id!r} for fiscal year {fiscal_year}")
    store.save_report(doc)
    chunks = split_document(doc, config.splitter_config())
    store.save_chunks(doc.report_id, chunks)
    store.upsert_company(CompanyRecord(
        company_id=company_id,
        name=company_name or company_id,
        index_membership=tuple(index_membership),
        reports=(doc.report_id,),
    ))
    record_run(store, "Ingest", doc.checksum, config.digest(),
               store.report_path(doc.report_id),
               config_snapshot=config.snapshot())
    return doc


# --- index ---------------------------------------------------------------------

def stage_index(store: FileStore, config: AppConfig, report_id: str,
                force: bool = False) -> Path:
    """Embed a report's chunks and persist the flat index."""
    chunks = store.load_chunks(report_id)
    inputs_digest = digest_text(
        canonical_json([c.chunk_id for c in chunks]) + store.load_report(report_id).checksum)
    output = store.index_path(report_id)
    if not force and _stage_done(store, "Index", inputs_digest, config.digest(), output):
        return output
    provider = config.provider_spec()
    cache = _cache_for(config)
    vectors = embed_texts([c.text for c in chunks], provider, cache=cache)
    index = VectorIndex(dimension=provider.dimension,
                        provider_id=provider.provider_id)
    for chunk, vector in zip(chunks, vectors):
        index.add((report_id, chunk.chunk_id), vector, kind=chunk.kind)
    index.save(output)
    record_run(store, "Index", inputs_digest, config.digest(), output,
               config_snapshot=config.snapshot())
    return output


def _load_index(store: FileStore, report_id: str) -> VectorIndex:
    path = store.index_path(report_id)
    if not path.exists():
        raise ReportNotIndexedError(
            f"report {report_id!r} has no index; run the index stage first",
            report_id=report_id)
    return VectorIndex.load(path)


# --- extract ----------------------------------------------------------------------

def stage_extract(store: FileStore, config: AppConfig, report_id: str,
                  question_ids: Sequence[str] | None = None,
                  strategy: Optional[Strategy] = None,
                  force: bool = False) -> Tuple[str, Path]:
    """Run every requested question against one report; persist claim records."""
    report = store.load_report(report_id)
    registry = load_registry()
    questions = ([registry.get(qid) for qid in question_ids]
                 if question_ids else registry.all())
    strategy = strategy or config.strategy()
    inputs_digest = digest_text(canonical_json({
        "report": report.checksum,
        "questions": [q.question_id for q in questions],
        "strategy": strategy.value,
    }))
    run_id = make_run_id("Extract", inputs_digest, config.digest())
    output = store.claims_path(run_id)
    if not force and _stage_done(store, "Extract", inputs_digest, config.digest(), output):
        return run_id, output

    index = _load_index(store, report_id)
    chunks_by_id = {c.chunk_id: c for c in store.load_chunks(report_id)}
    provider = config.provider_spec()
    cache = _cache_for(config)
    adapter = _adapter_for(config)
    llm_cfg = config.llm_config()
    records = []
    for question in questions:
        result = run_extraction(
            report, question, strategy, config.retrieval_config(), llm_cfg,
            index=index, chunks_by_id=chunks_by_id, provider=provider,
            adapter=adapter, cache=cache, budget=config.context_budget())
        for claim in result.claims:
            records.append(claim_to_record(
                claim, report_id=report_id, strategy=strategy.value,
                provider=provider.provider_id, run_id=run_id,
                lenient=result.lenient))
    store.save_claims(run_id, records)
    record_run(store, "Extract", inputs_digest, config.digest(), output,
               config_snapshot=config.snapshot())
    return run_id, output


# --- trace -----------------------------------------------------------------------

def few_shot_examples_for(strategy: Strategy) -> Tuple[str, ...]:
    return S3_EXAMPLE_POINTS if strategy is Strategy.S3 else ()


def stage_trace(store: FileStore, config: AppConfig, report_id: str,
                claims_run_id: str, force: bool = False) -> Tuple[str, Path]:
    """Audit a claims run against its report; persist per-claim results."""
    report = store.load_report(report_id)
    records = store.load_claim_records(claims_run_id)
    inputs_digest = digest_text(canonical_json({
        "report": report.checksum, "claims_run": claims_run_id}))
    run_id = make_run_id("Trace", inputs_digest, config.digest())
    output = store.audit_path(run_id)
    if not force and _stage_done(store, "Trace", inputs_digest, config.digest(), output):
        return run_id, output

    claims = [claim_from_record(r) for r in records]
    strategies = {r.get("strategy", "s3") for r in records}
    examples: Tuple[str, ...] = ()
    if "s3" in strategies:
        examples = few_shot_examples_for(Strategy.S3)
    audit = audit_run(claims, report, few_shot_examples=examples,
                      cfg=config.trace_config())
    payload = {
        "report_id": report_id,
        "claims_run_id": claims_run_id,
        "counts": audit.counts,
        "verified_fraction": audit.verified_fraction,
        "results": [_entry_payload(entry) for entry in audit.entries],
    }
    store.save_audit(run_id, payload)
    record_run(store, "Trace", inputs_digest, config.digest(), output,
               config_snapshot=config.snapshot())
    return run_id, output


def _entry_payload(entry) -> dict:
    base = {"claim": claim_to_record(entry.claim)}
    if entry.error is not None:
        base["error"] = entry.error
        base["status"] = None
    else:
        result = entry.result
        base["status"] = result.status.value
        base["matched_page"] = result.matched_page
        base["match_score"] = result.match_score
        base["leakage_score"] = result.leakage_score
        base["matched_span"] = (list(result.matched_span)
                                if result.matched_span else None)
    return base


# --- ask ---------------------------------------------------------------------------

def ask(store: FileStore, config: AppConfig, report_id: str, question: str,
        strategy: Optional[Strategy] = None) -> dict:
    """Interactive question answering with per-claim verification statuses."""
    report = store.load_report(report_id)
    registry = load_registry()
    if question in registry:
        spec = registry.get(question)
    else:
        adhoc_id = f"adhoc_{digest_text(question)[:8]}"
        spec = QuestionSpec(question_id=adhoc_id, category="adhoc",
                            pillar="Environment", text=question)
    strategy = strategy or config.strategy()
    index = _load_index(store, report_id)
    chunks_by_id = {c.chunk_id: c for c in store.load_chunks(report_id)}
    provider = config.provider_spec()
    result = run_extraction(
        report, spec, strategy, config.retrieval_config(), config.llm_config(),
        index=index, chunks_by_id=chunks_by_id, provider=provider,
        adapter=_adapter_for(config), cache=_cache_for(config),
        budget=config.context_budget())
    audit = audit_run(result.claims, report,
                      few_shot_examples=few_shot_examples_for(strategy),
                      cfg=config.trace_config())
    return {
        "report_id": report_id,
        "question_id": spec.question_id,
        "question_text": spec.text,
        "strategy": strategy.value,
        "lenient": result.lenient,
        "prompt": result.prompt,
        "raw_response": result.raw_response,
        "claims": [_entry_payload(entry) for entry in audit.entries],
        "counts": audit.counts,
    }


def ask_multi(store: FileStore, config: AppConfig, report_ids: Sequence[str],
              question: str, strategy: Optional[Strategy] = None) -> dict:
    """One question across several reports: per-report retrieval and answers.

    Running the pipeline per report (rather than merging contexts into one
    prompt) keeps every claim verifiable against its own report's pages.
    """
    answers = [ask(store, config, report_id, question, strategy=strategy)
               for report_id in report_ids]
    return {
        "question_id": answers[0]["question_id"] if answers else None,
        "question_text": answers[0]["question_text"] if answers else question,
        "answers": answers,
    }


# --- train / predict -------------------------------------------------------------

def _summary_vectors(store: FileStore, config: AppConfig,
                     claims_by_company: Dict[str, str]) -> Tuple[List[str], np.ndarray]:
    provider = config.provider_spec()
    cache = _cache_for(config)
    company_ids = sorted(claims_by_company)
    rows = []
    for company_id in company_ids:
        records = store.load_claim_records(claims_by_company[company_id])
        claims = [claim_from_record(r) for r in records]
        vector = build_summary_embedding(claims, provider, cache=cache)
        rows.append(vector.values)
    return company_ids, np.vstack(rows)


def stage_train(store: FileStore, config: AppConfig,
                claims_by_company: Dict[str, str],
                reference_scores: Dict[str, float],
                model_kind: str = "mlp") -> Tuple[str, dict]:
    """Train a regressor on summary embeddings against reference scores.

    Scores are scaled to [0, 1] for training; the reported correlation is on
    the seeded held-out split (falling back to training-set metrics when the
    corpus is too small to hold anything out).
    """
    companies = sorted(set(claims_by_company) & set(reference_scores))
    if len(companies) < 4:
        raise DataError("need at least 4 companies with claims and reference scores")
    inputs_digest = digest_text(canonical_json({
        "companies": companies,
        "claims": [claims_by_company[c] for c in companies],
        "refs": {c: reference_scores[c] for c in companies},
        "model": model_kind,
    }))
    run_id = make_run_id("Train", inputs_digest, config.digest())
    metrics_path = store.metrics_path(run_id)
    if _stage_done(store, "Train", inputs_digest, config.digest(), metrics_path):
        return run_id, store.load_metrics(run_id)

    ids, X = _summary_vectors(store, config,
                              {c: claims_by_company[c] for c in companies})
    y = np.array([reference_scores[c] / 100.0 for c in ids])

    rng = np.random.default_rng(int(config.get("score.split_seed", 0)))
    order = rng.permutation(len(ids))
    holdout = max(1, int(len(ids) * float(config.get("score.holdout_fraction", 0.2))))
    test_idx, train_idx = order[:holdout], order[holdout:]
    if len(train_idx) < 2:
        train_idx, test_idx = order, order

    provider = config.provider_spec()
    if model_kind == "mlp":
        model, train_metrics = train_mlp(X[train_idx], y[train_idx],
                                         config.mlp_config(input_dim=X.shape[1]))
    elif model_kind == "gbt":
        model, train_metrics = train_gbt(X[train_idx], y[train_idx],
                                         config.gbt_config())
    else:
        raise DataError(f"unknown model kind {model_kind!r}")

    heldout = metrics_or_error(model.predict(X[test_idx]), y[test_idx])
    save_model(model, store.model_path(run_id))
    payload = {
        "run_id": run_id,
        "provider_id": provider.provider_id,
        "model_kind": model_kind,
        "pearson_r": heldout.pearson_r,
        "r_squared": heldout.r_squared,
        "error_code": heldout.error_code,
        "loss_curve": list(train_metrics.loss_curve),
        "train_pearson_r": train_metrics.pearson_r,
        "n_train": int(len(train_idx)),
        "n_heldout": int(len(test_idx)),
    }
    store.save_metrics(run_id, payload)
    record_run(store, "Train", inputs_digest, config.digest(), metrics_path,
               config_snapshot=config.snapshot())

    predictions = np.clip(model.predict(X) * 100.0, 0.0, 100.0)
    for company_id, predicted in zip(ids, predictions):
        fiscal_year = _fiscal_year_for(store, company_id)
        store.save_scores(company_id, [ScoreRecord(
            company_id=company_id, fiscal_year=fiscal_year,
            score=float(predicted), kind=ScoreKind.PREDICTED,
            model_run_id=run_id)])
    return run_id, payload


def _fiscal_year_for(store: FileStore, company_id: str) -> int:
    for record in store.list_companies():
        if record.company_id == company_id and record.reports:
            return store.load_report(record.reports[-1]).fiscal_year
    return 0


def predict_scores(store: FileStore, config: AppConfig, model_run_id: str,
                   claims_by_company: Dict[str, str]) -> Dict[str, float]:
    _, model = load_model(store.model_path(model_run_id))
    ids, X = _summary_vectors(store, config, claims_by_company)
    predictions = np.clip(model.predict(X) * 100.0, 0.0, 100.0)
    return {company_id: float(p) for company_id, p in zip(ids, predictions)}


# --- batch ------------------------------------------------------------------------

@dataclass
class CompanyOutcome:
    company_id: str
    report_id: Optional[str] = None
    claims_run_id: Optional[str] = None
    audit_run_id: Optional[str] = None
    error: Optional[str] = None


def pipeline_run(store: FileStore, config: AppConfig,
                 companies: Sequence[dict],
                 reference_scores: Optional[Dict[str, float]] = None,
                 question_ids: Optional[Sequence[str]] = None,
                 model_kind: str = "mlp") -> dict:
    """End-to-end batch over companies described as dicts.

    Each entry: {company_id, fiscal_year, pages, name?, index_membership?}.
    Per-company failures are isolated; the batch continues and reports them.
    """
    outcomes: List[CompanyOutcome] = []
    claims_by_company: Dict[str, str] = {}
    for entry in companies:
        outcome = CompanyOutcome(company_id=entry["company_id"])
        outcomes.append(outcome)
        try:
            report_id = entry.get("report_id") or \
                f"{entry['company_id']}-{entry['fiscal_year']}"
            if not store.has_report(report_id):
                stage_ingest(store, config, entry["company_id"],
                             entry["fiscal_year"], entry["pages"],
                             source_uri=entry.get("source_uri", ""),
                             report_id=report_id,
                             company_name=entry.get("name", ""),
                             index_membership=entry.get("index_membership", ()))
            outcome.report_id = report_id
            stage_index(store, config, report_id)
            claims_run, _ = stage_extract(store, config, report_id,
                                          question_ids=question_ids)
            outcome.claims_run_id = claims_run
            audit_run_id, _ = stage_trace(store, config, report_id, claims_run)
            outcome.audit_run_id = audit_run_id
            claims_by_company[entry["company_id"]] = claims_run
        except EsgLensError as exc:
            outcome.error = f"{exc.code}: {exc}"
    result = {
        "outcomes": [vars(o) for o in outcomes],
        "train": None,
    }
    if reference_scores:
        for company_id, score in reference_scores.items():
            fiscal_year = _fiscal_year_for(store, company_id)
            store.save_scores(company_id, [ScoreRecord(
                company_id=company_id, fiscal_year=fiscal_year,
                score=float(score), kind=ScoreKind.REFERENCE)])
        trainable = {c: r for c, r in claims_by_company.items()
                     if c in reference_scores}
        if len(trainable) >= 4:
            run_id, metrics = stage_train(store, config, trainable,
                                          reference_scores, model_kind)
            result["train"] = {"run_id": run_id, "metrics": metrics}
    return result
