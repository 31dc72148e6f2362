"""HTTP service exposing ingestion, extraction, traceability and scoring."""

from __future__ import annotations

from dataclasses import asdict
from pathlib import Path
from typing import List, Optional, Tuple

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .. import __version__
from ..errors import (
    ConfigError,
    DataError,
    EsgLensError,
    ProviderUnavailableError,
    ReportNotFoundError,
    ReportNotIndexedError,
    UnknownQuestionError,
)
from ..extract import Strategy, load_registry
from . import pipeline
from .config import AppConfig
from .store import FileStore

_STATUS_BY_CODE = {
    "REPORT_NOT_FOUND": 404,
    "REPORT_NOT_INDEXED": 409,
    "UNKNOWN_QUESTION": 404,
    "DATA_ERROR": 404,
    "CONFIG_ERROR": 400,
    "PROVIDER_UNAVAILABLE": 502,
    "PARSE_FAILURE": 502,
    "EMPTY_RETRIEVAL": 409,
}


class PagePayload(BaseModel):
    page_number: int
    text: str


class ReportPayload(BaseModel):
    company_id: str
    fiscal_year: int
    pages: List[PagePayload]
    source_uri: str = ""
    report_id: Optional[str] = None
    name: str = ""
    index_membership: List[str] = Field(default_factory=list)


class AskPayload(BaseModel):
    report_id: Optional[str] = None
    report_ids: Optional[List[str]] = None
    question: str
    strategy: Optional[str] = None


class TrainPayload(BaseModel):
    model: str = "mlp"


def create_app(store: FileStore, config: AppConfig,
               ui_dist: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="esglens", version=__version__)

    @app.exception_handler(EsgLensError)
    async def _esglens_error(request: Request, exc: EsgLensError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status,
                            content={"error": {"code": exc.code,
                                               "message": str(exc)}})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/companies")
    def companies():
        return [asdict(record) for record in store.list_companies()]

    @app.get("/questions")
    def questions():
        return [asdict(q) for q in load_registry().all()]

    @app.post("/reports", status_code=201)
    def create_report(payload: ReportPayload):
        doc = pipeline.stage_ingest(
            store, config, payload.company_id, payload.fiscal_year,
            [(p.page_number, p.text) for p in payload.pages],
            source_uri=payload.source_uri, report_id=payload.report_id,
            company_name=payload.name,
            index_membership=tuple(payload.index_membership))
        return {"report_id": doc.report_id, "pages": doc.page_count,
                "checksum": doc.checksum}

    @app.get("/reports/{report_id}")
    def report_meta(report_id: str):
        doc = store.load_report(report_id)
        return {"report_id": doc.report_id, "company_id": doc.company_id,
                "fiscal_year": doc.fiscal_year, "pages": doc.page_count,
                "source_uri": doc.source_uri, "checksum": doc.checksum,
                "indexed": store.index_path(report_id).exists()}

    @app.get("/reports/{report_id}/pages/{page_number}")
    def report_page(report_id: str, page_number: int):
        doc = store.load_report(report_id)
        return {"report_id": report_id, "page_number": page_number,
                "text": doc.page_text(page_number)}

    @app.post("/reports/{report_id}/index")
    def build_index(report_id: str):
        if not store.has_report(report_id):
            raise ReportNotFoundError(f"report {report_id!r} not found")
        path = pipeline.stage_index(store, config, report_id)
        return {"report_id": report_id, "index_path": str(path)}

    @app.post("/ask")
    def ask(payload: AskPayload):
        strategy = Strategy(payload.strategy.lower()) if payload.strategy else None
        if payload.report_ids:
            return pipeline.ask_multi(store, config, payload.report_ids,
                                      payload.question, strategy=strategy)
        if not payload.report_id:
            raise ConfigError("ask needs report_id or report_ids")
        return pipeline.ask(store, config, payload.report_id, payload.question,
                            strategy=strategy)

    @app.get("/claims/{run_id}")
    def claims(run_id: str):
        return {"run_id": run_id, "claims": store.load_claim_records(run_id)}

    @app.get("/audits/{run_id}")
    def audits(run_id: str):
        return store.load_audit(run_id)

    @app.get("/scores/{company_id}")
    def scores(company_id: str):
        records = store.load_scores(company_id)
        return {"company_id": company_id, "scores": [{
            "fiscal_year": r.fiscal_year,
            "score": r.score,
            "kind": r.kind.value,
            "model_run_id": r.model_run_id,
        } for r in records]}

    @app.post("/train")
    def train(payload: TrainPayload):
        claims_by_company = _latest_claims_by_company(store)
        references = _reference_scores(store)
        run_id, metrics = pipeline.stage_train(
            store, config, claims_by_company, references,
            model_kind=payload.model)
        return {"run_id": run_id, "metrics": metrics}

    @app.get("/metrics/{run_id}")
    def metrics(run_id: str):
        return store.load_metrics(run_id)

    if ui_dist is not None and ui_dist.exists():
        app.mount("/ui", StaticFiles(directory=str(ui_dist), html=True),
                  name="ui")

    return app


def _latest_claims_by_company(store: FileStore) -> dict:
    """Most recent extract run per company, matched through report ids."""
    report_company = {}
    for record in store.list_companies():
        for report_id in record.reports:
            report_company[report_id] = record.company_id
    claims_by_company = {}
    for run in store.list_runs():
        if run.stage != "Extract":
            continue
        path = Path(run.outputs_path)
        if not path.exists():
            continue
        run_id = path.stem
        try:
            records = store.load_claim_records(run_id)
        except DataError:
            continue
        if not records:
            continue
        report_id = records[0].get("report_id")
        company_id = report_company.get(report_id)
        if company_id:
            claims_by_company[company_id] = run_id
    return claims_by_company


def _reference_scores(store: FileStore) -> dict:
    references = {}
    for record in store.list_companies():
        for score in store.load_scores(record.company_id):
            if score.kind.value == "Reference":
                references[record.company_id] = score.score
    return references


def serve(config: AppConfig, host: str = "127.0.0.1", port: int = 8300,
          ui_dist: Optional[Path] = None) -> None:
    import uvicorn

    store = FileStore(config.data_dir)
    app = create_app(store, config, ui_dist=ui_dist)
    uvicorn.run(app, host=host, port=port)
