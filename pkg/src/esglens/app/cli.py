"""Command-line driver: ingest, index, extract, trace, score, ask, serve, pipeline.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 provider error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from ..corpus import (
    load_report_from_page_dir,
    load_report_from_text_file,
    read_chunks_jsonl,
)
from ..embed import embed_texts
from ..errors import ConfigError, DataError, EsgLensError, ProviderUnavailableError
from ..extract import Strategy, load_registry
from ..index import RetrievalConfig, VectorIndex
from ..score import ScoreKind, ScoreRecord, evaluate
from ..score.metrics import metrics_or_error
from . import pipeline
from .config import AppConfig, load_config
from .store import CompanyRecord, FileStore, claim_from_record


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esglens",
        description="Retrieval-augmented ESG report analysis")
    parser.add_argument("--config", help="path to the JSON configuration file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="ingest a report from a file or page directory")
    p_ingest.add_argument("--company", required=True)
    p_ingest.add_argument("--fiscal-year", type=int, required=True)
    p_ingest.add_argument("--input", required=True,
                          help="UTF-8 text file or directory of page_NNNN.txt files")
    p_ingest.add_argument("--report-id")
    p_ingest.add_argument("--name", default="")
    p_ingest.add_argument("--membership", default="",
                          help="comma-separated index memberships")

    p_index = sub.add_parser("index", help="build or query a vector index")
    index_sub = p_index.add_subparsers(dest="index_command", required=True)
    p_build = index_sub.add_parser("build")
    p_build.add_argument("--chunks", help="chunks JSONL file (file mode)")
    p_build.add_argument("--out", help="output index path (file mode)")
    p_build.add_argument("--report", help="report id (store mode)")
    p_query = index_sub.add_parser("query")
    p_query.add_argument("--index", required=True)
    p_query.add_argument("--text", required=True)
    p_query.add_argument("--k", type=int, default=20)

    p_extract = sub.add_parser("extract", help="run question extraction over a report")
    p_extract.add_argument("--report", required=True)
    p_extract.add_argument("--questions", default="all",
                           help='"all" or comma-separated question ids')
    p_extract.add_argument("--strategy", default=None,
                           choices=["s1", "s2", "s3", "s4"])

    p_trace = sub.add_parser("trace", help="verify a claims run against its report")
    p_trace.add_argument("--claims", required=True, help="claims run id")
    p_trace.add_argument("--report", required=True)

    p_score = sub.add_parser("score", help="train, predict or evaluate score models")
    score_sub = p_score.add_subparsers(dest="score_command", required=True)
    p_train = score_sub.add_parser("train")
    p_train.add_argument("--claims", required=True,
                         help="directory of per-company claim JSONL files")
    p_train.add_argument("--refs", required=True,
                         help="JSONL of reference scores (company_id, score)")
    p_train.add_argument("--model", default="mlp", choices=["mlp", "gbt"])
    p_predict = score_sub.add_parser("predict")
    p_predict.add_argument("--model-run", required=True)
    p_predict.add_argument("--claims", required=True)
    p_eval = score_sub.add_parser("eval")
    p_eval.add_argument("--pred", required=True, help="JSONL of predicted scores")
    p_eval.add_argument("--refs", required=True, help="JSONL of reference scores")

    p_ask = sub.add_parser("ask", help="ask a question against an indexed report")
    p_ask.add_argument("--report", required=True)
    p_ask.add_argument("--question", required=True)
    p_ask.add_argument("--strategy", default=None, choices=["s1", "s2", "s3", "s4"])

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8300)

    p_pipeline = sub.add_parser("pipeline", help="end-to-end batch run")
    p_pipeline.add_argument("--companies",
                            help="JSONL of {company_id, fiscal_year, pages}")
    p_pipeline.add_argument("--refs", help="JSONL of reference scores")
    p_pipeline.add_argument("--synthetic", type=int, default=0,
                            help="generate and run N synthetic companies")
    p_pipeline.add_argument("--seed", type=int, default=0)
    p_pipeline.add_argument("--model", default="mlp", choices=["mlp", "gbt"])
    return parser


def _load_score_file(path: str) -> dict:
    scores = {}
    for line in Path(path).read_text("utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        scores[record["company_id"]] = float(record["score"])
    return scores


def _claims_runs_from_dir(store: FileStore, claims_dir: str) -> dict:
    """Import per-company claim files into the store's claims area."""
    mapping = {}
    for path in sorted(Path(claims_dir).glob("*.jsonl")):
        company_id = path.stem
        records = [json.loads(line)
                   for line in path.read_text("utf-8").splitlines() if line.strip()]
        for record in records:
            claim_from_record(record)  # validate shape early
        run_id = f"import-{company_id}"
        store.save_claims(run_id, records)
        mapping[company_id] = run_id
    if not mapping:
        raise DataError(f"no *.jsonl claim files under {claims_dir}")
    return mapping


def _cmd_ingest(args, store: FileStore, config: AppConfig) -> int:
    path = Path(args.input)
    if path.is_dir():
        doc = load_report_from_page_dir(path, args.company, args.fiscal_year,
                                        report_id=args.report_id)
    else:
        doc = load_report_from_text_file(path, args.company, args.fiscal_year,
                                         report_id=args.report_id)
    membership = tuple(m for m in args.membership.split(",") if m)
    doc = pipeline.stage_ingest(store, config, args.company, args.fiscal_year,
                                doc.pages, source_uri=str(path),
                                report_id=args.report_id or doc.report_id,
                                company_name=args.name,
                                index_membership=membership)
    print(json.dumps({"report_id": doc.report_id, "pages": doc.page_count,
                      "checksum": doc.checksum}))
    return 0


def _cmd_index(args, store: FileStore, config: AppConfig) -> int:
    if args.index_command == "build":
        if args.report:
            path = pipeline.stage_index(store, config, args.report)
            print(json.dumps({"report_id": args.report, "index": str(path)}))
            return 0
        if not args.chunks or not args.out:
            raise ConfigError("index build needs --chunks and --out (or --report)")
        chunks = read_chunks_jsonl(args.chunks)
        if not chunks:
            raise DataError(f"no chunks in {args.chunks}")
        provider = config.provider_spec()
        vectors = embed_texts([c.text for c in chunks], provider)
        index = VectorIndex(dimension=provider.dimension,
                            provider_id=provider.provider_id)
        for chunk, vector in zip(chunks, vectors):
            index.add((chunk.report_id, chunk.chunk_id), vector, kind=chunk.kind)
        index.save(args.out)
        print(json.dumps({"entries": len(index), "index": args.out}))
        return 0
    index = VectorIndex.load(args.index)
    provider = config.provider_spec()
    if provider.dimension != index.dimension:
        raise ConfigError(
            f"config provider dimension {provider.dimension} != index "
            f"dimension {index.dimension}")
    query = embed_texts([args.text], provider)[0]
    results = index.search(query, RetrievalConfig(k=args.k))
    for (report_id, chunk_id), similarity in results:
        print(json.dumps({"report_id": report_id, "chunk_id": chunk_id,
                          "similarity": similarity}))
    return 0


def _cmd_extract(args, store: FileStore, config: AppConfig) -> int:
    question_ids = None
    if args.questions != "all":
        question_ids = [q.strip() for q in args.questions.split(",") if q.strip()]
    strategy = Strategy(args.strategy) if args.strategy else None
    run_id, path = pipeline.stage_extract(store, config, args.report,
                                          question_ids=question_ids,
                                          strategy=strategy)
    records = store.load_claim_records(run_id)
    print(json.dumps({"run_id": run_id, "claims": len(records),
                      "output": str(path)}))
    return 0


def _cmd_trace(args, store: FileStore, config: AppConfig) -> int:
    run_id, path = pipeline.stage_trace(store, config, args.report, args.claims)
    audit = store.load_audit(run_id)
    _print_audit_table(audit)
    print(json.dumps({"run_id": run_id, "counts": audit["counts"],
                      "verified_fraction": audit["verified_fraction"],
                      "output": str(path)}))
    return 0


def _print_audit_table(audit: dict) -> None:
    """Human-readable per-claim table, kept off stdout's JSON stream."""
    header = f"{'#':>3} {'status':16} {'page':>5} {'score':>6}  point"
    print(header, file=sys.stderr)
    print("-" * len(header), file=sys.stderr)
    for i, entry in enumerate(audit["results"], start=1):
        status = entry.get("error") or entry.get("status") or "-"
        page = entry.get("matched_page")
        score = entry.get("match_score")
        point = entry["claim"]["point"]
        if len(point) > 56:
            point = point[:53] + "..."
        print(f"{i:>3} {status:16} {str(page or '-'):>5} "
              f"{score if score is None else format(score, '.2f'):>6}  {point}",
              file=sys.stderr)
    print(f"verified: {audit['counts'].get('Verified', 0)} of "
          f"{len(audit['results'])}", file=sys.stderr)


def _cmd_score(args, store: FileStore, config: AppConfig) -> int:
    if args.score_command == "train":
        claims_by_company = _claims_runs_from_dir(store, args.claims)
        references = _load_score_file(args.refs)
        for company_id in claims_by_company:
            store.upsert_company(CompanyRecord(company_id=company_id,
                                               name=company_id))
        run_id, metrics = pipeline.stage_train(store, config, claims_by_company,
                                               references, model_kind=args.model)
        print(json.dumps({"run_id": run_id, "metrics": metrics}))
        return 0
    if args.score_command == "predict":
        claims_by_company = _claims_runs_from_dir(store, args.claims)
        predictions = pipeline.predict_scores(store, config, args.model_run,
                                              claims_by_company)
        for company_id, score in sorted(predictions.items()):
            print(json.dumps({"company_id": company_id, "score": score,
                              "kind": "Predicted"}))
        return 0
    predictions = _load_score_file(args.pred)
    references = _load_score_file(args.refs)
    shared = sorted(set(predictions) & set(references))
    if len(shared) < 2:
        raise DataError("need at least 2 companies present in both files")
    metrics = metrics_or_error([predictions[c] for c in shared],
                               [references[c] for c in shared])
    print(json.dumps({"n": len(shared), "pearson_r": metrics.pearson_r,
                      "r_squared": metrics.r_squared,
                      "error_code": metrics.error_code}))
    return 0


def _cmd_ask(args, store: FileStore, config: AppConfig) -> int:
    strategy = Strategy(args.strategy) if args.strategy else None
    answer = pipeline.ask(store, config, args.report, args.question,
                          strategy=strategy)
    print(json.dumps(answer, ensure_ascii=False, indent=2))
    return 0


def _cmd_pipeline(args, store: FileStore, config: AppConfig) -> int:
    if args.synthetic:
        from ..synth import generate_corpus

        corpus = generate_corpus(args.synthetic, seed=args.seed)
        companies = [{
            "company_id": c.company_id,
            "fiscal_year": c.fiscal_year,
            "pages": list(c.pages),
            "name": c.company_id,
            "index_membership": list(c.index_membership),
        } for c in corpus.companies]
        references = corpus.reference_by_company()
    elif args.companies:
        companies = [json.loads(line)
                     for line in Path(args.companies).read_text("utf-8").splitlines()
                     if line.strip()]
        for entry in companies:
            entry["pages"] = [tuple(p) for p in entry["pages"]]
        references = _load_score_file(args.refs) if args.refs else None
    else:
        raise ConfigError("pipeline needs --companies or --synthetic N")
    result = pipeline.pipeline_run(store, config, companies,
                                   reference_scores=references,
                                   model_kind=args.model)
    failures = [o for o in result["outcomes"] if o["error"]]
    summary = {
        "companies": len(result["outcomes"]),
        "failures": len(failures),
        "train": result["train"]["metrics"] if result["train"] else None,
    }
    print(json.dumps(summary))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config, overrides=args.overrides)
        if args.command == "serve":
            from .service import serve

            ui_dist = Path(__file__).resolve().parents[3] / "frontend" / "dist"
            serve(config, host=args.host, port=args.port, ui_dist=ui_dist)
            return 0
        store = FileStore(config.data_dir)
        handler = {
            "ingest": _cmd_ingest,
            "index": _cmd_index,
            "extract": _cmd_extract,
            "trace": _cmd_trace,
            "score": _cmd_score,
            "ask": _cmd_ask,
            "pipeline": _cmd_pipeline,
        }[args.command]
        return handler(args, store, config)
    except ConfigError as exc:
        print(f"config error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except ProviderUnavailableError as exc:
        print(f"provider error [{exc.code}]: {exc}", file=sys.stderr)
        return 4
    except EsgLensError as exc:
        print(f"data error [{exc.code}]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
