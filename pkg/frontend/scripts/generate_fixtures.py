"""Regenerate the frontend test fixtures from the live service.

Run from the repository root with the package installed:
    python frontend/scripts/generate_fixtures.py

Captures real response bodies (ask flow on the traceability fixture report,
companies/scores/metrics for a 20-company synthetic corpus) so the frontend
tests exercise the exact shapes the service emits.
"""

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from esglens.app import pipeline
from esglens.app.config import load_config
from esglens.app.service import create_app
from esglens.app.store import FileStore
from esglens.synth import generate_corpus

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "tests"))
import audit_fixtures as pf  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "test" / "fixtures"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        config = load_config(overrides=[f"data_dir={tmp}/data"])
        store = FileStore(config.data_dir)
        client = TestClient(create_app(store, config))

        # fixture report with an ask flow
        doc = pf.build_traceability_report()
        client.post("/reports", json={
            "company_id": doc.company_id,
            "fiscal_year": doc.fiscal_year,
            "pages": [{"page_number": n, "text": t} for n, t in doc.pages],
            "report_id": doc.report_id,
            "name": "Fixture Semiconductor",
            "index_membership": ["SP500"],
        })
        client.post(f"/reports/{doc.report_id}/index")
        ask = client.post("/ask", json={"report_id": doc.report_id,
                                        "question": "GRI_302_1",
                                        "strategy": "s3"}).json()
        (OUT / "ask.json").write_text(json.dumps(ask, indent=2), "utf-8")

        page = client.get(f"/reports/{doc.report_id}/pages/93").json()
        (OUT / "page.json").write_text(json.dumps(page, indent=2), "utf-8")

        # a mixed-status audit payload for badge rendering coverage
        from esglens.app.pipeline import _entry_payload
        from esglens.trace import audit_run

        audit = audit_run(pf.audit_claims(), doc,
                          few_shot_examples=pf.FEW_SHOT_EXAMPLES,
                          cfg=config.trace_config())
        mixed = dict(ask)
        mixed["claims"] = [_entry_payload(e) for e in audit.entries]
        mixed["counts"] = audit.counts
        (OUT / "ask_mixed.json").write_text(json.dumps(mixed, indent=2), "utf-8")

        # 20-company synthetic corpus with a trained model
        corpus = generate_corpus(20, seed=4)
        companies = [{
            "company_id": c.company_id, "fiscal_year": c.fiscal_year,
            "pages": list(c.pages), "name": c.company_id.replace("synth", "Synth Co"),
            "index_membership": list(c.index_membership),
        } for c in corpus.companies]
        result = pipeline.pipeline_run(store, config, companies,
                                       reference_scores=corpus.reference_by_company())
        run_id = result["train"]["run_id"]
        (OUT / "companies.json").write_text(
            json.dumps(client.get("/companies").json(), indent=2), "utf-8")
        (OUT / "metrics.json").write_text(
            json.dumps(client.get(f"/metrics/{run_id}").json(), indent=2), "utf-8")
        scores = {
            c.company_id: client.get(f"/scores/{c.company_id}").json()
            for c in corpus.companies
        }
        (OUT / "scores.json").write_text(json.dumps(scores, indent=2), "utf-8")
        print(f"fixtures written to {OUT}")


if __name__ == "__main__":
    main()
