"""The full pipeline on a synthetic corpus: ingest through score prediction.

Run: python demos/06_end_to_end.py
Everything is offline: the local hash embedder stands in for a commercial
embedding service and the rule-based responder stands in for the LLM.
"""

import tempfile

from esglens.app import pipeline
from esglens.app.config import load_config
from esglens.app.store import FileStore
from esglens.synth import generate_corpus

corpus = generate_corpus(n_companies=30, seed=0)
print(f"generated {len(corpus.companies)} companies; reference scores span "
      f"{min(r.score for r in corpus.reference_scores):.1f}.."
      f"{max(r.score for r in corpus.reference_scores):.1f}")

with tempfile.TemporaryDirectory() as tmp:
    config = load_config(overrides=[f"data_dir={tmp}/data"])
    store = FileStore(config.data_dir)

    companies = [{
        "company_id": c.company_id,
        "fiscal_year": c.fiscal_year,
        "pages": list(c.pages),
        "name": c.company_id,
        "index_membership": list(c.index_membership),
    } for c in corpus.companies]

    result = pipeline.pipeline_run(store, config, companies,
                                   reference_scores=corpus.reference_by_company(),
                                   model_kind="mlp")
    metrics = result["train"]["metrics"]
    print(f"pipeline: {len(result['outcomes'])} companies, "
          f"{sum(1 for o in result['outcomes'] if o['error'])} failures")
    print(f"held-out pearson r = {metrics['pearson_r']:.3f} "
          f"(train r = {metrics['train_pearson_r']:.3f})")

    # interactive ask with verification statuses on every claim
    report_id = result["outcomes"][0]["report_id"]
    answer = pipeline.ask(store, config, report_id, "GRI_302_1")
    print(f"\nask({report_id!r}, GRI_302_1): {len(answer['claims'])} claims")
    for entry in answer["claims"][:4]:
        point = entry["claim"]["point"][:58]
        print(f"  [{entry['status']}] p.{entry['claim']['source_page']} {point!r}")
    print("\nthe same store serves HTTP via: esglens serve --port 8300")
