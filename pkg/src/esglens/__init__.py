"""esglens: retrieval-augmented ESG report analysis.

Subpackages
-----------
corpus
    Report ingestion, recursive page-anchored chunking, chunk-kind tagging.
embed
    Embedding providers (deterministic local and remote HTTP) with a
    content-addressed cache.
index
    Exact cosine-similarity flat vector index with file persistence.
extract
    Question registry, prompt strategies, LLM adapters, response parsing.
trace
    Claim verification against source pages and few-shot leakage detection.
score
    Summary embedding, MLP and gradient-boosted-tree regressors, metrics,
    reference-score synthesis.
app
    File store, configuration, CLI and HTTP service.
synth
    Synthetic corpus generator for hermetic end-to-end runs.
"""

__version__ = "0.1.0"
