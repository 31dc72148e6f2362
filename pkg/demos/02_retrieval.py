"""Embedding and exact top-k retrieval over a small chunk set.

Run: python demos/02_retrieval.py
"""

import numpy as np

from esglens.corpus import SplitterConfig, ingest_report, split_document
from esglens.embed import embed_texts, local_provider
from esglens.index import RetrievalConfig, VectorIndex

pages = [
    (1, "Total energy consumption reached 810 GWh across all forms of "
        "energy used, with renewables supplying a third."),
    (2, "Water withdrawal fell to 42 million cubic meters and the recycling "
        "rate passed ninety percent."),
    (3, "Scope 1 and Scope 2 greenhouse gas emissions dropped following the "
        "electrification of the logistics fleet."),
    (4, "The board approved a biodiversity policy covering all sites near "
        "protected habitats."),
]
report = ingest_report(pages, company_id="demo-co", fiscal_year=2022)
chunks = split_document(report, SplitterConfig(chunk_size=300, chunk_overlap=50))

# The local provider is a seeded feature-hash embedder: deterministic and
# offline, with every vector L2-normalized so similarity is a dot product.
provider = local_provider(dimension=128, seed=7)
vectors = embed_texts([c.text for c in chunks], provider)

index = VectorIndex(dimension=provider.dimension, provider_id=provider.provider_id)
for chunk, vector in zip(chunks, vectors):
    index.add((report.report_id, chunk.chunk_id), vector, kind=chunk.kind)
print(f"indexed {len(index)} chunks at dimension {index.dimension}")

for question in ("How much energy was consumed?",
                 "What is the water recycling rate?",
                 "greenhouse gas emissions scope"):
    query = embed_texts([question], provider)[0]
    hits = index.search(query, RetrievalConfig(k=2))
    print(f"\nQ: {question}")
    for (rid, chunk_id), similarity in hits:
        text = next(c.text for c in chunks if c.chunk_id == chunk_id)
        print(f"  {similarity:+.3f}  chunk {chunk_id}: {text[:70]!r}")

# Exactness: the flat index always agrees with a brute-force full sort.
query = embed_texts(["energy"], provider)[0]
sims = np.array([float(np.dot(index.vector(k).astype(np.float64), query.values))
                 for k in index.keys])
order = sorted(range(len(sims)), key=lambda i: (-sims[i], index.keys[i]))
brute = [index.keys[i] for i in order[:3]]
fast = [key for key, _ in index.search(query, RetrievalConfig(k=3))]
assert brute == fast
print("\nbrute-force agreement: exact")
