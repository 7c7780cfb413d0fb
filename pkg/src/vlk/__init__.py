"""Vendor-linking toolkit for authorship-attribution investigations on ad corpora.

Non-neural machinery only: phone-based vendor communities, stylometric and
embedding-based vendor similarity, retrieval-style vendor verification with a
full metric suite, CKA layer analysis, and knowledge-graph export. Embeddings
are consumed as files produced elsewhere; no model training or inference
happens here.
"""

__version__ = "0.1.0"
