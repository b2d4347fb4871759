"""medioscope: mining toolkit for media ecosystems on microblogging platforms.

Ingests news-tweet streams, classifies article topics with a linear SVM over
TF-IDF lemma vectors, resolves mentioned localities against a gazetteer, and
computes editorial/audience indicators, exposed through a CLI and an HTTP API.
"""

__version__ = "0.1.0"
