"""Spanish text pretreatment chain.

tokens    — lexical segmentation into typed tokens with source spans
hmm       — hidden Markov model training and Viterbi POS decoding
lemmas    — rule-table lemmatizer with exception dictionary
tfidf     — document vectors, frequency list, keyword extraction
"""

from .tokens import Token, tokenize  # noqa: F401
from .hmm import HmmModel, pos_tag, train_hmm, viterbi  # noqa: F401
from .lemmas import Lemmatizer, default_lemmatizer  # noqa: F401
from .tfidf import (  # noqa: F401
    DocumentVector,
    FrequencyList,
    VectorizerStats,
    compute_tfidf,
    extract_keywords,
)
