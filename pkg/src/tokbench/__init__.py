"""
tokbench - Japanese tokenizer benchmark for TF-IDF review sentiment classification.

Components:
- corpus: review CSV ingestion, seeded sampling, synthetic mini corpus
- lattice: dictionary trie and minimum-cost Viterbi segmentation
- subword: unigram language-model tokenizer trained by EM
- vectorize: smoothed-idf TF-IDF sparse vectors with timing
- classify: Multinomial Naive Bayes, L2 logistic regression, stratified CV, grid search
- harness: experiment pipeline, reports, benchmarks and the MCP server surface
"""

__version__ = "0.1.0"
