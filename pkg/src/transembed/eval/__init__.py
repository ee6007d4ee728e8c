"""Intrinsic evaluation of embedding spaces."""
from .analogy import (AnalogyQuestion, AnalogyResult, eval_analogy, format_retained,
                      solve_analogy)
from .curve import CurveRow, curve_csv, learning_curve
from .datasets import (load_analogies, load_manifest, load_similarity, load_synant,
                       load_toefl)
from .report import ReportRow, pretty, read_csv, to_csv
from .similarity import (SimilarityDataset, SimilarityResult, UndefinedCorrelation,
                         average_ranks, eval_similarity, spearman)
from .svm import KernelClassifier, train_kernel_classifier
from .synant import SynAntResult, SynAntSet, eval_synant
from .toefl import ToeflQuestion, ToeflResult, eval_toefl

__all__ = [
    "AnalogyQuestion", "AnalogyResult", "eval_analogy", "format_retained", "solve_analogy",
    "CurveRow", "curve_csv", "learning_curve",
    "load_analogies", "load_manifest", "load_similarity", "load_synant", "load_toefl",
    "ReportRow", "pretty", "read_csv", "to_csv",
    "SimilarityDataset", "SimilarityResult", "UndefinedCorrelation", "average_ranks",
    "eval_similarity", "spearman",
    "KernelClassifier", "train_kernel_classifier",
    "SynAntResult", "SynAntSet", "eval_synant",
    "ToeflQuestion", "ToeflResult", "eval_toefl",
]
