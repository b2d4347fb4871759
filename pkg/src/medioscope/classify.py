"""One-vs-rest linear SVM over TF-IDF lemma vectors, plus its evaluation
harness: stratified k-fold cross-validation with per-class precision
(noise control) and recall / exhaustividad (silence control).

Training is a full-batch subgradient descent on the primal hinge objective

    f(w, b) = 0.5 * ||w||^2 + C * sum_i max(0, 1 - y_i (w.x_i + b))

with backtracking on the step size, so the objective decreases monotonically
at every accepted epoch and the whole procedure is deterministic. The seed
only drives fold shuffling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from random import Random
from typing import Optional, Sequence

import numpy as np

from .errors import DataError, TrainingError
from .nlp.tfidf import DocumentVector, VectorizerStats

# The closed topic set, in its stable ordinal (alphabetical) order.
TOPIC_LABELS = (
    "accidentes",
    "deportes",
    "ecología",
    "economía",
    "entretenimiento",
    "judicial",
    "política",
    "salud",
    "sociedad",
    "tecnología",
)

MODEL_FORMAT = "medioscope-svm/1"

# Reference validation scores for the ten-topic model (precision, recall).
# The labeled corpus behind them is not distributed; they are kept only so
# reports can be compared side by side in the same format.
REFERENCE_SCORES = {
    "accidentes": (0.958, 0.885),
    "deportes": (0.890, 0.981),
    "ecología": (0.714, 0.833),
    "economía": (0.644, 0.763),
    "entretenimiento": (0.778, 0.840),
    "judicial": (0.970, 0.889),
    "política": (0.917, 0.846),
    "salud": (1.000, 0.963),
    "sociedad": (0.882, 0.833),
    "tecnología": (0.947, 0.750),
}


@dataclass
class SvmParams:
    c: float = 1.0
    epochs: int = 200
    tolerance: float = 1e-6

    def to_dict(self) -> dict:
        return {"c": self.c, "epochs": self.epochs, "tolerance": self.tolerance}

    @classmethod
    def from_dict(cls, data: dict) -> "SvmParams":
        return cls(c=float(data["c"]), epochs=int(data["epochs"]), tolerance=float(data["tolerance"]))


@dataclass
class ClassifierModel:
    labels: list[str]
    vocabulary: dict[str, int]  # lemma -> dense feature index
    weights: np.ndarray  # (n_labels, n_features)
    biases: np.ndarray  # (n_labels,)
    params: SvmParams
    metadata: dict = field(default_factory=dict)
    vectorizer: Optional[VectorizerStats] = None

    def margins(self, vector: DocumentVector) -> tuple[dict[str, float], bool]:
        """Per-class margins w.x + b and whether any lemma hit the vocabulary."""
        x = np.zeros(len(self.vocabulary))
        matched = False
        for lemma, weight in vector.entries.items():
            idx = self.vocabulary.get(lemma)
            if idx is not None:
                x[idx] = weight
                matched = True
        raw = self.weights @ x + self.biases
        return {label: float(raw[i]) for i, label in enumerate(self.labels)}, matched

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "labels": self.labels,
            "vocabulary": self.vocabulary,
            "weights": [list(map(float, row)) for row in self.weights],
            "biases": [float(b) for b in self.biases],
            "params": self.params.to_dict(),
            "metadata": self.metadata,
            "vectorizer": self.vectorizer.to_dict() if self.vectorizer else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClassifierModel":
        if data.get("format") != MODEL_FORMAT:
            raise DataError(f"unsupported classifier model format: {data.get('format')!r}")
        vec = data.get("vectorizer")
        return cls(
            labels=list(data["labels"]),
            vocabulary={k: int(v) for k, v in data["vocabulary"].items()},
            weights=np.array(data["weights"], dtype=float).reshape(
                len(data["labels"]), len(data["vocabulary"])
            ),
            biases=np.array(data["biases"], dtype=float),
            params=SvmParams.from_dict(data["params"]),
            metadata=dict(data.get("metadata", {})),
            vectorizer=VectorizerStats.from_dict(vec) if vec else None,
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True))

    @classmethod
    def load(cls, path: str | Path) -> "ClassifierModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class Classification:
    label: str
    margins: dict[str, float]
    low_confidence: bool


def _objective(x: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, c: float) -> float:
    margins = y * (x @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins).sum()
    return 0.5 * float(w @ w) + c * float(hinge)


def _train_binary(x: np.ndarray, y: np.ndarray, params: SvmParams) -> tuple[np.ndarray, float]:
    n, d = x.shape
    w = np.zeros(d)
    b = 0.0
    obj = _objective(x, y, w, b, params.c)
    step = 1.0 / max(1.0, params.c * n)
    for _ in range(params.epochs):
        margins = y * (x @ w + b)
        active = margins < 1.0
        grad_w = w - params.c * (x[active] * y[active, None]).sum(axis=0)
        grad_b = -params.c * float(y[active].sum())
        eta = step
        accepted = False
        while eta > 1e-14:
            w_new = w - eta * grad_w
            b_new = b - eta * grad_b
            new_obj = _objective(x, y, w_new, b_new, params.c)
            if new_obj <= obj:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            break
        w, b = w_new, b_new
        improved = obj - new_obj
        obj = new_obj
        step = min(eta * 2.0, 1.0)
        if improved <= params.tolerance * max(1.0, abs(obj)):
            break
    return w, b


def train_svm(
    labeled: Sequence[tuple[DocumentVector, str]],
    params: Optional[SvmParams] = None,
    vectorizer: Optional[VectorizerStats] = None,
) -> ClassifierModel:
    """Train one linear machine per label on the shared vocabulary."""
    params = params or SvmParams()
    if not labeled:
        raise TrainingError("cannot train on an empty corpus")
    labels = sorted({label for _, label in labeled})
    if len(labels) < 2:
        raise TrainingError("training corpus must contain at least two distinct labels")
    for vector, _ in labeled:
        if not vector.entries:
            raise TrainingError(f"document {vector.doc_id!r} has an empty vector")

    lemmas = sorted({lemma for vector, _ in labeled for lemma in vector.entries})
    vocabulary = {lemma: i for i, lemma in enumerate(lemmas)}
    x = np.zeros((len(labeled), len(vocabulary)))
    for row, (vector, _) in enumerate(labeled):
        for lemma, weight in vector.entries.items():
            x[row, vocabulary[lemma]] = weight

    weights = np.zeros((len(labels), len(vocabulary)))
    biases = np.zeros(len(labels))
    for i, label in enumerate(labels):
        y = np.array([1.0 if lab == label else -1.0 for _, lab in labeled])
        weights[i], biases[i] = _train_binary(x, y, params)

    return ClassifierModel(
        labels=labels,
        vocabulary=vocabulary,
        weights=weights,
        biases=biases,
        params=params,
        metadata={
            "corpus_size": len(labeled),
            "trained_at": datetime.now(timezone.utc).isoformat(),
        },
        vectorizer=vectorizer,
    )


def classify(model: ClassifierModel, vector: DocumentVector) -> Classification:
    """Argmax over per-class margins; ties break by label ordinal order."""
    margins, matched = model.margins(vector)
    best_label = model.labels[0]
    best_margin = -math.inf
    for label in model.labels:
        if margins[label] > best_margin:
            best_margin = margins[label]
            best_label = label
    return Classification(label=best_label, margins=margins, low_confidence=not matched)


def precision_recall(
    confusion: Sequence[Sequence[int]],
) -> list[tuple[Optional[float], Optional[float]]]:
    """Per-class (precision, recall) from a confusion matrix.

    Rows are actual classes, columns predicted. Zero denominators yield None
    rather than 0 so macro averages are not silently deflated.
    """
    n = len(confusion)
    for row in confusion:
        if len(row) != n:
            raise DataError("confusion matrix must be square")
        for value in row:
            if int(value) != value or value < 0:
                raise DataError("confusion matrix entries must be non-negative integers")
    results: list[tuple[Optional[float], Optional[float]]] = []
    for i in range(n):
        predicted = sum(confusion[r][i] for r in range(n))
        actual = sum(confusion[i])
        precision = confusion[i][i] / predicted if predicted > 0 else None
        recall = confusion[i][i] / actual if actual > 0 else None
        results.append((precision, recall))
    return results


@dataclass
class EvalReport:
    labels: list[str]
    confusion: list[list[int]]  # rows actual, columns predicted
    fold_count: int
    seed: int
    warnings: list[str] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def support(self) -> dict[str, int]:
        return {label: sum(self.confusion[i]) for i, label in enumerate(self.labels)}

    def per_class(self) -> dict[str, tuple[Optional[float], Optional[float]]]:
        scores = precision_recall(self.confusion)
        return {label: scores[i] for i, label in enumerate(self.labels)}

    def macro(self) -> tuple[Optional[float], Optional[float]]:
        scores = self.per_class().values()
        precisions = [p for p, _ in scores if p is not None]
        recalls = [r for _, r in scores if r is not None]
        macro_p = sum(precisions) / len(precisions) if precisions else None
        macro_r = sum(recalls) / len(recalls) if recalls else None
        return macro_p, macro_r

    def to_dict(self) -> dict:
        per_class = self.per_class()
        macro_p, macro_r = self.macro()
        return {
            "labels": self.labels,
            "confusion": self.confusion,
            "fold_count": self.fold_count,
            "seed": self.seed,
            "per_class": {
                label: {
                    "precision": per_class[label][0],
                    "recall": per_class[label][1],
                    "support": self.support[label],
                }
                for label in self.labels
            },
            "macro_precision": macro_p,
            "macro_recall": macro_r,
            "warnings": self.warnings,
            "metadata": self.metadata,
        }


def cross_validate(
    labeled: Sequence[tuple[DocumentVector, str]],
    folds: int = 10,
    seed: int = 0,
    params: Optional[SvmParams] = None,
) -> EvalReport:
    """Stratified k-fold CV; the confusion matrix is pooled over all folds."""
    if folds < 2:
        raise DataError("folds must be >= 2")
    if len(labeled) < folds:
        raise DataError(f"corpus of {len(labeled)} documents cannot fill {folds} folds")

    labels = sorted({label for _, label in labeled})
    warnings: list[str] = []
    rng = Random(seed)
    assignment: dict[int, int] = {}
    next_fold = 0
    for label in labels:
        members = [i for i, (_, lab) in enumerate(labeled) if lab == label]
        rng.shuffle(members)
        if len(members) < folds:
            warnings.append(
                f"class {label!r} has {len(members)} members for {folds} folds; distributed best-effort"
            )
        for member in members:
            assignment[member] = next_fold % folds
            next_fold += 1

    index = {label: i for i, label in enumerate(labels)}
    confusion = [[0] * len(labels) for _ in labels]
    for fold in range(folds):
        train = [labeled[i] for i in range(len(labeled)) if assignment[i] != fold]
        held_out = [i for i in range(len(labeled)) if assignment[i] == fold]
        if not held_out:
            continue
        model = train_svm(train, params=params)
        for i in held_out:
            vector, actual = labeled[i]
            predicted = classify(model, vector).label
            if predicted not in index:  # cannot happen: model labels ⊆ labels
                continue
            confusion[index[actual]][index[predicted]] += 1

    return EvalReport(
        labels=labels,
        confusion=confusion,
        fold_count=folds,
        seed=seed,
        warnings=warnings,
        metadata={"metric_pooling": "confusion pooled over folds", "corpus_size": len(labeled)},
    )


def _format_pct(value: Optional[float], localized: bool) -> str:
    if value is None:
        return "-"
    pct = value * 100.0
    text = "100%" if abs(pct - 100.0) < 0.05 else f"{pct:.1f}%"
    if localized:
        text = text.replace(".", ",")
    return text


def format_report_table(
    rows: dict[str, tuple[Optional[float], Optional[float]]],
    localized: bool = False,
) -> str:
    """Aligned Temas / Precisión / Exhaustividad table, one decimal."""
    header = ("Temas", "Precisión", "Exhaustividad")
    body = [
        (label.capitalize(), _format_pct(p, localized), _format_pct(r, localized))
        for label, (p, r) in rows.items()
    ]
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(3)]
    lines = ["\t".join(cell.ljust(widths[i]) for i, cell in enumerate(row)) for row in [header, *body]]
    return "\n".join(lines)


def reference_table(localized: bool = False) -> str:
    return format_report_table(dict(REFERENCE_SCORES), localized=localized)
