"""Official scoring: macro-averaged recall over the classes present in the
gold standard, and accuracy. Percentages are computed from exact tallies and
rounded half-up to two decimals for display."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

from .errors import EmptyGold, LengthMismatch, UnknownLabel
from .model import ConfusionMatrix


def confusion(gold, pred, classes):
    if len(gold) != len(pred):
        raise LengthMismatch('%d gold labels but %d predictions' % (len(gold), len(pred)))
    classes = tuple(classes)
    index = {c: i for i, c in enumerate(classes)}
    counts = [[0] * len(classes) for _ in classes]
    for g, p in zip(gold, pred):
        for label in (g, p):
            if label not in index:
                raise UnknownLabel('unknown label %r' % label)
        counts[index[g]][index[p]] += 1
    return ConfusionMatrix(classes, tuple(map(tuple, counts)))


def macro_recall_exact(m) -> Fraction:
    recalls = [m.recall(c) for c in m.classes]
    recalls = [r for r in recalls if r is not None]
    if not recalls:
        raise EmptyGold('no gold examples')
    return sum(recalls, Fraction(0)) / len(recalls) * 100


def accuracy_exact(m) -> Fraction:
    if not m.total:
        raise EmptyGold('no gold examples')
    return Fraction(m.trace, m.total) * 100


def macro_recall(m) -> float:
    """Mean per-class recall, in percent, over classes that occur in the gold data."""
    return float(macro_recall_exact(m))


def accuracy(m) -> float:
    return float(accuracy_exact(m))


def expected_random_macro_recall(spec) -> float:
    return 100 / len(spec.classes)


def round2(value) -> Decimal:
    """Round half-up to two decimals; exact for Fractions."""
    if isinstance(value, Fraction):
        value = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        value = Decimal(repr(value))
    return value.quantize(Decimal('0.01'), rounding=ROUND_HALF_UP)


def pct(value) -> str:
    return str(round2(value))


@dataclass
class ClassScore:
    gold: int
    predicted: int
    correct: int
    recall: Fraction | None
    precision: Fraction
    f1: Fraction
    precision_undefined: bool = False


@dataclass
class ScoreReport:
    direction: str
    macro_recall: Fraction
    accuracy: Fraction
    confusion: ConfusionMatrix
    per_class: dict = field(default_factory=dict)

    @property
    def n_examples(self):
        return self.confusion.total

    def to_dict(self):
        """JSON-friendly view; percentages as 2-decimal strings."""
        classes = {}
        for cls, s in self.per_class.items():
            classes[cls] = {
                'gold': s.gold, 'predicted': s.predicted, 'correct': s.correct,
                'recall': None if s.recall is None else pct(s.recall * 100),
                'precision': pct(s.precision * 100),
                'f1': pct(s.f1 * 100),
                'precision_undefined': s.precision_undefined,
            }
        return {
            'direction': self.direction,
            'examples': self.n_examples,
            'macro_recall': pct(self.macro_recall),
            'accuracy': pct(self.accuracy),
            'classes': classes,
            'confusion': {
                'labels': list(self.confusion.classes),
                'counts': [list(row) for row in self.confusion.counts],
            },
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_text(self, system='system'):
        lines = ['%-20s %8s %8s' % ('system', 'macro-R', 'accuracy'),
                 '%-20s %8s %8s' % (system, pct(self.macro_recall), pct(self.accuracy)),
                 '',
                 '%-8s %6s %6s %6s %8s %8s %8s' % ('class', 'gold', 'pred', 'corr',
                                                   'recall', 'prec', 'F1')]
        for cls, s in self.per_class.items():
            lines.append('%-8s %6d %6d %6d %8s %8s %8s' % (
                cls, s.gold, s.predicted, s.correct,
                '-' if s.recall is None else pct(s.recall * 100),
                pct(s.precision * 100) + ('*' if s.precision_undefined else ''),
                pct(s.f1 * 100)))
        lines.append('')
        width = max(len(c) for c in self.confusion.classes) + 1
        lines.append(' ' * width + ' '.join('%*s' % (width, c) for c in self.confusion.classes))
        for cls, row in zip(self.confusion.classes, self.confusion.counts):
            lines.append('%-*s' % (width, cls) + ' '.join('%*d' % (width, n) for n in row))
        if any(s.precision_undefined for s in self.per_class.values()):
            lines.append('')
            lines.append('* class never predicted; precision reported as 0')
        return '\n'.join(lines)


def build_report(m, direction=''):
    per_class = {}
    for cls in m.classes:
        gold, predicted, correct = m.gold_count(cls), m.pred_count(cls), m[cls, cls]
        recall = m.recall(cls)
        precision = m.precision(cls)
        undefined = precision is None
        precision = precision or Fraction(0)
        r = recall or Fraction(0)
        f1 = 2 * precision * r / (precision + r) if precision + r else Fraction(0)
        per_class[cls] = ClassScore(gold, predicted, correct, recall, precision, f1, undefined)
    return ScoreReport(direction, macro_recall_exact(m), accuracy_exact(m), m, per_class)


def flatten_labels(gold_instances, predictions):
    """Pair gold and predicted labels placeholder by placeholder."""
    if len(gold_instances) != len(predictions):
        raise LengthMismatch('%d gold instances but %d prediction lines'
                             % (len(gold_instances), len(predictions)))
    gold, pred = [], []
    for lineno, (inst, labels) in enumerate(zip(gold_instances, predictions), 1):
        if len(inst.labels) != len(labels):
            raise LengthMismatch('%d gold labels but %d predictions'
                                 % (len(inst.labels), len(labels)), lineno=lineno)
        gold.extend(inst.labels)
        pred.extend(labels)
    return gold, pred


def score_report(gold_instances, predictions, spec):
    """Score prediction label lists against gold instances."""
    gold, pred = flatten_labels(gold_instances, predictions)
    for lineno, labels in enumerate(predictions, 1):
        for label in labels:
            if label not in spec.classes:
                raise UnknownLabel('unknown label %r' % label, lineno=lineno)
    return build_report(confusion(gold, pred, spec.classes), spec.direction)
