"""Domain types shared by the whole toolkit.

All types are immutable. Alignments are plain ``frozenset`` objects of
``(source_index, target_index)`` tuples.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

log = logging.getLogger(__name__)

OTHER = 'OTHER'

# Coarse universal tags used for English and German target text.
UNIVERSAL_TAGSET = frozenset(
    ['NOUN', 'VERB', 'ADJ', 'ADV', 'PRON', 'DET', 'ADP', 'NUM', 'CONJ', 'PRT',
     '.', 'X'])

# French TreeTagger tags clipped at the first colon (VER:futu -> VER), with
# PRO -> PRON and SENT -> '.' as in the released data.
FRENCH_TAGSET = frozenset(
    ['ABR', 'ADJ', 'ADV', 'DET', 'INT', 'KON', 'NAM', 'NOM', 'NUM', 'PRON',
     'PRP', 'PUN', '.', 'SYM', 'VER'])

Alignment = frozenset  # of (src, tgt) int pairs


@dataclass(frozen=True)
class TaggedToken:
    """A target-side lemma with its coarse PoS tag, written ``lemma|POS``."""
    lemma: str
    pos: str

    def __post_init__(self):
        if not self.lemma or any(c.isspace() for c in self.lemma):
            raise ValueError('bad lemma %r' % self.lemma)
        if not self.pos or '|' in self.pos or any(c.isspace() for c in self.pos):
            raise ValueError('bad PoS tag %r' % self.pos)

    @classmethod
    def parse(cls, text):
        """Split ``text`` at its last ``|``."""
        lemma, sep, pos = text.rpartition('|')
        if not sep:
            raise ValueError('token %r has no "|" separator' % text)
        return cls(lemma, pos)

    def __str__(self):
        return '%s|%s' % (self.lemma, self.pos)


@dataclass(frozen=True)
class Placeholder:
    """Gap in the target text; ``k`` is the source index of the pronoun."""
    k: int

    def __str__(self):
        return 'REPLACE_%d' % self.k


TargetItem = Union[TaggedToken, Placeholder]


def check_tagset(tokens: Iterable[TaggedToken], tagset, strict=False):
    """Return the unknown tags among ``tokens``.

    In strict mode an unknown tag raises ``ValueError``; otherwise a warning
    is logged and the tag is kept verbatim.
    """
    unknown = sorted({tok.pos for tok in tokens if tok.pos not in tagset})
    if unknown:
        if strict:
            raise ValueError('PoS tags not in tagset: %s' % ' '.join(unknown))
        log.warning('PoS tags not in tagset: %s', ' '.join(unknown))
    return unknown


@dataclass(frozen=True)
class SubtaskSpec:
    direction: str
    source_pronouns: frozenset
    classes: tuple
    lexicon: Mapping[str, str] = field(hash=False, compare=False)
    target_tagset: frozenset = field(default=UNIVERSAL_TAGSET, hash=False, compare=False)
    # Dependency labels counted as subjects; None means no filtering.
    subject_labels: frozenset | None = field(default=None, hash=False, compare=False)

    @property
    def source_lang(self):
        return self.direction.split('-')[0]

    @property
    def target_lang(self):
        return self.direction.split('-')[1]

    def is_source_pronoun(self, word):
        return word.lower() in self.source_pronouns

    def class_of(self, word):
        """Class of a target surface form or lemma; OTHER if not in the lexicon."""
        return self.lexicon.get(word.lower(), OTHER)

    def in_lexicon(self, word):
        return word.lower() in self.lexicon

    @property
    def pronoun_classes(self):
        return tuple(c for c in self.classes if c != OTHER)


def _lexicon(classes, extra=()):
    lex = {c: c for c in classes if c != OTHER}
    lex.update(extra)
    return lex


_EN_FR = ('ce', 'elle', 'elles', 'il', 'ils', 'cela', 'on', OTHER)
_FR_EN = ('he', 'she', 'it', 'they', 'this', 'these', 'there', OTHER)
_EN_DE = ('er', 'sie', 'es', 'man', OTHER)
_DE_EN = ('he', 'she', 'it', 'they', 'you', 'this', 'these', 'there', OTHER)
_EN_DEMONSTRATIVES = {'that': 'this', 'those': 'these'}

SUBTASKS = {
    'en-fr': SubtaskSpec(
        'en-fr', frozenset(['it', 'they']), _EN_FR,
        _lexicon(_EN_FR, {"c'": 'ce', 'ça': 'cela', 'ca': 'cela', "ç'": 'cela'}),
        FRENCH_TAGSET, frozenset(['SBJ'])),
    'fr-en': SubtaskSpec(
        'fr-en', frozenset(['elle', 'elles', 'il', 'ils']), _FR_EN,
        _lexicon(_FR_EN, _EN_DEMONSTRATIVES), UNIVERSAL_TAGSET, None),
    'en-de': SubtaskSpec(
        'en-de', frozenset(['it', 'they']), _EN_DE,
        _lexicon(_EN_DE), UNIVERSAL_TAGSET, frozenset(['SBJ'])),
    'de-en': SubtaskSpec(
        'de-en', frozenset(['er', 'sie', 'es']), _DE_EN,
        _lexicon(_DE_EN, _EN_DEMONSTRATIVES), UNIVERSAL_TAGSET,
        frozenset(['SB', 'EP'])),
}


def get_subtask(direction) -> SubtaskSpec:
    try:
        return SUBTASKS[direction]
    except KeyError:
        raise ValueError('unknown direction %r (expected one of %s)'
                         % (direction, ', '.join(SUBTASKS))) from None


@dataclass(frozen=True)
class TaskInstance:
    """One segment of the shared-task data.

    ``labels[i]`` and ``replaced[i]`` belong to the i-th placeholder of
    ``target`` in left-to-right order.
    """
    labels: tuple
    replaced: tuple  # tuple of tuples of TaggedToken
    source: tuple
    target: tuple  # TaggedToken | Placeholder
    alignment: frozenset = frozenset()

    @property
    def placeholders(self):
        return [item for item in self.target if isinstance(item, Placeholder)]

    @property
    def placeholder_positions(self):
        return [i for i, item in enumerate(self.target) if isinstance(item, Placeholder)]

    def restored_target(self):
        """Target tokens with every placeholder replaced by its token group."""
        groups = iter(self.replaced)
        out = []
        for item in self.target:
            if isinstance(item, Placeholder):
                out.extend(next(groups))
            else:
                out.append(item)
        return out

    def target_lemmas(self):
        """Lemmas of the target; placeholders are kept as ``None``."""
        return [None if isinstance(t, Placeholder) else t.lemma for t in self.target]


def validate_instance(inst: TaskInstance, spec: SubtaskSpec):
    """List the invariant violations of ``inst`` under ``spec`` (empty if valid)."""
    problems = []
    holes = inst.placeholders
    if len(inst.labels) != len(holes):
        problems.append('label/placeholder count mismatch')
    if len(inst.replaced) != len(holes):
        problems.append('replaced/placeholder count mismatch')
    for hole in holes:
        if not 0 <= hole.k < len(inst.source):
            problems.append('placeholder index out of bounds')
        elif not spec.is_source_pronoun(inst.source[hole.k]):
            problems.append('placeholder %d does not point at a source pronoun' % hole.k)
    for label in inst.labels:
        if label not in spec.classes:
            problems.append('unknown label %r' % label)
    for s, t in inst.alignment:
        if not (0 <= s < len(inst.source) and 0 <= t < len(inst.target)):
            problems.append('alignment link %d-%d out of bounds' % (s, t))
            break
    return problems


@dataclass(frozen=True)
class ConfusionMatrix:
    """Gold-by-predicted counts; rows are gold classes, columns predictions."""
    classes: tuple
    counts: tuple  # tuple of row tuples

    @classmethod
    def zeros(cls, classes):
        n = len(classes)
        return cls(tuple(classes), tuple((0,) * n for _ in range(n)))

    def __add__(self, other):
        if self.classes != other.classes:
            raise ValueError('cannot merge confusion matrices over different classes')
        return ConfusionMatrix(self.classes, tuple(
            tuple(a + b for a, b in zip(r1, r2))
            for r1, r2 in zip(self.counts, other.counts)))

    def __getitem__(self, key):
        gold, pred = key
        return self.counts[self.classes.index(gold)][self.classes.index(pred)]

    @property
    def total(self):
        return sum(map(sum, self.counts))

    @property
    def trace(self):
        return sum(self.counts[i][i] for i in range(len(self.classes)))

    def gold_count(self, cls):
        return sum(self.counts[self.classes.index(cls)])

    def pred_count(self, cls):
        j = self.classes.index(cls)
        return sum(row[j] for row in self.counts)

    def recall(self, cls) -> Fraction | None:
        gold = self.gold_count(cls)
        return Fraction(self[cls, cls], gold) if gold else None

    def precision(self, cls) -> Fraction | None:
        pred = self.pred_count(cls)
        return Fraction(self[cls, cls], pred) if pred else None
