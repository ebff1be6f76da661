"""Word-alignment symmetrisation and alignment quality evaluation.

Both input alignments are sets of ``(source, target)`` links, i.e. a
target-to-source aligner's output must be inverted before it is passed in
(see :func:`invert`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .errors import IndexOutOfBounds, LengthMismatch

# Koehn's neighbourhood order: horizontal/vertical first, then diagonals.
NEIGHBOURS = ((-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1))


class Heuristic(enum.Enum):
    INTERSECTION = 'intersection'
    UNION = 'union'
    GROW_DIAG = 'grow-diag'
    GROW_DIAG_FINAL = 'grow-diag-final'
    GROW_DIAG_FINAL_AND = 'grow-diag-final-and'

    @classmethod
    def from_name(cls, name):
        name = ALIASES.get(name, name)
        return cls(name)


ALIASES = {
    'gd': 'grow-diag', 'gdf': 'grow-diag-final', 'gdfa': 'grow-diag-final-and',
    '∩': 'intersection', '∪': 'union', 'inter': 'intersection',
}


def invert(links):
    return frozenset((t, s) for s, t in links)


def _check_bounds(links, src_len, tgt_len):
    for s, t in links:
        if not (0 <= s < src_len and 0 <= t < tgt_len):
            raise IndexOutOfBounds('link %d-%d outside a %dx%d segment'
                                   % (s, t, src_len, tgt_len))


def _grow_diag(alignment, union):
    """Add union links next to current links until nothing changes.

    Candidates are visited in sorted order on every sweep and the alignment
    is updated in place, so the result depends only on the two sets.
    """
    src_aligned = {s for s, _ in alignment}
    tgt_aligned = {t for _, t in alignment}
    candidates = sorted(union - alignment)
    added = True
    while added:
        added = False
        remaining = []
        for s, t in candidates:
            if (s not in src_aligned or t not in tgt_aligned) and any(
                    (s + ds, t + dt) in alignment for ds, dt in NEIGHBOURS):
                alignment.add((s, t))
                src_aligned.add(s)
                tgt_aligned.add(t)
                added = True
            else:
                remaining.append((s, t))
        candidates = remaining


def _final(alignment, union, both):
    src_aligned = {s for s, _ in alignment}
    tgt_aligned = {t for _, t in alignment}
    for s, t in sorted(union - alignment):
        s_free, t_free = s not in src_aligned, t not in tgt_aligned
        if (s_free and t_free) if both else (s_free or t_free):
            alignment.add((s, t))
            src_aligned.add(s)
            tgt_aligned.add(t)


def symmetrize(forward, backward, heuristic, src_len=None, tgt_len=None):
    """Combine two directional alignments into one.

    ``grow-diag-final`` runs the ``-and`` pass before the plain ``final``
    pass, so links between two unaligned words are always taken first. This
    keeps gdfa a subset of gdf.
    """
    if isinstance(heuristic, str):
        heuristic = Heuristic.from_name(heuristic)
    forward, backward = frozenset(forward), frozenset(backward)
    if src_len is not None and tgt_len is not None:
        _check_bounds(forward, src_len, tgt_len)
        _check_bounds(backward, src_len, tgt_len)

    union = forward | backward
    if heuristic is Heuristic.UNION:
        return union
    alignment = set(forward & backward)
    if heuristic is Heuristic.INTERSECTION:
        return frozenset(alignment)

    _grow_diag(alignment, union)
    if heuristic in (Heuristic.GROW_DIAG_FINAL, Heuristic.GROW_DIAG_FINAL_AND):
        _final(alignment, union, both=True)
    if heuristic is Heuristic.GROW_DIAG_FINAL:
        _final(alignment, union, both=False)
    return frozenset(alignment)


@dataclass(frozen=True)
class AlignmentScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, correct, hyp_size, gold_size):
        p = Fraction(correct, hyp_size) if hyp_size else Fraction(1)
        r = Fraction(correct, gold_size) if gold_size else Fraction(1)
        f = 2 * p * r / (p + r) if p + r else Fraction(0)
        return cls(float(p), float(r), float(f))

    def row(self):
        return '%.2f\t%.2f\t%.2f' % (self.precision, self.recall, self.f1)


def evaluate_alignment(hyp, gold, pronoun_links=None):
    """Score ``hyp`` against ``gold``; also on the pronoun subset if a predicate is given.

    Empty hypotheses get precision 1.0 and empty gold sets recall 1.0.
    """
    hyp, gold = frozenset(hyp), frozenset(gold)
    overall = AlignmentScore.from_counts(len(hyp & gold), len(hyp), len(gold))
    if pronoun_links is None:
        return overall, None
    return overall, AlignmentScore.from_counts(*_subset_counts(hyp, gold, pronoun_links))


def _subset_counts(hyp, gold, predicate):
    h = {link for link in hyp if predicate(link)}
    g = {link for link in gold if predicate(link)}
    return len(h & g), len(h), len(g)


def evaluate_corpus(hyps, golds, pronoun_positions=None):
    """Micro-averaged scores over a corpus of segments.

    ``pronoun_positions`` gives, per segment, the source indices whose links
    make up the pronoun subset.
    """
    if len(hyps) != len(golds):
        raise LengthMismatch('%d hypothesis segments but %d gold segments'
                             % (len(hyps), len(golds)))
    totals = [0, 0, 0]
    pron = [0, 0, 0]
    for i, (hyp, gold) in enumerate(zip(hyps, golds)):
        hyp, gold = frozenset(hyp), frozenset(gold)
        totals[0] += len(hyp & gold)
        totals[1] += len(hyp)
        totals[2] += len(gold)
        if pronoun_positions is not None:
            positions = set(pronoun_positions[i])
            counts = _subset_counts(hyp, gold, lambda link: link[0] in positions)
            for j in range(3):
                pron[j] += counts[j]
    overall = AlignmentScore.from_counts(*totals)
    if pronoun_positions is None:
        return overall, None
    return overall, AlignmentScore.from_counts(*pron)
