"""Language-model gap filler used as the shared-task baseline.

Every placeholder is filled with a pronoun (one lemma per class), one of a
fixed list of frequent non-pronoun lemmas, or nothing at all (NONE). The
assignment with the highest LM score wins; each NONE adds ``none_penalty``
(a log-domain value <= 0) to the score to offset the n-gram preference for
short strings.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .errors import UntrainedModel
from .evaluation import confusion, macro_recall_exact
from .lm import BOS, EOS
from .model import OTHER, Placeholder
from .parallel import parallel_map

NONE = None  # filler value meaning "insert nothing"
NONE_TOKEN = '<none>'  # its spelling in candidate files
EXHAUSTIVE_LIMIT = 10_000
BEAM_WIDTH = 8
DEFAULT_TOP_K = 20
DEFAULT_GRID = tuple(-0.5 * i for i in range(9))  # 0, -0.5, ..., -4.0


def parse_grid(text):
    """``start:stop:step`` (e.g. ``0:-4:0.5``) to a tuple of penalties, both ends included."""
    start, stop, step = (float(x) for x in text.split(':'))
    step = abs(step)
    if step == 0:
        raise ValueError('grid step must be non-zero')
    direction = -1 if stop < start else 1
    n = int(round(abs(stop - start) / step))
    return tuple(start + direction * step * i for i in range(n + 1))


@dataclass(frozen=True)
class CandidateSet:
    pronoun_fillers: tuple  # (lemma, class)
    other_fillers: tuple    # (lemma, OTHER)
    include_none: bool = True

    @property
    def fillers(self):
        out = list(self.pronoun_fillers) + list(self.other_fillers)
        if self.include_none:
            out.append((NONE, OTHER))
        return out

    def covers(self, spec):
        return {c for _, c in self.pronoun_fillers} == set(spec.pronoun_classes)

    def dumps(self):
        return ''.join('%s\t%s\n' % (NONE_TOKEN if lemma is NONE else lemma, cls)
                       for lemma, cls in self.fillers)

    @classmethod
    def loads(cls, text, spec):
        pronouns, others, none = [], [], False
        for line in text.splitlines():
            if not line.strip():
                continue
            lemma, _, label = line.partition('\t')
            if lemma == NONE_TOKEN:
                none = True
            elif label != OTHER:
                if label not in spec.classes:
                    raise ValueError('unknown class %r in candidate list' % label)
                pronouns.append((lemma, label))
            else:
                others.append((lemma, OTHER))
        return cls(tuple(pronouns), tuple(others), none)


def build_candidate_set(instances, spec, k=DEFAULT_TOP_K, include_none=True):
    """Pronoun fillers for every class plus the ``k`` most frequent OTHER lemmas.

    Only training instances should be passed here; lemmas belonging to a
    pronoun class (e.g. a variant spelling) are never OTHER fillers.
    """
    pronouns = tuple((c, c) for c in spec.pronoun_classes)
    freq = Counter()
    for inst in instances:
        for label, group in zip(inst.labels, inst.replaced):
            if label == OTHER:
                freq.update(tok.lemma for tok in group if not spec.in_lexicon(tok.lemma))
    ranked = sorted(freq.items(), key=lambda item: (-item[1], item[0]))
    others = tuple((lemma, OTHER) for lemma, _ in ranked[:k])
    return CandidateSet(pronouns, others, include_none)


def _fill(lemmas, choice):
    """Replace the None slots of ``lemmas`` by the chosen fillers (dropping NONE)."""
    filled = iter(choice)
    out = []
    for lemma in lemmas:
        if lemma is None:
            filler = next(filled)
            if filler is not NONE:
                out.append(filler)
        else:
            out.append(lemma)
    return out


def _assignment_score(model, lemmas, fillers, combo, none_penalty):
    choice = [fillers[i][0] for i in combo]
    n_none = sum(1 for f in choice if f is NONE)
    return model.score(_fill(lemmas, choice)) + none_penalty * n_none


def _advance(model, total, history, words, keep):
    history = list(history)
    for w in words:
        total += model.logprob(w, history)
        history.append(w)
    return total, tuple(history[len(history) - min(keep, len(history)):])


def _pieces(lemmas):
    """Split a lemma list at its gaps: n_slots + 1 runs of fixed lemmas."""
    pieces = [[]]
    for lemma in lemmas:
        if lemma is None:
            pieces.append([])
        else:
            pieces[-1].append(lemma)
    return pieces


def exhaustive_search(model, lemmas, fillers, none_penalty):
    """Best index tuple over all filler combinations; ties go to the lexicographically first.

    Combinations are visited depth first in lexicographic order and share
    the scores of their common prefix; each total is accumulated left to
    right exactly as ``model.score`` would.
    """
    keep = max(model.order - 1, 0)
    pieces = _pieces(lemmas)
    n_slots = len(pieces) - 1
    best = [None, -math.inf]

    def walk(slot, total, history, combo, n_none):
        if slot == n_slots:
            total, _ = _advance(model, total, history, [EOS], keep)
            total += none_penalty * n_none
            if best[0] is None or total > best[1]:
                best[:] = [combo, total]
            return
        for idx, (filler, _) in enumerate(fillers):
            words = pieces[slot + 1] if filler is NONE else [filler] + pieces[slot + 1]
            t, h = _advance(model, total, history, words, keep)
            walk(slot + 1, t, h, combo + (idx,), n_none + (filler is NONE))

    total, history = _advance(model, 0.0, (BOS,), pieces[0], keep)
    walk(0, total, history, (), 0)
    return best[0]


def beam_search(model, lemmas, fillers, none_penalty, width=BEAM_WIDTH):
    """Left-to-right beam over the slots with LM-state recombination.

    Partial hypotheses are scored up to the next slot; survivors are rescored
    in full so the final choice uses exactly the exhaustive objective.
    """
    keep = max(model.order - 1, 0)

    def advance(score, history, words):
        return _advance(model, score, history, words, keep)

    n = len(lemmas)
    slots = [i for i, w in enumerate(lemmas) if w is None] + [n]
    score, history = advance(0.0, (BOS,), lemmas[:slots[0]])
    beam = [(score, (), history)]
    for slot, nxt in zip(slots, slots[1:]):
        tail = lemmas[slot + 1:nxt]
        states = {}
        for score, combo, history in beam:
            for idx, (filler, _) in enumerate(fillers):
                if filler is NONE:
                    s, h = advance(score + none_penalty, history, tail)
                else:
                    s, h = advance(score, history, [filler] + tail)
                old = states.get(h)
                cand = (s, combo + (idx,), h)
                if old is None or (s, _neg(cand[1])) > (old[0], _neg(old[1])):
                    states[h] = cand
        beam = sorted(states.values(), key=lambda c: (-c[0], c[1]))[:width]

    best, best_score = None, -math.inf
    for combo in sorted(c[1] for c in beam):
        s = _assignment_score(model, lemmas, fillers, combo, none_penalty)
        if best is None or s > best_score:
            best, best_score = combo, s
    return best


def _neg(combo):
    return tuple(-i for i in combo)


def fill_placeholders(model, instance, candidates, none_penalty=0.0, search='auto'):
    """Choose a filler for every placeholder of ``instance``.

    ``search`` is ``'exhaustive'``, ``'beam'`` or ``'auto'`` (exhaustive up to
    10,000 combinations). Returns ``(filler, class)`` pairs in placeholder
    order; the filler is ``None`` for NONE.
    """
    if model is None or not getattr(model, 'trained', False):
        raise UntrainedModel('language model has not been trained')
    lemmas = [None if isinstance(t, Placeholder) else t.lemma for t in instance.target]
    n_slots = lemmas.count(None)
    if not n_slots:
        return []
    fillers = candidates.fillers
    if search == 'auto':
        search = 'exhaustive' if len(fillers) ** n_slots <= EXHAUSTIVE_LIMIT else 'beam'
    if search == 'exhaustive':
        combo = exhaustive_search(model, lemmas, fillers, none_penalty)
    elif search == 'beam':
        combo = beam_search(model, lemmas, fillers, none_penalty)
    else:
        raise ValueError('unknown search %r' % search)
    return [fillers[i] for i in combo]


def _predict_one(instance, model, candidates, none_penalty, search):
    return fill_placeholders(model, instance, candidates, none_penalty, search)


def predict(model, instances, candidates, none_penalty=0.0, search='auto', jobs=1):
    """Fillers for every instance, in input order."""
    return parallel_map(_predict_one, instances, jobs, model=model,
                        candidates=candidates, none_penalty=none_penalty, search=search)


def predicted_labels(filled):
    return [[cls for _, cls in choice] for choice in filled]


def sweep_none_penalty(model, dev, candidates, spec, grid=DEFAULT_GRID, jobs=1):
    """Dev macro-averaged recall (exact, in percent) for every grid value."""
    gold = [label for inst in dev for label in inst.labels]
    results = []
    for penalty in grid:
        filled = predict(model, dev, candidates, penalty, jobs=jobs)
        pred = [label for labels in predicted_labels(filled) for label in labels]
        results.append((penalty, macro_recall_exact(confusion(gold, pred, spec.classes))))
    return results


def tune_none_penalty(model, dev, candidates, spec, grid=DEFAULT_GRID, jobs=1):
    """Grid value with the best dev macro-averaged recall; ties go to the value closest to 0."""
    results = sweep_none_penalty(model, dev, candidates, spec, grid, jobs)
    best = max(results, key=lambda r: (r[1], r[0]))
    return best[0]


def lm_training_corpus(instances):
    """Lemma sequences of the instances with the gaps restored."""
    return [[tok.lemma for tok in inst.restored_target()] for inst in instances]

