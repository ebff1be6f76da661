"""Turn aligned, tagged bitext into task instances."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import MissingLabels
from .model import OTHER, Placeholder, TaskInstance
from .parallel import parallel_map


@dataclass(frozen=True)
class AnnotatedSegment:
    source: tuple
    target: tuple  # TaggedToken
    alignment: frozenset
    dep_labels: tuple | None = None

    def __post_init__(self):
        if self.dep_labels is not None and len(self.dep_labels) != len(self.source):
            raise ValueError('%d dependency labels for %d source tokens'
                             % (len(self.dep_labels), len(self.source)))

    def links_from(self, src_idx):
        return sorted(t for s, t in self.alignment if s == src_idx)


def find_source_pronouns(seg, spec):
    return [i for i, word in enumerate(seg.source) if spec.is_source_pronoun(word)]


def filter_subjects(indices, labels, keep_set):
    """Keep the indices whose dependency label is in ``keep_set``.

    ``keep_set=None`` disables filtering (French source pronouns are all
    unambiguous subjects).
    """
    if keep_set is None:
        return list(indices)
    if labels is None:
        raise MissingLabels('subject filtering needs dependency labels')
    return [i for i in indices if labels[i] in keep_set]


def map_target_class(aligned_tokens, spec):
    """Pick the class and the placeholder token among the tokens aligned to a pronoun.

    The leftmost token whose lemma is in the class lexicon wins; otherwise
    the pronoun is OTHER and the shortest token (leftmost on ties) is used.
    """
    if not aligned_tokens:
        raise ValueError('no aligned target tokens')
    for tok in aligned_tokens:
        if spec.in_lexicon(tok.lemma):
            return spec.class_of(tok.lemma), [tok]
    shortest = min(aligned_tokens, key=lambda tok: len(tok.lemma))
    return OTHER, [shortest]


def insert_placeholder_unaligned(seg, src_idx):
    """Target position at which to insert a gap for an unaligned pronoun.

    Searches outwards from ``src_idx`` for the nearest aligned source word,
    looking left before right at equal distance. A word on the left puts the
    gap after its rightmost target link, a word on the right before its
    leftmost one. Without any link the gap goes to the proportional position.
    """
    linked = {}
    for s, t in seg.alignment:
        linked.setdefault(s, []).append(t)
    n_src = len(seg.source)
    for dist in range(1, n_src):
        left, right = src_idx - dist, src_idx + dist
        if left >= 0 and left in linked:
            return max(linked[left]) + 1
        if right < n_src and right in linked:
            return min(linked[right])
        if left < 0 and right >= n_src:
            break
    if not n_src:
        return 0
    # src_idx * |target| / |source|, rounded half-up in integer arithmetic
    n_tgt = len(seg.target)
    return min((2 * src_idx * n_tgt + n_src) // (2 * n_src), n_tgt)


def extract_segment(seg, spec, subject_filter=True):
    """Build the instance for one segment, or None if it has no pronoun gaps."""
    indices = find_source_pronouns(seg, spec)
    if subject_filter:
        indices = filter_subjects(indices, seg.dep_labels, spec.subject_labels)
    if not indices:
        return None

    replace_at = {}   # target position -> (src_idx, label, replaced)
    insert_at = {}    # target position -> [(src_idx, label, replaced)]
    for k in indices:
        tokens = [(t, seg.target[t]) for t in seg.links_from(k) if t not in replace_at]
        if tokens:
            label, (chosen,) = map_target_class([tok for _, tok in tokens], spec)
            pos = next(t for t, tok in tokens if tok == chosen)
            replace_at[pos] = (k, label, (chosen,))
        else:
            pos = insert_placeholder_unaligned(seg, k)
            insert_at.setdefault(pos, []).append((k, OTHER, ()))

    target, labels, replaced = [], [], []
    new_index = []
    for pos in range(len(seg.target) + 1):
        for k, label, group in insert_at.get(pos, ()):
            target.append(Placeholder(k))
            labels.append(label)
            replaced.append(group)
        if pos == len(seg.target):
            break
        new_index.append(len(target))
        if pos in replace_at:
            k, label, group = replace_at[pos]
            target.append(Placeholder(k))
            labels.append(label)
            replaced.append(group)
        else:
            target.append(seg.target[pos])
    alignment = frozenset((s, new_index[t]) for s, t in seg.alignment)
    return TaskInstance(tuple(labels), tuple(replaced), tuple(seg.source),
                        tuple(target), alignment)


def plain_instance(seg):
    """A segment without gaps, kept for document context."""
    return TaskInstance((), (), tuple(seg.source), tuple(seg.target),
                        frozenset(seg.alignment))


def _extract_document(doc, spec, subject_filter, lm_corpus_mode):
    out = []
    for seg in doc:
        inst = extract_segment(seg, spec, subject_filter)
        if inst is not None:
            out.append(inst)
        elif lm_corpus_mode:
            out.append(plain_instance(seg))
    return out


def extract_examples(documents, spec, lm_corpus_mode=False, subject_filter=True, jobs=1):
    """Extract instances from a list of documents (lists of AnnotatedSegment).

    With ``lm_corpus_mode`` segments without pronouns are kept as gap-free
    lines so that whole documents are written out. Output order follows the
    input regardless of ``jobs``.
    """
    per_doc = parallel_map(_extract_document, documents, jobs,
                           spec=spec, subject_filter=subject_filter,
                           lm_corpus_mode=lm_corpus_mode)
    return [inst for doc in per_doc for inst in doc]


def class_frequency_table(instances, spec):
    counts = Counter({c: 0 for c in spec.classes})
    for inst in instances:
        counts.update(inst.labels)
    return dict(counts)


def filtering_report(documents, spec, jobs=1):
    """Per-class counts before and after subject filtering."""
    before = class_frequency_table(
        extract_examples(documents, spec, subject_filter=False, jobs=jobs), spec)
    after = class_frequency_table(
        extract_examples(documents, spec, subject_filter=True, jobs=jobs), spec)
    return before, after


def format_frequency_table(spec, before, after=None):
    lines = ['class\tbefore\tafter' if after is not None else 'class\tcount']
    for cls in spec.classes:
        if after is not None:
            lines.append('%s\t%d\t%d' % (cls, before[cls], after[cls]))
        else:
            lines.append('%s\t%d' % (cls, before[cls]))
    return '\n'.join(lines)
