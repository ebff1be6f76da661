"""Word n-gram language model over target lemmata.

Interpolated modified Kneser-Ney smoothing (Chen & Goodman discounts); when
the count-of-counts needed for the discounts are missing, as happens on very
small corpora, the model falls back to interpolated Witten-Bell. Both end in
a uniform distribution over the vocabulary plus ``</s>`` and ``<unk>``, so
every conditional distribution sums to one.

Log-probabilities are natural logarithms.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict

from .errors import EmptyCorpus, UntrainedModel

BOS, EOS, UNK = '<s>', '</s>', '<unk>'
FORMAT_NAME = 'pronpred-ngram'
FORMAT_VERSION = 1


def kn_discounts(count_of_counts):
    """Modified Kneser-Ney discounts (D1, D2, D3+) or None if undefined."""
    n1, n2, n3, n4 = (count_of_counts.get(i, 0) for i in (1, 2, 3, 4))
    if min(n1, n2, n3, n4) == 0:
        return None
    y = n1 / (n1 + 2 * n2)
    d = (1 - 2 * y * n2 / n1, 2 - 3 * y * n3 / n2, 3 - 4 * y * n4 / n3)
    if not all(0 < di <= i + 1 for i, di in enumerate(d)):
        return None
    return d


class _Context:
    __slots__ = ('counts', 'total', 'backoff')

    def __init__(self, counts, total, backoff):
        self.counts = counts
        self.total = total
        self.backoff = backoff


class NGramModel:
    """An order-``n`` interpolated language model.

    ``smoothing`` is ``'auto'`` (Kneser-Ney when its discounts are defined,
    else Witten-Bell), ``'kn'`` or ``'wb'``. Tokens seen fewer than
    ``min_count`` times are trained as ``<unk>``.
    """

    def __init__(self, order=5, smoothing='auto', min_count=1):
        if order < 1:
            raise ValueError('order must be at least 1')
        if smoothing not in ('auto', 'kn', 'wb'):
            raise ValueError('unknown smoothing %r' % smoothing)
        self.order = order
        self.requested_smoothing = smoothing
        self.min_count = min_count
        self.smoothing = None
        self.vocab = frozenset()
        self.raw = {}
        self.discounts = {}
        self._ctx = {}
        self._cache = {}

    def __getstate__(self):
        state = dict(self.__dict__)
        state['_cache'] = {}
        return state

    @property
    def trained(self):
        return bool(self.raw)

    # -- training ------------------------------------------------------------

    def fit(self, corpus):
        """Train on an iterable of lemma sequences; returns ``self``."""
        corpus = [list(sent) for sent in corpus]
        if not any(corpus):
            raise EmptyCorpus('cannot train a language model on an empty corpus')
        freq = Counter(w for sent in corpus for w in sent)
        keep = {w for w, c in freq.items() if c >= self.min_count}
        raw = {k: Counter() for k in range(1, self.order + 1)}
        for sent in corpus:
            padded = [BOS] + [w if w in keep else UNK for w in sent] + [EOS]
            for i in range(1, len(padded)):
                for k in range(1, min(self.order, i + 1) + 1):
                    raw[k][tuple(padded[i - k + 1:i + 1])] += 1
        self._build(raw)
        return self

    def _build(self, raw):
        self.raw = {k: dict(v) for k, v in raw.items()}
        self._cache = {}
        words = {g[0] for g in raw[1]}
        self.vocab = frozenset(words | {EOS, UNK})
        self.smoothing = self.requested_smoothing
        if self.smoothing in ('auto', 'kn'):
            adjusted = self._adjusted_counts()
            discounts = {}
            for k, grams in adjusted.items():
                d = kn_discounts(Counter(c for c in grams.values() if c <= 4))
                if d is None:
                    break
                discounts[k] = d
            if len(discounts) == self.order:
                self.smoothing = 'kn'
                self.discounts = discounts
                self._ctx = self._kn_contexts(adjusted)
                return
            if self.smoothing == 'kn':
                raise ValueError('Kneser-Ney discounts undefined for this corpus')
        self.smoothing = 'wb'
        self.discounts = {}
        self._ctx = self._wb_contexts()

    def _adjusted_counts(self):
        n = self.order
        adjusted = {n: dict(self.raw[n])}
        for k in range(n - 1, 0, -1):
            left = Counter(g[1:] for g in self.raw[k + 1])
            adjusted[k] = {g: (c if g[0] == BOS else left[g])
                           for g, c in self.raw[k].items()}
        return adjusted

    def _kn_contexts(self, adjusted):
        ctx = {}
        for k, grams in adjusted.items():
            d1, d2, d3 = self.discounts[k]
            by_hist = defaultdict(dict)
            for g, c in grams.items():
                if c > 0:
                    by_hist[g[:-1]][g[-1]] = c - (d1 if c == 1 else d2 if c == 2 else d3)
            level = {}
            for h, disc in by_hist.items():
                total = sum(grams[h + (w,)] for w in disc)
                mass = total - math.fsum(disc.values())
                level[h] = _Context({w: v / total for w, v in disc.items()},
                                    total, mass / total)
            ctx[k] = level
        return ctx

    def _wb_contexts(self):
        ctx = {}
        for k, grams in self.raw.items():
            by_hist = defaultdict(dict)
            for g, c in grams.items():
                by_hist[g[:-1]][g[-1]] = c
            level = {}
            for h, counts in by_hist.items():
                total = sum(counts.values())
                types = len(counts)
                level[h] = _Context({w: c / (total + types) for w, c in counts.items()},
                                    total, types / (total + types))
            ctx[k] = level
        return ctx

    # -- querying ------------------------------------------------------------

    def _require(self):
        if not self.trained:
            raise UntrainedModel('language model has not been trained')

    def map_word(self, word):
        return word if word in self.vocab and word != BOS else UNK

    def prob(self, word, history=()):
        """P(word | history); ``history`` may start with ``<s>``."""
        self._require()
        word = EOS if word == EOS else self.map_word(word)
        history = tuple(history)
        history = history[len(history) - min(len(history), self.order - 1):]
        hist = tuple(h if h == BOS else self.map_word(h) for h in history)
        key = (word, hist)
        p = self._cache.get(key)
        if p is None:
            p = 1.0 / len(self.vocab)
            for k in range(1, len(hist) + 2):
                context = self._ctx[k].get(hist[len(hist) - (k - 1):])
                if context is not None:
                    p = context.counts.get(word, 0.0) + context.backoff * p
            self._cache[key] = p
        return p

    def logprob(self, word, history=()):
        return math.log(self.prob(word, history))

    def distribution(self, history=()):
        """The full conditional distribution over the predictable vocabulary."""
        return {w: self.prob(w, history) for w in self.vocab}

    def histories(self):
        """All histories with at least one observed continuation."""
        return [h for k in sorted(self._ctx) for h in self._ctx[k]]

    def score(self, words, eos=True, bos=True):
        """Sum of natural-log conditional probabilities of ``words``."""
        self._require()
        hist = [BOS] if bos else []
        total = 0.0
        for w in list(words) + ([EOS] if eos else []):
            total += math.log(self.prob(w, hist))
            hist.append(w)
        return total

    # -- persistence ---------------------------------------------------------

    def to_dict(self):
        self._require()
        return {
            'format': FORMAT_NAME,
            'version': FORMAT_VERSION,
            'order': self.order,
            'smoothing': self.requested_smoothing,
            'min_count': self.min_count,
            'ngrams': [[list(g), c] for k in sorted(self.raw)
                       for g, c in sorted(self.raw[k].items())],
        }

    @classmethod
    def from_dict(cls, data):
        if data.get('format') != FORMAT_NAME:
            raise ValueError('not a %s model file' % FORMAT_NAME)
        if data.get('version') != FORMAT_VERSION:
            raise ValueError('unsupported model version %r' % data.get('version'))
        model = cls(data['order'], data['smoothing'], data['min_count'])
        raw = {k: Counter() for k in range(1, model.order + 1)}
        for gram, count in data['ngrams']:
            raw[len(gram)][tuple(gram)] = count
        model._build(raw)
        return model

    def save(self, path):
        with open(path, 'w', encoding='utf-8') as out:
            json.dump(self.to_dict(), out, ensure_ascii=False)
            out.write('\n')

    @classmethod
    def load(cls, path):
        with open(path, encoding='utf-8') as inp:
            return cls.from_dict(json.load(inp))


def train_lm(corpus, order=5, smoothing='auto', min_count=1):
    return NGramModel(order, smoothing, min_count).fit(corpus)


def lm_logprob(model, words, eos=True):
    """Log-probability of a lemma sequence with sentence-boundary padding."""
    if model is None:
        raise UntrainedModel('no language model')
    return model.score(words, eos=eos)
