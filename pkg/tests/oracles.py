"""Independent reference implementations and fixture builders shared by the tests."""

import itertools
import random
from collections import Counter
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

import toy
from pronpred.extraction import extract_segment
from pronpred.lm import BOS, EOS, UNK
from pronpred.model import OTHER, get_subtask

EN_FR = get_subtask('en-fr')


def grow_diag_oracle(forward, backward, n_src, n_tgt):
    """Dense-matrix grow-diag: scan every cell row by row until a full scan adds nothing."""
    union = [[(s, t) in forward or (s, t) in backward for t in range(n_tgt)]
             for s in range(n_src)]
    cur = [[(s, t) in forward and (s, t) in backward for t in range(n_tgt)]
           for s in range(n_src)]

    def row_free(s):
        return not any(cur[s])

    def col_free(t):
        return not any(cur[s][t] for s in range(n_src))

    def touches(s, t):
        for ds in (-1, 0, 1):
            for dt in (-1, 0, 1):
                if (ds or dt) and 0 <= s + ds < n_src and 0 <= t + dt < n_tgt \
                        and cur[s + ds][t + dt]:
                    return True
        return False

    changed = True
    while changed:
        changed = False
        for s in range(n_src):
            for t in range(n_tgt):
                if union[s][t] and not cur[s][t] and (row_free(s) or col_free(t)) \
                        and touches(s, t):
                    cur[s][t] = True
                    changed = True
    return {(s, t) for s in range(n_src) for t in range(n_tgt) if cur[s][t]}


def random_pair(rng, max_len=20):
    n_src, n_tgt = rng.randint(1, max_len), rng.randint(1, max_len)
    density = rng.uniform(0.02, 0.3)
    cells = [(s, t) for s in range(n_src) for t in range(n_tgt)]
    fwd = {c for c in cells if rng.random() < density}
    bwd = {c for c in cells if rng.random() < density}
    return fwd, bwd, n_src, n_tgt


def map_class_oracle(tokens, spec):
    """Enumerate tokens with their ranks under the two rules and take the best."""
    ranked = []
    for i, t in enumerate(tokens):
        in_lex = t.lemma.lower() in spec.lexicon
        ranked.append(((0, i) if in_lex else (1, len(t.lemma), i), t))
    key, best = min(ranked, key=lambda r: r[0])
    label = spec.lexicon[best.lemma.lower()] if key[0] == 0 else OTHER
    return label, [best]


def insert_oracle(seg, k):
    """Try every aligned source word, rank by distance then side, apply the side rule."""
    options = []
    for s in {s for s, _ in seg.alignment}:
        if s == k:
            continue
        targets = [t for s2, t in seg.alignment if s2 == s]
        side = 0 if s < k else 1
        pos = max(targets) + 1 if side == 0 else min(targets)
        options.append(((abs(s - k), side), pos))
    if options:
        return min(options)[1]
    ratio = Fraction(k * len(seg.target), len(seg.source))
    exact = Decimal(ratio.numerator) / Decimal(ratio.denominator)
    return min(int(exact.quantize(Decimal(1), rounding=ROUND_HALF_UP)), len(seg.target))


def markov_corpus(seed, n_sent=1000, vocab=400):
    """Sentences from a sparse first-order Markov chain with Zipfian emissions."""
    rng = random.Random(seed)
    words = ['w%d' % i for i in range(vocab)]
    weights = [1 / (i + 1) for i in range(vocab)]
    follow = {w: rng.sample(words, 6) for w in words}
    corpus = []
    for _ in range(n_sent):
        sent = [rng.choices(words, weights)[0]]
        while len(sent) < 12 and rng.random() > 0.15:
            sent.append(rng.choice(follow[sent[-1]]) if rng.random() < 0.8
                        else rng.choices(words, weights)[0])
        corpus.append(sent)
    return corpus


def kn_oracle(corpus, order):
    """Textbook interpolated modified Kneser-Ney, evaluated recursively."""
    raw = Counter()
    for sent in corpus:
        padded = [BOS] + sent + [EOS]
        for i in range(1, len(padded)):
            for n in range(1, order + 1):
                if i - n + 1 >= 0:
                    raw[tuple(padded[i - n + 1:i + 1])] += 1
    vocab = {g[0] for g in raw if len(g) == 1} | {EOS, UNK}
    left_contexts = {}
    for g in raw:
        left_contexts.setdefault(g[1:], set()).add(g[0])

    def count(gram):
        if len(gram) == order or gram[0] == BOS:
            return raw[gram]
        return len(left_contexts.get(gram, ()))

    by_history = {}
    for g in raw:
        by_history.setdefault(g[:-1], set()).add(g[-1])

    discounts = {}
    for n in range(1, order + 1):
        coc = Counter(count(g) for g in raw if len(g) == n)
        y = coc[1] / (coc[1] + 2 * coc[2])
        discounts[n] = [0, 1 - 2 * y * coc[2] / coc[1], 2 - 3 * y * coc[3] / coc[2],
                        3 - 4 * y * coc[4] / coc[3]]

    def p(word, hist):
        n = len(hist) + 1
        if n == 1:
            lower = 1 / len(vocab)
        else:
            lower = p(word, hist[1:])
        conts = {w: count(hist + (w,)) for w in by_history.get(hist, ())}
        if not conts:
            return lower
        total = sum(conts.values())
        d = discounts[n]
        disc = lambda c: d[min(c, 3)]
        gamma = sum(disc(c) for c in conts.values()) / total
        c = conts.get(word, 0)
        return max(c - disc(c), 0) / total + gamma * lower

    return p


def brute_force(model, inst, candidates, penalty):
    """Enumerate every filler assignment and score the spelled-out lemma sequence."""
    fillers = candidates.fillers
    holes = inst.placeholder_positions
    best = None
    for combo in itertools.product(fillers, repeat=len(holes)):
        words = []
        chosen = iter(combo)
        for i, item in enumerate(inst.target):
            if i in holes:
                filler, _ = next(chosen)
                if filler is not None:
                    words.append(filler)
            else:
                words.append(item.lemma)
        n_none = sum(f is None for f, _ in combo)
        score = model.score(words) + penalty * n_none
        if best is None or score > best[0]:
            best = (score, list(combo))
    return best[1]


def toy_fixtures(train, n=150, seed=5):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        parts = toy.generate(rng.randint(1, 3), rng.randrange(10 ** 6))
        inst = extract_segment(toy.to_segment(toy.concat(parts)), EN_FR, subject_filter=False)
        if inst is not None and len(inst.labels) <= 3:
            out.append(inst)
    return out
