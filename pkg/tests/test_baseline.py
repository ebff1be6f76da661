
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import toy
from oracles import brute_force, toy_fixtures
from pronpred.baseline import (DEFAULT_GRID, NONE, CandidateSet, build_candidate_set,
                               fill_placeholders, lm_training_corpus,
                               parse_grid, predict, sweep_none_penalty, tune_none_penalty)
from pronpred.errors import UntrainedModel
from pronpred.extraction import extract_examples
from pronpred.formats import parse_instance_line
from pronpred.lm import NGramModel, train_lm
from pronpred.model import OTHER, get_subtask

EN_FR = get_subtask('en-fr')


def petit_instance(label='il'):
    return parse_instance_line('%s\til|PRON\tit is small\tREPLACE_0 être|VER petit|ADJ\t1-1 2-2'
                               % label, EN_FR)


def only(*pairs, none=True):
    return CandidateSet(tuple(pairs), (), none)


@pytest.fixture(scope='module')
def toy_setup():
    train = extract_examples([[toy.to_segment(p) for p in toy.generate(400, 1)]], EN_FR,
                             subject_filter=False)
    model = train_lm(lm_training_corpus(train), order=5)
    return train, model


# -- grid and candidates ------------------------------------------------------------------

def test_default_grid():
    assert DEFAULT_GRID == (0, -0.5, -1, -1.5, -2, -2.5, -3, -3.5, -4)
    assert parse_grid('0:-4:0.5') == DEFAULT_GRID
    with pytest.raises(ValueError):
        parse_grid('0:-4:0')


def test_candidates_k0_en_de():
    cands = build_candidate_set([], get_subtask('en-de'), 0)
    assert [f for f, _ in cands.fillers] == ['er', 'sie', 'es', 'man', NONE]
    assert cands.covers(get_subtask('en-de'))


def test_candidates_top_k():
    def inst(lemma, n):
        line = 'OTHER\t%s|PRON\tit\tREPLACE_0\t' % lemma
        return [parse_instance_line(line, EN_FR)] * n
    train = inst('qui', 5) + inst('ça', 3) + inst('le', 2) + inst('en', 2)
    cands = build_candidate_set(train, EN_FR, 2)
    assert cands.other_fillers == (('qui', OTHER), ('en', OTHER))
    assert build_candidate_set(train[:7] + train[8:10], EN_FR, 2).other_fillers == \
        (('qui', OTHER), ('le', OTHER))
    assert build_candidate_set([], EN_FR, 3).other_fillers == ()


def test_candidate_file_round_trip():
    cands = CandidateSet((('il', 'il'), ('ça', 'cela')), (('qui', OTHER),), True)
    assert CandidateSet.loads(cands.dumps(), EN_FR) == cands
    with pytest.raises(ValueError):
        CandidateSet.loads('he\the\n', EN_FR)


# -- filling ---------------------------------------------------------------------------

def test_higher_lm_score_wins():
    model = train_lm([['il', 'être', 'petit']] * 3 + [['elle', 'être', 'petit']])
    inst = petit_instance()
    cands = only(('il', 'il'), ('elle', 'elle'), none=False)
    assert model.score(['il', 'être', 'petit']) > model.score(['elle', 'être', 'petit'])
    assert fill_placeholders(model, inst, cands) == [('il', 'il')]
    assert fill_placeholders(model, inst, only(('il', 'il'), none=False)) == [('il', 'il')]


def test_none_penalty_crossover():
    model = train_lm([['être', 'petit']] * 24 + [['il', 'être', 'petit']], order=2)
    cands = build_candidate_set([], EN_FR, 0)
    margin = model.score(['être', 'petit']) - model.score(['il', 'être', 'petit'])
    assert 0 < margin < 4
    assert fill_placeholders(model, petit_instance(), cands, 0.0) == [(NONE, OTHER)]
    assert fill_placeholders(model, petit_instance(), cands, -4.0) == [('il', 'il')]


def test_no_placeholders_and_untrained():
    inst = parse_instance_line('\t\tthe cat\tle|DET chat|NOM\t', EN_FR)
    model = train_lm([['le', 'chat']])
    assert fill_placeholders(model, inst, build_candidate_set([], EN_FR, 0)) == []
    with pytest.raises(UntrainedModel):
        fill_placeholders(NGramModel(), petit_instance(), build_candidate_set([], EN_FR, 0))


class ShiftedModel:
    """Adds a constant to every log-probability; with equal-length fillers
    this shifts the score of every assignment by the same amount."""

    def __init__(self, inner, shift):
        self.inner, self.shift = inner, shift
        self.order, self.trained = inner.order, True

    def logprob(self, word, history=()):
        return self.inner.logprob(word, history) + self.shift

    def score(self, words, eos=True):
        return self.inner.score(words, eos) + self.shift * (len(list(words)) + eos)


def test_argmax_invariant_under_shift(toy_setup):
    train, model = toy_setup
    cands = build_candidate_set(train, EN_FR, 2, include_none=False)
    for inst in toy_fixtures(train, 20, seed=3):
        for search in ('exhaustive', 'beam'):
            assert fill_placeholders(ShiftedModel(model, 17.5), inst, cands, 0.0, search) == \
                fill_placeholders(model, inst, cands, 0.0, search)


def test_exhaustive_ties_go_to_first():
    model = train_lm([['a']])
    inst = petit_instance()
    cands = only(('il', 'il'), ('elle', 'elle'), none=False)
    # both fillers are unseen, so the two assignments score exactly the same
    assert model.score(['il', 'être', 'petit']) == model.score(['elle', 'être', 'petit'])
    assert fill_placeholders(model, inst, cands, search='exhaustive') == [('il', 'il')]
    assert fill_placeholders(model, inst, cands, search='beam') == [('il', 'il')]


def test_exhaustive_matches_brute_force(toy_setup):
    train, model = toy_setup
    cands = build_candidate_set(train, EN_FR, 2)
    assert len(cands.fillers) <= 10
    for inst in toy_fixtures(train, 40):
        for penalty in (0.0, -2.0):
            assert fill_placeholders(model, inst, cands, penalty, 'exhaustive') == \
                brute_force(model, inst, cands, penalty)


@pytest.mark.parametrize('k', [0, 1, 2])
def test_beam_equals_exhaustive(toy_setup, k):
    train, model = toy_setup
    cands = build_candidate_set(train, EN_FR, k)
    assert len(cands.fillers) <= 10
    for inst in toy_fixtures(train):
        for penalty in (0.0, -1.5, -4.0):
            assert fill_placeholders(model, inst, cands, penalty, 'beam') == \
                fill_placeholders(model, inst, cands, penalty, 'exhaustive')


def test_predict_parallel_matches_serial(toy_setup):
    train, model = toy_setup
    cands = build_candidate_set(train, EN_FR, 2)
    fixtures = toy_fixtures(train, 30)
    assert predict(model, fixtures, cands, jobs=3) == predict(model, fixtures, cands)


# -- tuning ----------------------------------------------------------------------------

def test_tune_single_instance_minus_1_5():
    model = train_lm([['être', 'petit']] * 2 + [['il', 'être', 'petit']], order=2)
    cands = build_candidate_set([], EN_FR, 0)
    sweep = sweep_none_penalty(model, [petit_instance()], cands, EN_FR)
    correct = [p for p, score in sweep if score == 100]
    assert correct[0] == -1.5
    assert tune_none_penalty(model, [petit_instance()], cands, EN_FR) == -1.5


def test_tune_minus_4():
    model = train_lm([['être', 'petit']] * 24 + [['il', 'être', 'petit']], order=2)
    cands = build_candidate_set([], EN_FR, 0)
    dev = [petit_instance()] * 3
    sweep = dict(sweep_none_penalty(model, dev, cands, EN_FR))
    assert sweep[-4.0] == 100 and all(sweep[p] < 100 for p in DEFAULT_GRID if p != -4.0)
    assert tune_none_penalty(model, dev, cands, EN_FR) == -4.0


def test_tune_tie_goes_to_zero():
    model = train_lm([['il', 'être', 'petit']] * 3)
    cands = build_candidate_set([], EN_FR, 0)
    assert len({s for _, s in sweep_none_penalty(model, [petit_instance()], cands, EN_FR)}) == 1
    assert tune_none_penalty(model, [petit_instance()], cands, EN_FR) == 0


def count_none(model, instances, cands, penalty):
    return sum(f is NONE for choice in predict(model, instances, cands, penalty)
               for f, _ in choice)


def test_none_count_non_increasing_on_toy(toy_setup):
    train, model = toy_setup
    cands = build_candidate_set(train, EN_FR, 2)
    fixtures = toy_fixtures(train, 60, seed=8)
    counts = [count_none(model, fixtures, cands, p) for p in DEFAULT_GRID]
    assert all(a >= b for a, b in zip(counts, counts[1:]))


words = st.sampled_from(['il', 'elle', 'être', 'petit', 'grand', 'le'])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(words, min_size=1, max_size=5), min_size=1, max_size=8),
       st.lists(st.lists(st.one_of(st.none(), words), min_size=1, max_size=5),
                min_size=1, max_size=4))
def test_none_count_non_increasing_property(corpus, targets):
    model = train_lm(corpus, order=3)
    cands = build_candidate_set([], EN_FR, 0)
    instances = []
    for target in targets:
        holes = sum(t is None for t in target)
        line = '%s\t%s\t%s\t%s\t' % (
            ' '.join(['il'] * holes), ' '.join(['_'] * holes), ' '.join(['it'] * len(target)),
            ' '.join('REPLACE_%d' % i if t is None else t + '|PRON'
                     for i, t in enumerate(target)))
        instances.append(parse_instance_line(line, EN_FR))
    counts = [count_none(model, instances, cands, p) for p in DEFAULT_GRID]
    assert all(a >= b for a, b in zip(counts, counts[1:]))
