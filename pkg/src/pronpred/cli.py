"""Command line interface.

Every subcommand reads and writes the plain-text formats documented in
:mod:`pronpred.formats`; ``-`` stands for stdin/stdout. Exit status is 0 on
success, 1 on data errors (the message names file and line) and 2 on usage
errors.

Options can also come from a flat configuration file given with
``--config``: one ``key = value`` per line, ``#`` starts a comment, keys are
option names without the leading dashes. Command line flags win over the
file, which wins over built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys

from . import __version__
from .alignment import Heuristic, evaluate_corpus, invert, symmetrize
from .baseline import (DEFAULT_TOP_K, CandidateSet, build_candidate_set,
                       lm_training_corpus, parse_grid, predict, predicted_labels,
                       sweep_none_penalty)
from .errors import IndexOutOfBounds, LengthMismatch, MalformedLine, PronPredError
from .evaluation import pct, score_report
from .extraction import (AnnotatedSegment, class_frequency_table, extract_examples,
                         format_frequency_table)
from .formats import (open_text, read_alignment_file, read_instances, read_predictions,
                      read_tagged_corpus, read_token_corpus, write_alignment_file,
                      write_instances, write_predictions)
from .lm import NGramModel, train_lm
from .model import SUBTASKS, get_subtask

log = logging.getLogger('pronpred')

INSTANCE_FORMAT_HELP = (
    'instance files have five TAB-separated fields: labels, replaced token '
    'groups (lemma|POS, several joined by "+", empty group "_"), source tokens, '
    'target lemma|POS tokens with REPLACE_<source index> gaps, and "s-t" links')

# Subcommand -> options that must be given on the command line or in the config.
REQUIRED = {
    'symmetrize': ['fwd', 'bwd'],
    'extract': ['direction', 'source', 'target_tagged', 'alignments'],
    'train-lm': ['input', 'out'],
    'tune': ['model', 'dev', 'direction'],
    'predict': ['model', 'input', 'direction'],
    'score': ['gold', 'pred', 'direction'],
    'align-eval': ['hyp', 'gold'],
    'reproduce-baseline': ['direction', 'train', 'dev', 'test'],
}


def read_config(path):
    """Parse a flat ``key = value`` file into a dict with underscore keys."""
    config = {}
    with open(path, encoding='utf-8') as inp:
        for lineno, line in enumerate(inp, 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition('=')
            if not sep:
                raise MalformedLine(None, 'expected "key = value"', path, lineno)
            config[key.strip().lstrip('-').replace('-', '_')] = value.strip()
    return config


def _common(parser):
    parser.add_argument('--config', metavar='FILE',
                        help='flat key = value file with default option values')
    parser.add_argument('--dump-config', action='store_true',
                        help='print the effective configuration and exit')
    parser.add_argument('--seed', type=int, default=42,
                        help='seed for any random choices (default: %(default)s)')
    parser.add_argument('--jobs', type=int, default=1,
                        help='worker processes for per-document/per-instance stages')
    parser.add_argument('-v', '--verbose', action='store_true')


def _direction(parser):
    parser.add_argument('--direction', choices=sorted(SUBTASKS),
                        help='subtask language direction')


def _candidates(parser):
    parser.add_argument('--candidates', metavar='FILE',
                        help='candidate list: "lemma<TAB>class" per line, '
                             '"<none>" for the NONE option')
    parser.add_argument('--train', metavar='INSTANCES',
                        help='build the candidate list from these training instances')
    parser.add_argument('--top-k', type=int, default=DEFAULT_TOP_K,
                        help='non-pronoun fillers taken from training data (default: %(default)s)')
    parser.add_argument('--no-none', action='store_true',
                        help='do not consider the NONE option')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='pronpred',
        description='Cross-lingual pronoun prediction: data extraction, '
                    'LM baseline and scoring.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')

    p = sub.add_parser(
        'symmetrize', help='combine two directional alignment files',
        description='Alignment files hold one segment per line of space-separated '
                    '"s-t" links; the output has the same format.')
    _common(p)
    p.add_argument('--fwd', metavar='FILE', help='source-to-target alignments (s-t links)')
    p.add_argument('--bwd', metavar='FILE', help='target-to-source alignments')
    p.add_argument('--invert-bwd', action='store_true',
                   help='the backward file is written as t-s links; swap them')
    p.add_argument('--heuristic', default='grow-diag-final-and',
                   choices=[h.value for h in Heuristic] + ['gd', 'gdf', 'gdfa'],
                   help='(default: %(default)s)')
    p.add_argument('--source', metavar='FILE', help='source tokens, for bounds checks')
    p.add_argument('--target', metavar='FILE', help='target tokens, for bounds checks')
    p.add_argument('--out', default='-', metavar='FILE')

    p = sub.add_parser(
        'extract', help='build task instances from aligned, tagged bitext',
        description='Inputs are line-aligned: tokenised source text, target '
                    '"lemma|POS" tokens, symmetrised "s-t" alignments and optionally '
                    'one dependency label per source token. ' + INSTANCE_FORMAT_HELP)
    _common(p)
    _direction(p)
    p.add_argument('--source', metavar='FILE')
    p.add_argument('--target-tagged', metavar='FILE')
    p.add_argument('--alignments', metavar='FILE')
    p.add_argument('--dep-labels', metavar='FILE',
                   help='dependency labels of the source tokens, one line per segment')
    p.add_argument('--doc-ids', metavar='FILE',
                   help='document id per segment; consecutive equal ids form a document')
    p.add_argument('--no-subject-filter', action='store_true',
                   help='keep pronouns regardless of their dependency label')
    p.add_argument('--keep-all', action='store_true',
                   help='also write segments without pronouns (whole documents)')
    p.add_argument('--strict-tags', action='store_true',
                   help='reject PoS tags outside the target tagset')
    p.add_argument('--out', default='-', metavar='FILE')
    p.add_argument('--report', metavar='FILE',
                   help='class frequency table (default: stderr)')

    p = sub.add_parser(
        'train-lm', help='train the n-gram language model over lemmata',
        description='The model is stored as JSON with a format name and version.')
    _common(p)
    p.add_argument('--in', dest='input', metavar='FILE')
    p.add_argument('--out', metavar='FILE')
    p.add_argument('--order', type=int, default=5, help='(default: %(default)s)')
    p.add_argument('--smoothing', choices=['auto', 'kn', 'wb'], default='auto',
                   help='Kneser-Ney, Witten-Bell, or KN with WB fallback (default)')
    p.add_argument('--min-count', type=int, default=1,
                   help='rarer lemmata become <unk> (default: %(default)s)')
    p.add_argument('--format', choices=['plain', 'tagged', 'instances'], default='plain',
                   help='input is plain lemmata, lemma|POS tokens, or instance lines')
    _direction(p)

    p = sub.add_parser('tune', help='grid-search the NONE penalty on dev data',
                       description=INSTANCE_FORMAT_HELP)
    _common(p)
    _direction(p)
    p.add_argument('--model', metavar='FILE')
    p.add_argument('--dev', metavar='INSTANCES')
    _candidates(p)
    p.add_argument('--grid', default='0:-4:0.5', help='start:stop:step (default: %(default)s)')
    p.add_argument('--out', metavar='FILE', help='write the tuned penalty here')

    p = sub.add_parser('predict', help='fill placeholders with the LM baseline',
                       description='Writes one line of space-separated labels per '
                                   'instance. ' + INSTANCE_FORMAT_HELP)
    _common(p)
    _direction(p)
    p.add_argument('--model', metavar='FILE')
    p.add_argument('--in', dest='input', metavar='INSTANCES')
    _candidates(p)
    p.add_argument('--none-penalty', type=float, default=0.0,
                   help='log-domain penalty per NONE filler (default: %(default)s)')
    p.add_argument('--search', choices=['auto', 'exhaustive', 'beam'], default='auto')
    p.add_argument('--out', default='-', metavar='FILE')

    p = sub.add_parser(
        'score', help='macro-averaged recall and accuracy',
        description='Predictions: one line per gold instance with its labels, '
                    'space separated (instance lines are accepted too; field 1 is used).')
    _common(p)
    _direction(p)
    p.add_argument('--gold', metavar='INSTANCES')
    p.add_argument('--pred', metavar='FILE')
    p.add_argument('--system', default='system', help='name in the result row')
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument('--json', dest='output', action='store_const', const='json')
    fmt.add_argument('--text', dest='output', action='store_const', const='text')
    p.set_defaults(output='text')

    p = sub.add_parser(
        'align-eval', help='precision/recall of alignments against a gold standard',
        description='Alignment files: one line per segment of "s-t" links. The '
                    'pronoun file lists, per segment, the source indices whose '
                    'links form the pronoun subset.')
    _common(p)
    p.add_argument('--hyp', metavar='FILE')
    p.add_argument('--gold', metavar='FILE')
    p.add_argument('--pronouns', metavar='FILE')

    p = sub.add_parser(
        'reproduce-baseline', help='train, tune, predict and score end to end',
        description='Trains the LM on the training targets (plus --lm-corpus), '
                    'builds the candidate list from training data, tunes the NONE '
                    'penalty on dev and scores baseline0 and the tuned baseline on '
                    'test. ' + INSTANCE_FORMAT_HELP)
    _common(p)
    _direction(p)
    p.add_argument('--train', metavar='INSTANCES')
    p.add_argument('--dev', metavar='INSTANCES')
    p.add_argument('--test', metavar='INSTANCES')
    p.add_argument('--lm-corpus', metavar='FILE', help='extra plain lemma corpus for the LM')
    p.add_argument('--order', type=int, default=5)
    p.add_argument('--smoothing', choices=['auto', 'kn', 'wb'], default='auto')
    p.add_argument('--top-k', type=int, default=DEFAULT_TOP_K)
    p.add_argument('--grid', default='0:-4:0.5')
    p.add_argument('--out-dir', default='baseline-out', metavar='DIR')
    return parser


# -- helpers -------------------------------------------------------------------

def _read_instances(path, spec):
    with open_text(path) as inp:
        return read_instances(inp, spec, path=path)


def _load_candidates(args, spec):
    if args.candidates:
        with open_text(args.candidates) as inp:
            cands = CandidateSet.loads(inp.read(), spec)
    elif args.train:
        cands = build_candidate_set(_read_instances(args.train, spec), spec, args.top_k)
    else:
        cands = build_candidate_set([], spec, 0)
    if args.no_none:
        cands = CandidateSet(cands.pronoun_fillers, cands.other_fillers, False)
    return cands


def _check_lengths(name_counts):
    (first, n), *rest = name_counts
    for name, m in rest:
        if m != n:
            raise LengthMismatch('%s has %d lines but %s has %d' % (name, m, first, n),
                                 path=name)


def read_segments(source, target_tagged, alignments, spec, dep_labels=None,
                  doc_ids=None, strict_tags=False):
    """Read line-aligned annotation files into documents of AnnotatedSegment."""
    with open_text(source) as inp:
        src = read_token_corpus(inp)
    with open_text(target_tagged) as inp:
        tgt = read_tagged_corpus(inp, spec.target_tagset, strict_tags, path=target_tagged)
    with open_text(alignments) as inp:
        ali = read_alignment_file(inp, path=alignments)
    files = [(source, len(src)), (target_tagged, len(tgt)), (alignments, len(ali))]
    labels = ids = None
    if dep_labels:
        with open_text(dep_labels) as inp:
            labels = read_token_corpus(inp)
        files.append((dep_labels, len(labels)))
    if doc_ids:
        with open_text(doc_ids) as inp:
            ids = [' '.join(x) for x in read_token_corpus(inp)]
        files.append((doc_ids, len(ids)))
    _check_lengths(files)

    documents, current, last_id = [], [], object()
    for i, (s, t, a) in enumerate(zip(src, tgt, ali)):
        for si, ti in a:
            if not (si < len(s) and ti < len(t)):
                raise IndexOutOfBounds('link %d-%d outside a %dx%d segment'
                                       % (si, ti, len(s), len(t)), alignments, i + 1)
        try:
            seg = AnnotatedSegment(tuple(s), tuple(t), a,
                                   tuple(labels[i]) if labels is not None else None)
        except ValueError as err:
            raise MalformedLine(None, str(err), dep_labels, i + 1) from None
        if ids is not None and ids[i] != last_id and current:
            documents.append(current)
            current = []
        if ids is not None:
            last_id = ids[i]
        current.append(seg)
    if current:
        documents.append(current)
    return documents


# -- subcommands -----------------------------------------------------------------

def cmd_symmetrize(args):
    with open_text(args.fwd) as inp:
        fwd = read_alignment_file(inp, path=args.fwd)
    with open_text(args.bwd) as inp:
        bwd = read_alignment_file(inp, path=args.bwd)
    _check_lengths([(args.fwd, len(fwd)), (args.bwd, len(bwd))])
    lengths = None
    if args.source and args.target:
        with open_text(args.source) as inp:
            src = read_token_corpus(inp)
        with open_text(args.target) as inp:
            tgt = read_token_corpus(inp)
        _check_lengths([(args.fwd, len(fwd)), (args.source, len(src)), (args.target, len(tgt))])
        lengths = [(len(s), len(t)) for s, t in zip(src, tgt)]
    out = []
    for i, (f, b) in enumerate(zip(fwd, bwd)):
        if args.invert_bwd:
            b = invert(b)
        s_len, t_len = lengths[i] if lengths else (None, None)
        try:
            out.append(symmetrize(f, b, args.heuristic, s_len, t_len))
        except IndexOutOfBounds as err:
            raise err.locate(args.fwd, i + 1)
    with open_text(args.out, 'w') as stream:
        write_alignment_file(stream, out)


def cmd_extract(args):
    spec = get_subtask(args.direction)
    documents = read_segments(args.source, args.target_tagged, args.alignments, spec,
                              args.dep_labels, args.doc_ids, args.strict_tags)
    subject_filter = not args.no_subject_filter
    if subject_filter and spec.subject_labels is not None and not args.dep_labels:
        raise PronPredError('subject filtering for %s needs --dep-labels '
                            '(or pass --no-subject-filter)' % spec.source_lang)
    instances = extract_examples(documents, spec, lm_corpus_mode=args.keep_all,
                                 subject_filter=subject_filter, jobs=args.jobs)
    with open_text(args.out, 'w') as stream:
        write_instances(stream, instances)

    after = class_frequency_table(instances, spec)
    if subject_filter and spec.subject_labels is not None:
        unfiltered = extract_examples(documents, spec, subject_filter=False, jobs=args.jobs)
        report = format_frequency_table(spec, class_frequency_table(unfiltered, spec), after)
    else:
        report = format_frequency_table(spec, after)
    if args.report:
        with open_text(args.report, 'w') as stream:
            stream.write(report + '\n')
    else:
        print(report, file=sys.stderr)


def _lm_corpus(path, fmt, direction=None):
    with open_text(path) as inp:
        if fmt == 'plain':
            return read_token_corpus(inp)
        if fmt == 'tagged':
            return [[t.lemma for t in seg] for seg in read_tagged_corpus(inp, path=path)]
        if direction is None:
            raise PronPredError('--format instances needs --direction')
        return lm_training_corpus(read_instances(inp, get_subtask(direction), path=path))


def cmd_train_lm(args):
    corpus = _lm_corpus(args.input, args.format, args.direction)
    model = train_lm(corpus, args.order, args.smoothing, args.min_count)
    model.save(args.out)
    log.info('trained %d-gram model (%s smoothing, %d types)',
             model.order, model.smoothing, len(model.vocab))


def cmd_tune(args):
    spec = get_subtask(args.direction)
    model = NGramModel.load(args.model)
    dev = _read_instances(args.dev, spec)
    cands = _load_candidates(args, spec)
    results = sweep_none_penalty(model, dev, cands, spec, parse_grid(args.grid), args.jobs)
    best = max(results, key=lambda r: (r[1], r[0]))[0]
    for penalty, score in results:
        print('%g\t%s' % (penalty, pct(score)))
    print('best\t%g' % best)
    if args.out:
        with open_text(args.out, 'w') as stream:
            stream.write('%g\n' % best)


def cmd_predict(args):
    spec = get_subtask(args.direction)
    model = NGramModel.load(args.model)
    instances = _read_instances(args.input, spec)
    cands = _load_candidates(args, spec)
    filled = predict(model, instances, cands, args.none_penalty, args.search, args.jobs)
    with open_text(args.out, 'w') as stream:
        write_predictions(stream, predicted_labels(filled))


def cmd_score(args):
    spec = get_subtask(args.direction)
    gold = _read_instances(args.gold, spec)
    with open_text(args.pred) as inp:
        pred = read_predictions(inp, path=args.pred)
    try:
        report = score_report(gold, pred, spec)
    except PronPredError as err:
        raise err.locate(args.pred)
    if args.output == 'json':
        print(report.to_json())
    else:
        print(report.to_text(args.system))


def cmd_align_eval(args):
    with open_text(args.hyp) as inp:
        hyp = read_alignment_file(inp, path=args.hyp)
    with open_text(args.gold) as inp:
        gold = read_alignment_file(inp, path=args.gold)
    positions = None
    if args.pronouns:
        with open_text(args.pronouns) as inp:
            try:
                positions = [[int(x) for x in line] for line in read_token_corpus(inp)]
            except ValueError as err:
                raise MalformedLine(None, str(err), args.pronouns) from None
        _check_lengths([(args.gold, len(gold)), (args.pronouns, len(positions))])
    overall, pron = evaluate_corpus(hyp, gold, positions)
    print('links\tP\tR\tF')
    print('all\t' + overall.row())
    if pron is not None:
        print('pronouns\t' + pron.row())


def cmd_reproduce_baseline(args):
    spec = get_subtask(args.direction)
    train = _read_instances(args.train, spec)
    dev = _read_instances(args.dev, spec)
    test = _read_instances(args.test, spec)
    corpus = lm_training_corpus(train)
    if args.lm_corpus:
        corpus += _lm_corpus(args.lm_corpus, 'plain')
    model = train_lm(corpus, args.order, args.smoothing)
    cands = build_candidate_set(train, spec, args.top_k)

    results = sweep_none_penalty(model, dev, cands, spec, parse_grid(args.grid), args.jobs)
    penalty = max(results, key=lambda r: (r[1], r[0]))[0]

    os.makedirs(args.out_dir, exist_ok=True)
    model.save(os.path.join(args.out_dir, 'model.json'))
    with open(os.path.join(args.out_dir, 'candidates.tsv'), 'w', encoding='utf-8') as out:
        out.write(cands.dumps())
    with open(os.path.join(args.out_dir, 'tuning.tsv'), 'w', encoding='utf-8') as out:
        for p, score in results:
            out.write('%g\t%s\n' % (p, pct(score)))
    with open(os.path.join(args.out_dir, 'penalty.txt'), 'w', encoding='utf-8') as out:
        out.write('%g\n' % penalty)

    print('%-20s %8s %8s' % ('system', 'macro-R', 'accuracy'))
    reports = {}
    systems = [('baseline0', 0.0)]
    if penalty != 0:
        systems.append(('baseline%g' % penalty, penalty))
    for name, p in systems:
        labels = predicted_labels(predict(model, test, cands, p, jobs=args.jobs))
        with open(os.path.join(args.out_dir, 'predictions.%s.txt' % name), 'w',
                  encoding='utf-8') as out:
            write_predictions(out, labels)
        report = score_report(test, labels, spec)
        reports[name] = report.to_dict()
        print('%-20s %8s %8s' % (name, pct(report.macro_recall), pct(report.accuracy)))
    with open(os.path.join(args.out_dir, 'report.json'), 'w', encoding='utf-8') as out:
        json.dump({'tuned_penalty': penalty, 'smoothing': model.smoothing,
                   'systems': reports}, out, indent=2, ensure_ascii=False)
        out.write('\n')
    print('tuned NONE penalty: %g' % penalty)


COMMANDS = {
    'symmetrize': cmd_symmetrize,
    'extract': cmd_extract,
    'train-lm': cmd_train_lm,
    'tune': cmd_tune,
    'predict': cmd_predict,
    'score': cmd_score,
    'align-eval': cmd_align_eval,
    'reproduce-baseline': cmd_reproduce_baseline,
}


def _subparser(parser, command):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise KeyError(command)


def _apply_config(sub, config):
    """Install config values as defaults of ``sub``."""
    actions = {a.dest: a for a in sub._actions}
    for action in sub._actions:
        for option in action.option_strings:
            actions.setdefault(option.lstrip('-').replace('-', '_'), action)
    defaults = {}
    for key, value in config.items():
        action = actions.get(key)
        if action is None:
            log.warning('ignoring unknown config key %r', key)
            continue
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            value = value.lower() in ('1', 'true', 'yes', 'on')
        elif action.type is not None:
            value = action.type(value)
        defaults[action.dest] = value
    sub.set_defaults(**defaults)


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        parser.exit(2, 'pronpred: error: a command is required\n')
    sub = _subparser(parser, args.command)
    if args.config:
        try:
            config = read_config(args.config)
        except OSError as err:
            sub.error('cannot read config: %s' % err)
        config.pop('config', None)
        _apply_config(sub, config)
        args = parser.parse_args(argv)
    if not args.dump_config:
        missing = [d for d in REQUIRED[args.command] if getattr(args, d, None) is None]
        if missing:
            sub.error('missing required option(s): %s'
                      % ', '.join('--' + ('in' if d == 'input' else d.replace('_', '-'))
                                  for d in missing))
    return args


def dump_config(args):
    for key, value in sorted(vars(args).items()):
        if key in ('command', 'dump_config', 'config') or value is None:
            continue
        print('%s = %s' % (key.replace('_', '-'), value))


def main(argv=None):
    args = parse_args(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format='%(name)s: %(levelname)s: %(message)s')
    if args.dump_config:
        dump_config(args)
        return 0
    random.seed(args.seed)
    try:
        COMMANDS[args.command](args)
    except PronPredError as err:
        print('pronpred: error: %s' % err, file=sys.stderr)
        return 1
    except (OSError, ValueError) as err:
        print('pronpred: error: %s' % err, file=sys.stderr)
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
