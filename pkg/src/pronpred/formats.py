"""Readers and writers for the toolkit's newline-delimited UTF-8 file formats.

Instance format
    One segment per line, five TAB-separated fields::

        labels <TAB> replaced <TAB> source <TAB> target <TAB> alignment

    1. class labels, space separated, one per placeholder in target order
    2. the target tokens the placeholders stand for, one space-separated group
       per placeholder. A group is ``lemma|POS``; several tokens in one group
       are joined with ``+``; an empty group (pronoun without a target token)
       is written ``_``
    3. source sentence tokens, space separated
    4. target ``lemma|POS`` tokens with ``REPLACE_<k>`` gaps, where ``k`` is
       the source index of the pronoun
    5. alignment links ``s-t`` (source index, target index), space separated,
       sorted

Alignment format
    One segment per line, space-separated ``s-t`` links; an empty line is an
    empty alignment.

Tagged corpus format
    One segment per line, space-separated ``lemma|POS`` tokens. A token with
    several ``|`` is split at the last one.

Token corpus format
    One segment per line, space-separated tokens (source text, dependency
    labels, document ids, plain lemma corpora).

Prediction format
    One line per instance with the predicted labels, space separated, in
    placeholder order. A line containing TABs is read as an instance line
    and its first field is used.
"""

import io
import sys
import re
from contextlib import contextmanager

from .errors import MalformedLine, PronPredError
from .model import (Placeholder, TaggedToken, TaskInstance, check_tagset,
                    validate_instance)

FIELD_SEP = '\t'
GROUP_JOINER = '+'
EMPTY_GROUP = '_'

_LINK = re.compile(r'(\d+)-(\d+)\Z')
_REPLACE = re.compile(r'REPLACE_(0|[1-9][0-9]*)\Z')
_GROUP_TOKEN = re.compile(r'(\S+?)\|([^\s|+]+)(?:\+|\Z)')


@contextmanager
def open_text(path, mode='r'):
    """Open ``path`` as UTF-8 text; ``-`` is stdin/stdout."""
    if path == '-':
        stream = sys.stdin if 'r' in mode else sys.stdout
        yield stream
        return
    with open(path, mode, encoding='utf-8', newline='\n') as stream:
        yield stream


def _lines(stream):
    for lineno, line in enumerate(stream, 1):
        yield lineno, line.rstrip('\n').rstrip('\r')


def parse_link(text, field=None):
    match = _LINK.match(text)
    if match is None:
        raise MalformedLine(field, 'bad link %r' % text)
    return int(match.group(1)), int(match.group(2))


def parse_alignment(text, field=None):
    return frozenset(parse_link(tok, field) for tok in text.split())


def format_alignment(links):
    return ' '.join('%d-%d' % link for link in sorted(links))


def parse_group(text):
    """Parse one field-2 group into a tuple of TaggedTokens."""
    if text == EMPTY_GROUP:
        return ()
    tokens = []
    pos = 0
    while pos < len(text):
        match = _GROUP_TOKEN.match(text, pos)
        if match is None:
            raise MalformedLine(2, 'bad replaced token group %r' % text)
        tokens.append(TaggedToken(match.group(1), match.group(2)))
        pos = match.end()
    if text.endswith(GROUP_JOINER):
        raise MalformedLine(2, 'bad replaced token group %r' % text)
    return tuple(tokens)


def format_group(tokens):
    if not tokens:
        return EMPTY_GROUP
    return GROUP_JOINER.join(map(str, tokens))


def _parse_target_item(text):
    match = _REPLACE.match(text)
    if match is not None:
        return Placeholder(int(match.group(1)))
    try:
        return TaggedToken.parse(text)
    except ValueError:
        raise MalformedLine(4, 'bad lemma|POS token %r' % text) from None


def _violation_field(problem):
    for prefix, field in (('label', 1), ('unknown label', 1), ('replaced', 2),
                          ('alignment', 5)):
        if problem.startswith(prefix):
            return field
    return 4


def parse_instance_line(line, spec, strict_tags=False):
    """Parse one instance line into a validated TaskInstance.

    Raises MalformedLine naming the offending field.
    """
    line = line.rstrip('\n')
    fields = line.split(FIELD_SEP)
    if len(fields) != 5:
        raise MalformedLine(None, 'expected 5 tab-separated fields, found %d' % len(fields))
    f_labels, f_replaced, f_source, f_target, f_align = fields

    labels = tuple(f_labels.split())
    for label in labels:
        if label not in spec.classes:
            raise MalformedLine(1, 'unknown label %r' % label)
    replaced = tuple(parse_group(g) for g in f_replaced.split())
    source = tuple(f_source.split())
    target = tuple(_parse_target_item(t) for t in f_target.split())
    alignment = parse_alignment(f_align, 5)

    inst = TaskInstance(labels, replaced, source, target, alignment)
    problems = validate_instance(inst, spec)
    if problems:
        raise MalformedLine(_violation_field(problems[0]), problems[0])
    if spec.target_tagset is not None:
        tokens = [t for t in target if isinstance(t, TaggedToken)]
        tokens.extend(tok for group in replaced for tok in group)
        try:
            check_tagset(tokens, spec.target_tagset, strict_tags)
        except ValueError as err:
            raise MalformedLine(4, str(err)) from None
    return inst


def serialize_instance(inst):
    return FIELD_SEP.join([
        ' '.join(inst.labels),
        ' '.join(format_group(g) for g in inst.replaced),
        ' '.join(inst.source),
        ' '.join(map(str, inst.target)),
        format_alignment(inst.alignment),
    ])


def read_instances(stream, spec, strict_tags=False, path=None):
    out = []
    for lineno, line in _lines(stream):
        try:
            out.append(parse_instance_line(line, spec, strict_tags))
        except PronPredError as err:
            raise err.locate(path, lineno)
        except ValueError as err:
            raise MalformedLine(None, str(err), path, lineno) from None
    return out


def write_instances(stream, instances):
    for inst in instances:
        stream.write(serialize_instance(inst) + '\n')


def read_alignment_file(stream, path=None):
    out = []
    for lineno, line in _lines(stream):
        try:
            out.append(parse_alignment(line))
        except MalformedLine as err:
            raise err.locate(path, lineno)
    return out


def write_alignment_file(stream, alignments):
    for links in alignments:
        stream.write(format_alignment(links) + '\n')


def read_tagged_corpus(stream, tagset=None, strict=False, path=None):
    out = []
    for lineno, line in _lines(stream):
        try:
            segment = [TaggedToken.parse(tok) for tok in line.split()]
            if tagset is not None:
                check_tagset(segment, tagset, strict)
        except ValueError as err:
            raise MalformedLine(None, str(err), path, lineno) from None
        out.append(segment)
    return out


def read_token_corpus(stream):
    return [line.split() for _, line in _lines(stream)]


def read_predictions(stream, path=None):
    out = []
    for lineno, line in _lines(stream):
        if FIELD_SEP in line:
            fields = line.split(FIELD_SEP)
            if len(fields) != 5:
                raise MalformedLine(None, 'prediction line has %d tab-separated fields'
                                    % len(fields), path, lineno)
            line = fields[0]
        out.append(line.split())
    return out


def write_predictions(stream, predictions):
    for labels in predictions:
        stream.write(' '.join(labels) + '\n')


def loads_instances(text, spec):
    return read_instances(io.StringIO(text), spec)
