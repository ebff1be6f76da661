"""Exception hierarchy.

Every data error carries an optional ``path`` and ``lineno`` so the command
line front end can point at the offending input.
"""


class PronPredError(Exception):
    """Base class for all data errors raised by the toolkit."""

    def __init__(self, message, path=None, lineno=None):
        super().__init__(message)
        self.message = message
        self.path = path
        self.lineno = lineno

    def locate(self, path=None, lineno=None):
        """Attach file/line information if not already present; returns self."""
        if self.path is None:
            self.path = path
        if self.lineno is None:
            self.lineno = lineno
        return self

    def __str__(self):
        where = ''
        if self.path is not None:
            where = str(self.path)
            if self.lineno is not None:
                where += ':%d' % self.lineno
            where += ': '
        elif self.lineno is not None:
            where = 'line %d: ' % self.lineno
        return where + self.message


class MalformedLine(PronPredError):
    """A line that does not follow one of the file formats.

    ``field`` is the 1-based field number of the instance format (or ``None``
    for single-field formats such as alignment files).
    """

    def __init__(self, field, reason, path=None, lineno=None):
        self.field = field
        self.reason = reason
        msg = reason if field is None else 'field %d: %s' % (field, reason)
        super().__init__(msg, path, lineno)


class LengthMismatch(PronPredError):
    pass


class UnknownLabel(PronPredError):
    pass


class EmptyGold(PronPredError):
    pass


class MissingLabels(PronPredError):
    pass


class EmptyCorpus(PronPredError):
    pass


class UntrainedModel(PronPredError):
    pass


class IndexOutOfBounds(PronPredError, IndexError):
    pass
