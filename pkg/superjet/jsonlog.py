"""
A logging formatter that writes each record as one JSON object per line.

Install it on a handler for machine-readable runs::

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonFormatter())

``superjet verify --log-json`` does exactly this for the stderr handler.
"""
from __future__ import absolute_import

from datetime import datetime
import json
import logging
import sys
import time
import traceback

# attributes every LogRecord carries; only extra= fields are copied out
_RECORD_ATTRS = frozenset(vars(logging.LogRecord("", 0, "", 0, "", (), None)))
_RECORD_ATTRS |= {"message", "asctime"}

_JSON_TYPES = (str, dict, list, tuple, int, float, bool, type(None))


def _extras(record):
    return dict((k, v) for k, v in vars(record).items()
                if k not in _RECORD_ATTRS and isinstance(v, _JSON_TYPES))


class JsonFormatter(logging.Formatter):
    """A `logging.Formatter` that formats records as JSON objects."""

    def __init__(self, traceback_limit=10):
        logging.Formatter.__init__(self)
        self.converter = time.gmtime
        self.traceback_limit = traceback_limit

    def format(self, record):
        data = {
            'name': record.name,
            'level': record.levelname,
            'msg': record.getMessage(),
            'time': self.formatTime(record),
        }
        if record.exc_info:
            exc_type, exc, _ = record.exc_info
            data.update({
                'error_type': exc_type.__name__,
                'error_message': str(exc),
                'traceback': self.formatException(record.exc_info),
            })

        data.update(_extras(record))

        return json.dumps(data, sort_keys=True, default=str)

    def formatTime(self, record, datefmt=None):
        if datefmt:
            return time.strftime(datefmt, self.converter(record.created))
        # isoformat keeps the microseconds strftime cannot
        return datetime.utcfromtimestamp(record.created).isoformat() + 'Z'

    def formatException(self, exc_info):
        _, _, exc_trace = exc_info
        return ''.join(traceback.format_tb(exc_trace, self.traceback_limit))


def configure(verbose=False, as_json=False, stream=None):
    """
    Set up the root logger for a command-line run.

    :param verbose: log at DEBUG rather than WARNING
    :param as_json: use JsonFormatter instead of the plain text format
    :param stream: defaults to sys.stderr
    :returns: the installed handler
    """
    handler = logging.StreamHandler(stream or sys.stderr)
    if as_json:
        handler.setFormatter(JsonFormatter())
    else:
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger()
    for old in list(root.handlers):
        root.removeHandler(old)
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)
    return handler
