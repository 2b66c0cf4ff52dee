"""
Character-level scanning shared by the schema and expression parsers.
"""
from __future__ import absolute_import

import re

from superjet.errors import ParseError

_BLANKS = re.compile(r'(?:[ \t\n]|;[^\n]*)*')
_DIGITS = re.compile(r'[0-9]+')


class Scanner(object):
    """
    Recursive-descent helper over a string.

    The parse_* methods consume and return what they recognise, or return
    None without moving. Line breaks of any convention read as '\\n'.
    """

    def __init__(self, source):
        text = source.read() if hasattr(source, "read") else source
        if hasattr(source, "close"):
            source.close()
        self.text = text.replace('\r\n', '\n').replace('\r', '\n')
        self.pos = 0

    def location(self):
        """:returns: (line, char) of the current position, both from 1"""
        line = self.text.count('\n', 0, self.pos) + 1
        start = self.text.rfind('\n', 0, self.pos) + 1
        return line, self.pos - start + 1

    def error(self, msg):
        line, char = self.location()
        raise ParseError(msg, line, char)

    def required(self, found, message):
        if found is None:
            self.error(message)
        return found

    def parse_eof(self):
        return True if self.pos >= len(self.text) else None

    def parse_literal(self, lit):
        if not self.text.startswith(lit, self.pos):
            return None
        self.pos += len(lit)
        return lit

    def parse_re(self, regex):
        m = regex.match(self.text, self.pos)
        if m is None:
            return None
        self.pos = m.end()
        return m.group()

    def parse_s(self):
        """Skip blanks, newlines and ';' comments."""
        self.parse_re(_BLANKS)

    def parse_number(self):
        return self.parse_re(_DIGITS)
