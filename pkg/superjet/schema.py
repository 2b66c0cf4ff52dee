"""
A small interface-description language for scenario documents.

A suite declares named documents and variants::

    %% scenario {schema: 1, structure: &structure, tasks: [&task, ...]}
    &task = {name: string, task: "tau"}
    &task = {name: string, task: "window", p: int, d: int}

and checks parsed JSON against them. Missing members read as defaulted
and extra members as additional, so ``valid`` accepts optional parameters
while still rejecting values of the wrong type.
"""
from __future__ import absolute_import

from functools import total_ordering
import re

from superjet.errors import ValidationError
from superjet.scanner import Scanner


@total_ordering
class Fit(object):
    """
    How well a value fits its description, from worst to best:

        INCOMPATIBLE: values that cannot be read as described
        MIXED: both defaulted and additional parts
        ADDITIONAL: parts not described; they are ignored
        DEFAULTED: parts missing or null; they read as defaults
        CONVERTED: structure as described, some values of a convertible type
        MATCHED: structure and types as described

    ``a & b`` is the fit of a whole made of both parts, ``a | b`` the
    better of two alternatives.
    """

    def __init__(self, rank, name):
        self.rank = rank
        self.name = name

    def __repr__(self):
        return "schema." + self.name

    def __str__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, Fit) and self.rank == other.rank

    def __hash__(self):
        return self.rank

    def __lt__(self, other):
        return self.rank < other.rank

    def __and__(self, other):
        if {self, other} == {DEFAULTED, ADDITIONAL}:
            return MIXED
        return min(self, other)

    def __or__(self, other):
        return max(self, other)


INCOMPATIBLE = Fit(0, "INCOMPATIBLE")
MIXED = Fit(1, "MIXED")
ADDITIONAL = Fit(2, "ADDITIONAL")
DEFAULTED = Fit(3, "DEFAULTED")
CONVERTED = Fit(4, "CONVERTED")
MATCHED = Fit(5, "MATCHED")


class MatchError(ValidationError):
    """A document that does not fit its description."""


class _Mismatch(Exception):
    """
    A comparison that fell below the requested fit, with the way down to
    it. Renders one line per failed path, e.g.
    ``Map (key) -> Array (i) <<INCOMPATIBLE>>``; a variant contributes one
    line per alternative it tried.
    """

    def __init__(self, where, fit=None, alternatives=()):
        self.path = [where]
        self.fit = fit
        self.alternatives = list(alternatives)

    def within(self, where):
        self.path.insert(0, where)
        return self

    def lines(self, above=()):
        path = list(above) + self.path
        if not self.alternatives:
            return ["%s <<%s>>" % (" -> ".join(path), self.fit)]
        out = []
        for alt in self.alternatives:
            out.extend(alt.lines(path))
        return out

    def __str__(self):
        return "\n".join(self.lines())


def _refuse(raises, message):
    if raises is None:
        return False
    if raises is True:
        raise MatchError(message)
    if isinstance(raises, BaseException):
        raise raises
    raise raises(message)


class Shape(object):
    """
    One value description.

    * match(actual) -- True if the structure matches and every value is of
      the described or a convertible type, nothing missing or extra
    * valid(actual) -- as match, but defaulted or additional data is fine

    Both take ``raises``: None returns the result; True raises MatchError;
    an exception class or callable is called with the message and the
    result raised; an exception instance is raised as is.
    """
    kind = "Value"

    def children(self):
        return ()

    def bind(self, suite):
        for child in self.children():
            child.bind(suite)

    def references(self):
        names = set()
        for child in self.children():
            names |= child.references()
        return names

    def score(self, actual, floor=None):
        """
        :returns: the Fit of actual; with a floor, raise _Mismatch instead
                  of returning anything worse
        """
        raise NotImplementedError

    def label(self, detail):
        return "%s (%s)" % (self.kind, detail)

    def verdict(self, fit, detail, floor):
        if floor is not None and fit < floor:
            raise _Mismatch(self.label(detail), fit)
        return fit

    def match(self, actual, raises=None, match_level=CONVERTED):
        floor = match_level if raises is not None else None
        try:
            fit = self.score(actual, floor)
        except _Mismatch as e:
            return _refuse(raises, str(e))
        return fit >= match_level or _refuse(raises, "did not match")

    def valid(self, actual, raises=None, match_level=MIXED):
        return self.match(actual, raises=raises, match_level=match_level)

    def has_additional(self, actual):
        return self.score(actual) in (ADDITIONAL, MIXED)

    def has_defaulted(self, actual):
        return self.score(actual) in (DEFAULTED, MIXED)

    def incompatible(self, actual):
        return self.score(actual) == INCOMPATIBLE


# atom classifiers

def _fit_undef(x):
    return MATCHED


def _fit_bool(x):
    if x is None:
        return DEFAULTED
    if isinstance(x, bool):
        return MATCHED
    if isinstance(x, (int, float)):
        return CONVERTED if x in (0, 1) else INCOMPATIBLE
    if isinstance(x, str):
        return CONVERTED if x in ("", "true", "false") else INCOMPATIBLE
    return INCOMPATIBLE


def _fit_int(x):
    if x is None or x == "":
        return DEFAULTED
    if isinstance(x, bool):
        return CONVERTED
    if isinstance(x, int):
        return MATCHED
    if isinstance(x, float):
        return CONVERTED if x.is_integer() else INCOMPATIBLE
    if isinstance(x, str):
        try:
            int(x)
        except ValueError:
            return INCOMPATIBLE
        return CONVERTED
    return INCOMPATIBLE


def _fit_real(x):
    if x is None or x == "":
        return DEFAULTED
    if isinstance(x, float):
        return MATCHED
    if isinstance(x, int):
        return CONVERTED
    if isinstance(x, str):
        try:
            float(x)
        except ValueError:
            return INCOMPATIBLE
        return CONVERTED
    return INCOMPATIBLE


def _fit_string(x):
    if x is None:
        return DEFAULTED
    if isinstance(x, str):
        return MATCHED
    if isinstance(x, (int, float)):
        return CONVERTED
    return INCOMPATIBLE


class _Atom(Shape):
    def __init__(self, kind, classify):
        self.kind = kind
        self._classify = classify

    def score(self, actual, floor=None):
        return self.verdict(self._classify(actual), actual, floor)


ATOMS = {
    'undef': _Atom("Undef", _fit_undef),
    'bool': _Atom("Bool", _fit_bool),
    'int': _Atom("Int", _fit_int),
    'real': _Atom("Real", _fit_real),
    'string': _Atom("String", _fit_string),
}


class _Literal(Shape):
    """A quoted name or a bare integer, matching only itself."""

    def __init__(self, token):
        self.token = token
        self.kind = "Number" if isinstance(token, int) else "Name"

    def label(self, detail):
        return "%s::%s (%s)" % (self.kind, self.token, detail)

    def score(self, actual, floor=None):
        fit = INCOMPATIBLE
        if self.kind == "Name":
            if isinstance(actual, str) and actual == self.token:
                fit = MATCHED
        elif isinstance(actual, int) and not isinstance(actual, bool):
            fit = MATCHED if actual == self.token else INCOMPATIBLE
        elif isinstance(actual, str):
            try:
                fit = CONVERTED if int(actual) == self.token else INCOMPATIBLE
            except ValueError:
                pass
        return self.verdict(fit, actual, floor)


class _Sequence(Shape):
    """[a, b] has fixed length; [a, b, ...] repeats the pattern any number of times."""
    kind = "Array"

    def __init__(self, items, repeating):
        self.items = items
        self.repeating = repeating

    def children(self):
        return self.items

    def score(self, actual, floor=None):
        if actual is None:
            actual = []
        if not isinstance(actual, list):
            return self.verdict(INCOMPATIBLE, actual, floor)
        width = len(self.items)
        fit = MATCHED
        if self.repeating:
            count = -(-len(actual) // width) * width
        else:
            count = width
            if len(actual) > width:
                fit = self.verdict(ADDITIONAL, actual, floor)
        for i in range(count):
            item = actual[i] if i < len(actual) else None
            try:
                fit &= self.items[i % width].score(item, floor)
            except _Mismatch as e:
                raise e.within(self.label(i))
        return fit


class _Record(Shape):
    kind = "Map"

    def __init__(self, members):
        self.members = members

    def children(self):
        return self.members.values()

    def score(self, actual, floor=None):
        if actual is None:
            actual = {}
        if not isinstance(actual, dict):
            return self.verdict(INCOMPATIBLE, actual, floor)
        fit = MATCHED
        for key in sorted(self.members):
            try:
                fit &= self.members[key].score(actual.get(key), floor)
            except _Mismatch as e:
                raise e.within(self.label(key))
        extra = sorted(k for k in actual if k not in self.members)
        if extra:
            fit = self.verdict(fit & ADDITIONAL, extra[0], floor)
        return fit


class _Table(Shape):
    """{$: v}: any keys, every value described by v."""
    kind = "Dict"

    def __init__(self, value):
        self.value = value

    def children(self):
        return (self.value,)

    def score(self, actual, floor=None):
        if actual is None:
            actual = {}
        if not isinstance(actual, dict):
            return self.verdict(INCOMPATIBLE, actual, floor)
        fit = MATCHED
        for key in sorted(actual):
            try:
                fit &= self.value.score(actual[key], floor)
            except _Mismatch as e:
                raise e.within(self.label(key))
        return fit


class _Ref(Shape):
    """&name: the best fit among the alternatives the suite declares for name."""
    kind = "Variant"

    def __init__(self, name):
        self.name = name
        self.suite = None

    def bind(self, suite):
        self.suite = suite

    def references(self):
        return {self.name}

    def score(self, actual, floor=None):
        if self.suite is None:
            return INCOMPATIBLE
        fit = INCOMPATIBLE
        failures = []
        for option in self.suite.alternatives(self.name):
            try:
                fit |= option.score(actual, floor)
            except _Mismatch as e:
                failures.append(e)
        if floor is not None and fit < floor and failures:
            raise _Mismatch("&" + self.name, alternatives=failures)
        return fit


class Suite(object):
    """
    Named document descriptions plus the variants they reference.
    """

    def __init__(self):
        self._documents = {}
        self._variants = {}

    def add_document(self, name, shape):
        shape.bind(self)
        self._documents[name] = shape

    def add_variant(self, name, shape):
        shape.bind(self)
        self._variants.setdefault(name, []).append(shape)

    def alternatives(self, name):
        return self._variants.get(name, [])

    def unresolved(self):
        """:returns: variant names referenced but never declared"""
        shapes = list(self._documents.values())
        for options in self._variants.values():
            shapes.extend(options)
        used = set()
        for shape in shapes:
            used |= shape.references()
        return used.difference(self._variants)

    def __contains__(self, name):
        return name in self._documents

    def document(self, name):
        if name not in self._documents:
            raise MatchError("document '{name}' not found in suite", name=name)
        return self._documents[name]

    def match_document(self, name, *args, **kwargs):
        return self.document(name).match(*args, **kwargs)

    def valid_document(self, name, *args, **kwargs):
        return self.document(name).valid(*args, **kwargs)

    def match_variant(self, name, actual, raises=None, match_level=MIXED):
        """
        Check actual against the alternatives declared for &name.

        :returns: True, or False/raise as for Shape.match
        """
        ref = _Ref(name)
        ref.bind(self)
        return ref.match(actual, raises=raises, match_level=match_level)


_WORD = re.compile(r'[A-Za-z_][A-Za-z0-9_/-]*')
# quoted selectors are task names, which use hyphens
_SELECTOR = re.compile(r'[A-Za-z_][A-Za-z0-9_-]*')


class _SchemaParser(Scanner):
    def expect(self, lit, what):
        self.parse_s()
        return self.required(self.parse_literal(lit), "expected " + what)

    def word(self):
        self.parse_s()
        w = self.parse_re(_WORD)
        if w and '-' in w:
            self.error("malformed name: hyphen (-) not allowed")
        return w

    def shape(self):
        """:returns: the Shape at the current position, or None"""
        self.parse_s()
        if self.parse_literal('"'):
            token = self.required(self.parse_re(_SELECTOR), 'expected name in quotes')
            self.required(self.parse_literal('"'), 'expected close quote')
            return _Literal(token)
        if self.parse_literal('['):
            return self.sequence()
        if self.parse_literal('{'):
            return self.record()
        if self.parse_literal('&'):
            return _Ref(self.required(self.word(), 'expected variant name'))
        digits = self.parse_number()
        if digits is not None:
            return _Literal(int(digits))
        w = self.word()
        if w is None:
            return None
        if w not in ATOMS:
            self.error('unknown type')
        return ATOMS[w]

    def sequence(self):
        items = []
        item = self.shape()
        while item is not None:
            items.append(item)
            self.parse_s()
            if not self.parse_literal(','):
                break
            item = self.shape()
        self.parse_s()
        repeating = self.parse_literal('...') is not None
        self.expect(']', 'close bracket')
        if not items:
            self.error('empty array')
        return _Sequence(items, repeating)

    def record(self):
        self.parse_s()
        if self.parse_literal('$'):
            self.expect(':', 'colon')
            value = self.required(self.shape(), 'expected value')
            self.expect('}', 'close bracket')
            return _Table(value)
        members = {}
        key = self.word()
        while key is not None:
            if key in members:
                self.error('duplicate key in map')
            self.expect(':', 'colon')
            members[key] = self.required(self.shape(), 'expected value')
            self.parse_s()
            if not self.parse_literal(','):
                break
            key = self.word()
        self.expect('}', 'close bracket')
        if not members:
            self.error('empty map')
        return _Record(members)

    def suite(self):
        suite = Suite()
        while True:
            self.parse_s()
            if self.parse_literal('%%'):
                name = self.required(self.word(), 'expected document name')
                if name in suite:
                    self.error('duplicate document name')
                suite.add_document(name, self.required(self.shape(), 'expected document value'))
            elif self.parse_literal('&'):
                name = self.required(self.word(), 'expected variant name')
                self.expect('=', 'equals sign')
                suite.add_variant(name, self.required(self.shape(), 'expected variant value'))
            else:
                break
        missing = suite.unresolved()
        if missing:
            self.error('missing definitions of variants: ' + ', '.join(sorted(missing)))
        return suite

    def finish(self, result):
        self.parse_s()
        self.required(self.parse_eof(), 'expected end of input')
        return result


def parse_value(text):
    """Parse the description of a single value, return a Shape"""
    p = _SchemaParser(text)
    return p.finish(p.required(p.shape(), 'expected value'))


def parse_suite(text):
    """Parse a whole suite, return a Suite"""
    p = _SchemaParser(text)
    return p.finish(p.suite())
