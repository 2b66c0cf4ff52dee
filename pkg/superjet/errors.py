"""
Exceptions raised by the superjet engine.

Every error derives from SuperjetError. Messages may contain format string
references to any keyword argument passed to the constructor; those keyword
arguments also become attributes of the exception, so callers can inspect
e.g. ``exc.i`` on an IrreducibilityViolated.
"""


class SuperjetError(Exception):
    """
    Base class for engine errors.
    """
    default_msg = "superjet error"

    def __init__(self, msg=None, **kwds):
        """
        Pass:

        msg:  the error message, possibly with {name} references
        kwds: values to format into 'msg'; each is stored as an attribute
        """
        if msg is None:
            msg = self.default_msg
        for key, value in kwds.items():
            setattr(self, key, value)
        self.msg = msg.format(**kwds) if kwds else msg
        super(SuperjetError, self).__init__(self.msg)


class DivisionByZero(SuperjetError, ZeroDivisionError):
    default_msg = "division by zero"


class MixedExtension(SuperjetError):
    default_msg = "operands belong to incompatible scalar towers"


class PoleAtPoint(SuperjetError):
    default_msg = "denominator vanishes at the evaluation point"


class NonSquareRoot(SuperjetError):
    default_msg = "f[{i}] = {value} is not the square of a rational"


class NotPolynomial(SuperjetError):
    default_msg = "value is not a differential polynomial; residue {residue}"


class NonHomogeneous(SuperjetError):
    default_msg = "input is not homogeneous in super degree"


class UnverifiedStructure(SuperjetError):
    default_msg = "structure has not been verified as Hamiltonian"


class ZeroMetricEntry(SuperjetError):
    default_msg = "f[{i}] is zero"


class NotBihamiltonian(SuperjetError):
    default_msg = "brackets of the assembled pair do not vanish: {failed}"


class WrongBidegree(SuperjetError):
    default_msg = "expected bidegree {expected}, got {actual}"


class NotSingleVariable(SuperjetError):
    default_msg = "c[{i}] must depend on u[{i}] only"


class NotACocycle(SuperjetError):
    default_msg = "form is not annihilated by D0 D1"


class NotHomogeneous(SuperjetError):
    default_msg = "sum_j u[j] d_j f[{i}] / f[{i}] is not a constant"


class IrreducibilityViolated(SuperjetError):
    default_msg = "(d[{i}] - d[{j}]) d_{i} f[{j}] does not vanish"


class ConformalityFailed(SuperjetError):
    default_msg = "Euler field fails {identity}"


class DegenerateScaling(SuperjetError):
    default_msg = "lambda1 must differ from lambda0"


class RootNotRegistered(SuperjetError):
    default_msg = "root symbols s[i] are not registered for this structure"


class WrongShape(SuperjetError):
    default_msg = "form has a monomial outside the normal-form shape: {monomial}"


class UnknownSpace(SuperjetError):
    default_msg = "unknown space '{space}'"


class SystemTooLarge(SuperjetError):
    default_msg = "{unknowns} unknowns exceed the cap of {cap}"


class ValidationError(SuperjetError, ValueError):
    default_msg = "invalid scenario"


class IndexOutOfRange(SuperjetError):
    default_msg = "index {i} outside 1..{n}"


class ParseError(SuperjetError):
    """
    An error encountered when parsing expression or schema text.

    Properties

    * line - the line the error occurred on
    * char - the character number on the line
    """

    def __init__(self, msg, line, char):
        # the message is literal text, not a format string
        super(ParseError, self).__init__(msg.replace("{", "{{").replace("}", "}}"),
                                         line=line, char=char)

    def __str__(self):
        return "line %d, char %d: %s" % (self.line, self.char, self.msg)
