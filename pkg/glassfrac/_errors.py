# coding: utf-8

"""
Exports the following items:

 - unwrap()
 - GlassFracError()
 - ConfigurationError()
 - DomainError()
 - AssemblyError()
 - QueryError()
 - SolverError()
 - StepFailure()
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import re
import textwrap


class GlassFracError(Exception):
    """
    Base class for all errors raised by glassfrac
    """

    pass


class ConfigurationError(GlassFracError, ValueError):
    """
    An error indicating an inconsistent scenario, mesh or run configuration.
    Every violation found is collected before the error is raised.
    """

    def __init__(self, violations):
        """
        :param violations:
            A unicode string, or a list of unicode strings, one per problem
        """

        if not isinstance(violations, (list, tuple)):
            violations = [violations]
        self.violations = list(violations)
        if len(self.violations) == 1:
            message = self.violations[0]
        else:
            message = '%d configuration problems:\n%s' % (
                len(self.violations),
                '\n'.join(' - %s' % v for v in self.violations)
            )
        GlassFracError.__init__(self, message)


class DomainError(GlassFracError, ValueError):
    """
    A mathematical function was evaluated outside of its domain
    """

    pass


class AssemblyError(GlassFracError):
    """
    An element produced a degenerate or indefinite contribution
    """

    def __init__(self, message, element=None):
        GlassFracError.__init__(self, message)
        self.element = element


class QueryError(GlassFracError, LookupError):
    """
    A probe location does not fall inside the mesh
    """

    pass


class SolverError(GlassFracError):
    """
    A nonlinear, bound-constrained or staggered iteration did not converge
    """

    def __init__(self, message, diagnostics=None):
        GlassFracError.__init__(self, message)
        self.diagnostics = dict(diagnostics or {})


class StepFailure(SolverError):
    """
    A pseudo-time step could not be completed. When raised out of
    run_quasistatic() the partially completed result is attached as .result
    """

    def __init__(self, message, diagnostics=None, result=None):
        SolverError.__init__(self, message, diagnostics)
        self.result = result


def unwrap(string, *params):
    """
    Takes a multi-line string and does the following:

     - dedents
     - converts newlines with text before and after into a single line
     - strips leading and trailing whitespace

    :param string:
        The string to format

    :param *params:
        Params to interpolate into the string

    :return:
        The formatted string
    """

    output = textwrap.dedent(string)

    # Unwrap lines, taking into account bulleted lists, ordered lists and
    # underlines consisting of = signs
    if output.find('\n') != -1:
        output = re.sub('(?<=\\S)\n(?=[^ \n\t\\d\\*\\-=])', ' ', output)

    if params:
        output = output % params

    output = output.strip()

    return output
