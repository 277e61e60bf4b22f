# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

from .version import __version__, __version_info__

__all__ = [
    '__version__',
    '__version_info__',
    'load_order',
]


def load_order():
    """
    Returns a list of the module and sub-module names for glassfrac in
    dependency load order, for the sake of live reloading code

    :return:
        A list of unicode strings of module names, as they would appear in
        sys.modules, ordered by which module should be reloaded first
    """

    return [
        'glassfrac._errors',
        'glassfrac._types',
        'glassfrac._sparse',
        'glassfrac.version',
        'glassfrac.materials',
        'glassfrac.phasefield',
        'glassfrac._problem',
        'glassfrac.mesh',
        'glassfrac.fem2d',
        'glassfrac.beam1d',
        'glassfrac.solver',
        'glassfrac.scenarios',
        'glassfrac.config',
        'glassfrac.export',
        'glassfrac.cli',
        'glassfrac.__main__',
        'glassfrac',
    ]
