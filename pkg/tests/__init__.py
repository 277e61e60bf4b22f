# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import importlib
import importlib.util
import os
import sys
import unittest


__version__ = '0.4.0'
__version_info__ = (0, 4, 0)


def _import_from(mod, path):
    """
    Imports a package from a specific source directory, ahead of any
    installed copy

    :param mod:
        A unicode string of the package name

    :param path:
        A unicode string of the directory containing the package

    :return:
        None if not loaded, otherwise the module
    """

    if mod in sys.modules:
        return sys.modules[mod]

    source_path = os.path.join(path, mod, '__init__.py')
    if not os.path.exists(source_path):
        return None

    spec = importlib.util.spec_from_file_location(
        mod,
        source_path,
        submodule_search_locations=[os.path.dirname(source_path)]
    )
    module = importlib.util.module_from_spec(spec)
    sys.modules[mod] = module
    try:
        spec.loader.exec_module(module)
    except ImportError:
        del sys.modules[mod]
        return None
    return module


def make_suite():
    """
    Constructs a unittest.TestSuite() of all tests for the package. For use
    with setuptools.

    :return:
        A unittest.TestSuite() object
    """

    loader = unittest.TestLoader()
    suite = unittest.TestSuite()
    for test_class in test_classes():
        tests = loader.loadTestsFromTestCase(test_class)
        suite.addTests(tests)
    return suite


def test_classes():
    """
    Returns a list of unittest.TestCase classes for the package

    :return:
        A list of unittest.TestCase classes
    """

    # Prefer the source tree next to the tests over an installed glassfrac
    tests_dir = os.path.dirname(os.path.abspath(__file__))

    glassfrac = None
    if os.path.basename(tests_dir) == 'tests':
        glassfrac = _import_from('glassfrac', os.path.join(tests_dir, '..'))
    if glassfrac is None:
        import glassfrac

    if glassfrac.__version__ != __version__:
        raise AssertionError(
            ('glassfrac tests version %s can not be run with ' % __version__) +
            ('glassfrac version %s' % glassfrac.__version__)
        )

    from .test_acceptance import AcceptanceTests
    from .test_beam1d import Beam1dTests
    from .test_cli import CliTests
    from .test_config import ConfigTests
    from .test_export import ExportTests
    from .test_fem2d import Fem2dTests
    from .test_init import InitTests
    from .test_materials import MaterialsTests
    from .test_mesh import MeshTests
    from .test_phasefield import PhaseFieldTests
    from .test_scenarios import ScenarioTests
    from .test_solver import SolverTests

    return [
        MaterialsTests,
        PhaseFieldTests,
        MeshTests,
        Fem2dTests,
        Beam1dTests,
        SolverTests,
        ScenarioTests,
        ConfigTests,
        ExportTests,
        CliTests,
        InitTests,
        AcceptanceTests,
    ]
