# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import importlib
import importlib.util
import os
import sys

from . import package_name, package_root, reported_packages


def _import_from(mod, path, allow_error=False):
    """
    Imports a module from a specific path

    :param mod:
        A unicode string of the module name

    :param path:
        A unicode string to the directory containing the module

    :param allow_error:
        If an ImportError should be raised when the module can't be imported

    :return:
        None if not loaded, otherwise the module
    """

    if mod in sys.modules:
        return sys.modules[mod]

    mod_dir = mod.replace('.', os.sep)
    if not os.path.exists(path):
        return None

    source_path = os.path.join(path, mod_dir, '__init__.py')
    search_locations = [os.path.dirname(source_path)]
    if not os.path.exists(source_path):
        source_path = os.path.join(path, mod_dir + '.py')
        search_locations = None

    if not os.path.exists(source_path):
        return None

    try:
        # Parent packages must be loaded before their submodules
        if '.' in mod:
            parent = mod.rsplit('.', 1)[0]
            if parent not in sys.modules:
                importlib.import_module(parent)
        spec = importlib.util.spec_from_file_location(mod, source_path, submodule_search_locations=search_locations)
        module = importlib.util.module_from_spec(spec)
        sys.modules[mod] = module
        spec.loader.exec_module(module)
        return module

    except ImportError:
        sys.modules.pop(mod, None)
        if allow_error:
            raise
        return None


def _preload(print_info):
    """
    Preloads glassfrac from the local source checkout, falling back to a
    normal install

    :param print_info:
        A bool if info about glassfrac and its numeric stack should be printed
    """

    if print_info:
        print('Working dir: ' + os.getcwd())
        print('Python ' + sys.version.replace('\n', ''))

    glassfrac = _import_from(package_name, package_root)
    if glassfrac is None:
        import glassfrac

    if print_info:
        print('\nglassfrac: %s, %s' % (glassfrac.__version__, os.path.dirname(glassfrac.__file__)))
        for name in reported_packages:
            module = importlib.import_module(name)
            print('%s: %s' % (name, module.__version__))
