# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import io
import os
import re

from . import package_root, package_name


run_args = [
    {
        'name': 'pep440_version',
        'required': True
    },
]

_ASSIGNMENTS = {
    '__version__ = ': lambda version, info: '__version__ = %r\n' % version,
    '__version_info__ = ': lambda version, info: '__version_info__ = %r\n' % (info,),
    'PACKAGE_VERSION = ': lambda version, info: 'PACKAGE_VERSION = %r\n' % version,
}


def run(new_version):
    """
    Updates the package version in the package, setup.py and the tests, which
    refuse to run against a glassfrac of another version

    :param new_version:
        A unicode string of the new version as a restricted PEP 440 version

    :return:
        A bool - if the version number was successfully bumped
    """

    version_match = re.match(
        r'(\d+)\.(\d+)\.(\d+)(?:\.((?:dev|a|b|rc)\d+))?$',
        new_version
    )
    if not version_match:
        raise ValueError('Invalid PEP 440 version: %s' % new_version)

    new_version_info = tuple(int(version_match.group(i)) for i in (1, 2, 3))
    if version_match.group(4):
        new_version_info += (version_match.group(4),)

    file_paths = [
        os.path.join(package_root, package_name, 'version.py'),
        os.path.join(package_root, 'setup.py'),
        os.path.join(package_root, 'tests', '__init__.py'),
    ]

    for file_path in file_paths:
        with io.open(file_path, 'r', encoding='utf-8') as f:
            orig_source = f.read()

        found = 0
        new_source = ''
        for line in orig_source.splitlines(True):
            for prefix, render in _ASSIGNMENTS.items():
                if line.startswith(prefix):
                    found += 1
                    line = render(new_version, new_version_info)
                    break
            new_source += line

        if found == 0:
            raise ValueError('Did not find any versions in %s' % file_path)

        s = 's' if found > 1 else ''
        rel_path = os.path.relpath(file_path, package_root)
        if new_source != orig_source:
            print('Updated %d version%s in %s' % (found, s, rel_path))
            with io.open(file_path, 'w', encoding='utf-8') as f:
                f.write(new_source)
        else:
            print('%d version%s in %s %s up-to-date' % (found, s, rel_path, 'was' if found == 1 else 'were'))

    return True
