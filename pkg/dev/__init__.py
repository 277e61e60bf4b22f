# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import os


package_name = "glassfrac"

# Libraries whose versions are printed before tests run
reported_packages = [
    "numpy",
    "scipy",
]

task_keyword_args = [
    {
        'name': 'acceptance',
        'placeholder': '1',
        'env_var': 'GLASSFRAC_ACCEPTANCE',
    },
]

package_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
