# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import sys
import unittest

from . import make_suite


result = unittest.TextTestRunner(stream=sys.stdout, verbosity=2).run(make_suite())
sys.exit(0 if result.wasSuccessful() else 1)
