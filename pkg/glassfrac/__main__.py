# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import sys

from .cli import main


sys.exit(main())
