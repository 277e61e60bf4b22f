#!/usr/bin/env python
# coding: utf-8
"""
Development task runner, see "python run.py" for the list of tasks
"""
from __future__ import unicode_literals, division, absolute_import, print_function

from dev._task import run_task


run_task()
