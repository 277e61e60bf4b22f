# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import inspect
import numbers

import numpy as np

from ._errors import unwrap


def type_name(value):
    """
    Returns a user-readable name for the type of an object

    :param value:
        A value to get the type name of

    :return:
        A unicode string of the object's type name
    """

    if inspect.isclass(value):
        cls = value
    else:
        cls = value.__class__
    if cls.__module__ in set(['builtins', '__builtin__']):
        return cls.__name__
    return '%s.%s' % (cls.__module__, cls.__name__)


def check_real(name, value, minimum=None, maximum=None, inclusive=(True, True)):
    """
    Validates a scalar real argument

    :param name:
        A unicode string of the parameter name, used in error messages

    :param value:
        The value to check

    :param minimum:
        None or the lower limit

    :param maximum:
        None or the upper limit

    :param inclusive:
        A 2-element tuple of bools, if the lower/upper limits are allowed

    :raises:
        TypeError - when value is not a real number
        ValueError - when value is NaN or outside of the limits

    :return:
        The value as a float
    """

    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(unwrap(
            '''
            %s must be a real number, not %s
            ''',
            name,
            type_name(value)
        ))
    value = float(value)
    if value != value:
        raise ValueError('%s must not be NaN' % name)
    if minimum is not None:
        if value < minimum or (not inclusive[0] and value == minimum):
            raise ValueError(unwrap(
                '''
                %s must be %s %r, not %r
                ''',
                name,
                '>=' if inclusive[0] else '>',
                minimum,
                value
            ))
    if maximum is not None:
        if value > maximum or (not inclusive[1] and value == maximum):
            raise ValueError(unwrap(
                '''
                %s must be %s %r, not %r
                ''',
                name,
                '<=' if inclusive[1] else '<',
                maximum,
                value
            ))
    return value


def check_unit_interval(name, value):
    """
    Validates a damage value or array of damage values lies in [0, 1]

    :param name:
        A unicode string of the parameter name

    :param value:
        A float or numpy array

    :raises:
        ValueError - when any entry is outside of [0, 1]

    :return:
        The value as a float or float64 numpy array
    """

    arr = np.asarray(value, dtype=np.float64)
    if arr.size and (np.any(arr < 0.0) or np.any(arr > 1.0) or np.any(np.isnan(arr))):
        raise ValueError(unwrap(
            '''
            %s must lie in the interval [0, 1], got values in [%r, %r]
            ''',
            name,
            float(np.nanmin(arr)),
            float(np.nanmax(arr))
        ))
    if arr.ndim == 0:
        return float(arr)
    return arr
