# SPDX-License-Identifier: Apache-2.0
"""Analog subcircuit identification toolkit for flat SPICE netlists."""

try:
    from ._subckt import *  # noqa: F401,F403
    from ._subckt import __doc__  # noqa: F401
except ImportError:  # running against a build tree
    from _subckt import *  # noqa: F401,F403

__version__ = "0.1.0"
