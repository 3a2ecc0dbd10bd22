# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""Command registration for matgen."""

from .commands_query import register_query_commands
from .commands_verify import register_verify_commands


def register_all_commands(subparsers):
    register_query_commands(subparsers)
    register_verify_commands(subparsers)
