"""
    This sub-package gathers helper scripts around freediv: reading and writing configuration and report files, and
    running series of experiments listed in a scenario file.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""
