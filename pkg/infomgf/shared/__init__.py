# -*- mode:python; coding:utf-8; -*-

"""Shared configuration models, constants, errors and helpers."""
