"""Toolchain for the hO language: compiler front end, C99 transpiler,
deterministic cyclic-executive interpreter and the `hoc` driver."""

__version__ = "0.1.0"
