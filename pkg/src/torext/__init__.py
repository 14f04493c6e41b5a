"""Tor and Ext over complete intersections: E-modules, CI operators, BGG."""
__version__ = "0.1.0"
