"""fusactk: construct, verify, and dissect fusion action systems of finite groups."""

__version__ = "0.1.0"
