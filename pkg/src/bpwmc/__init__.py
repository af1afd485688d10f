"""Hardcore-model Glauber dynamics on graphs of bounded bipartite pathwidth."""

__version__ = "0.1.0"
