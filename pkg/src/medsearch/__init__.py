"""
medsearch - multi-agent medical information search

A security-gated agent platform that annotates a user's health query,
collects matching records from medical web sites with either a static
coordinator and per-category web agents or a single mobile coordinating
agent, and personalizes the merged results.
"""

__version__ = "0.1.0"
__app_name__ = "medsearch"
