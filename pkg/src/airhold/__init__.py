"""Holding-maneuver prediction over an airport flight network.

Flights form a directed multigraph; its weighted collapse yields per-edge
network features (betweenness, flow betweenness, local connectivity, degree
differences, Google-matrix entries) that feed a gradient-boosted classifier
and regressor. A graph attention network learns the same task directly on
the multigraph. A JSON service and CLI expose the models for interactive
what-if simulation.
"""

__version__ = "0.1.0"
