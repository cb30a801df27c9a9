"""
Capacity Planner - A network capacity planning toolkit.

This package provides the statistical over-subscription model, Ethernet and
TCP/UDP performance arithmetic, a TCP Reno congestion-control simulator and
Three-Tier / Leaf-Spine / Clos fabric audits, each paired with an
independent check (Monte Carlo simulation, exhaustive routing search or
exact arithmetic).
"""

__version__ = "0.1.0"
