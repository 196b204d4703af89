"""HH-Center

Centers of concave functions over convex bodies, the truncated-cone upper
bounds for averages of convex gauges of them, and numerical verification of
those bounds against direct integration.
"""

__version__ = "0.1.0"
