TOL_GEOM = 1e-12
"""Absolute slack for membership of the closed domain."""

TOL_CORNER = 1e-9
"""Distance to a vertex (or to the boundary) under which a point is treated as lying on it."""

TOL_NUM = 1e-10
"""Slack for algebraic identities (orthogonality, convexity inequalities)."""
