"""Reference counts for the metabelian F-manifold operad.

Census rows list, per colouring pattern in census order (binary, first vertex
lowest, black = 0), the number of multilinear sequences passing conditions
1-6.  ``CENSUS_REDUCTIONS`` gives the patterns thinned by condition 7.
"""

FMAN_DIMS = {1: 1, 2: 2, 3: 9, 4: 42, 5: 224, 6: 1444, 7: 10870}

CENSUS = {
    4: (3, 8, 12, 0, 6, 12, 4, 0),
    5: (4, 15, 40, 0, 30, 30, 0, 0, 10, 30, 60, 0, 10, 10, 0, 0),
    6: (
        5, 24, 90, 0, 120, 120, 0, 0, 60, 180, 180, 0, 0, 0, 0, 0,
        15, 60, 180, 0, 180, 180, 0, 0, 20, 60, 60, 0, 0, 0, 0, 0,
    ),
}

# pattern written with "b" (bracket) and "w" (product) -> number removed
CENSUS_REDUCTIONS = {
    4: {"wbw": 3},
    5: {"bwbw": 15},
    6: {"bbwbw": 45, "wbwbw": 45},
}
