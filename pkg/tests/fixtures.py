"""Small hand-checkable instances (n <= 4) shared by the unit and acceptance tests."""

# wins[i][j] = number of times i beat j
BT_SYMMETRIC_3 = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
BT_SKEWED_3 = [[0, 2, 1], [0, 0, 1], [1, 1, 0]]
BT_CYCLE_3 = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
BT_DOMINANT_2 = [[0, 3], [0, 0]]
# drawn once from K=3 trials per pair, kept fixed
BT_RANDOM_4 = [[0, 2, 1, 2], [1, 0, 2, 3], [2, 1, 0, 1], [1, 0, 2, 0]]

PATH_4_EDGES = [(0, 1), (1, 2), (2, 3)]
CYCLE_5_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]
MATCHING_4_EDGES = [(0, 1), (2, 3)]
CYCLE_4_EDGES = [(0, 1), (1, 2), (2, 3), (3, 0)]
# 5-cycle plus the chord 2-5 (1-based); degrees (2, 3, 2, 2, 3)
HOUSE_5_EDGES = CYCLE_5_EDGES + [(1, 4)]
