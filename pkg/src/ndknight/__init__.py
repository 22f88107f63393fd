"""Knight's tours, magic knight's tours and their feasibility on n-dimensional boards."""

from .errors import CapacityError, DomainError, InputError, KnightError, ParseError
from .feasibility import FeasibilityVerdict, closed_tour_feasible, magic_tour_feasible, verify_conjecture
from .lattice import (
    Color,
    MoveTable,
    Shape,
    build_move_table,
    cell_color,
    degree_profile,
    enumerate_lines,
    enumerate_space_diagonals,
    knight_neighbors,
)
from .magic import MagicReport, QuartileReport, magic_constant, magic_report, quartile_report
from .search import (
    SearchConfig,
    SearchOutcome,
    exhaustive_closed_count,
    find_magic_tour,
    find_tour,
)
from .tour import Grid, Tour, TourReport, endpoints_same_color, grid_from_tour, tour_from_grid, validate

__version__ = "0.1.0"
