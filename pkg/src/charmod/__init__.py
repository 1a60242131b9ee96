"""Characteristic modules of polyhedral complexes over the Weyl algebra."""

from .errors import CharmodError
from .geometry import Cell, CellComplex, build_complex
from .weyl import WeylElement, parse
from .groebner import LeftIdeal, FreeSubmodule, ideal_intersection
from .presentation import Presentation, presentation, annihilator_by_elimination, is_annihilating
from .annihilator import polytope_annihilator, cone_annihilator, cone_laplace_transform, rational_annihilator
from .homology import bm_betti, bm_chain_complex, direct_image_summand_counts
from .dirimage import dir_image_presentation, reduce_generators, spline_iso_certificate
from .bspline import bspline_value, check_dbh, spline_module_presentation
from .io import load_corpus, parse_complex

__version__ = "0.1.0"
