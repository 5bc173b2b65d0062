"""Generalized scattering networks over semi-discrete frames.

Quick start::

    from framescatter import Grid, Signal, FrameCollection, build_wavelet_frame, extract_features
    grid = Grid(2, 64)
    collection = FrameCollection([build_wavelet_frame(grid, J=3, K=4)])
    features = extract_features(collection, Signal.random(grid, rng), max_depth=2)
"""
from .errors import ConfigurationError, HypothesisError, NotAFrameError
from .signal import (Grid, Signal, Spectrum, circular_convolve, delta, dft, feature_norm,
                     idft, involute, modulate, translate)
from .frames import (Atom, FrameCollection, SemiDiscreteFrame, analyze, build_gabor_frame,
                     build_shearlet_frame, build_wavelet_frame, frame_operator,
                     littlewood_paley, normalize_to_bound, tighten_to_parseval)
from .scattering import (FeatureSet, extract_features, feature_distance, hm_norm_partial,
                         u_path, u_step)
from .deformation import (DeformationField, apply_deformation, check_admissible,
                          jacobian_sup_norm, random_smooth_field)
from .verify import (Mollifier, bandlimit_project, stability_constant,
                     verify_deformation_stability, verify_intermediate_bound,
                     verify_lipschitz, verify_translation_invariance)

__version__ = "0.1.0"
