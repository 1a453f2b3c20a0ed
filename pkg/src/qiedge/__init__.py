"""Training-free edge detection: Laplacian diffusion refinement followed by
hybrid Canny + Laplacian extraction, with a boundary-benchmark harness."""

__version__ = "0.1.0"

from .canny import CannyThresholds, canny, hysteresis, non_max_suppression
from .diffusion import DiffusionConfig, Stencil, diffuse_step, evolve, laplacian
from .edgefilters import (
    GaussianSpec,
    GradientField,
    gaussian_blur,
    gaussian_kernel,
    laplacian_edge_map,
    sobel_edge_map,
    sobel_gradients,
)
from .imagecore import ImageError, clip_intensity, convolve, to_grayscale
from .metrics import EvalReport, MatchTally, PRPoint, dataset_scores, match_edges, pr_curve
from .noise import NoiseSpec, add_gaussian_noise
from .pipeline import EdgeResult, PipelineConfig, Variant, hybrid_fuse, overlay, run_pipeline
