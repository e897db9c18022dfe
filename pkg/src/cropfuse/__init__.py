"""Multispectral crop-row segmentation: NDVI, early/late fusion, classical segmenters, benchmarks."""

from .errors import CropFuseError

__version__ = "0.1.0"
__all__ = ["CropFuseError", "__version__"]
