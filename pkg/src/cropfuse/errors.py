"""Exception hierarchy shared across the toolkit."""


class CropFuseError(Exception):
    """Base class for every error raised by cropfuse."""

    kind = "error"


class DimensionMismatch(CropFuseError):
    kind = "dimension_mismatch"


class DomainError(CropFuseError):
    kind = "domain"


class OutOfRange(CropFuseError):
    kind = "out_of_range"


class FormatError(CropFuseError):
    """Unreadable, truncated or unsupported file."""

    kind = "format"


class DegenerateHistogram(CropFuseError):
    kind = "degenerate_histogram"


class NoMarkers(CropFuseError):
    kind = "no_markers"


class ImageTooSmall(CropFuseError):
    kind = "image_too_small"


class MissingBand(CropFuseError):
    kind = "missing_band"


class EmptyDataset(CropFuseError):
    kind = "empty_dataset"


class IncompleteFrame(CropFuseError):
    kind = "incomplete_frame"

    def __init__(self, frame_id, missing):
        self.frame_id = frame_id
        self.missing = list(missing)
        names = ", ".join(str(m) for m in self.missing)
        super().__init__(f"frame {frame_id!r} is missing [{names}]")


class MissingMask(CropFuseError):
    kind = "missing_mask"


class ConfigError(CropFuseError):
    """Invalid parameter combination; surfaced as a usage error by the CLI."""

    kind = "config"


class FrameError(CropFuseError):
    """Wraps a module error with the frame it occurred on."""

    kind = "frame"

    def __init__(self, frame_id, cause):
        self.frame_id = frame_id
        self.cause = cause
        super().__init__(f"frame {frame_id}: {type(cause).__name__}: {cause}")
