"""Exception hierarchy. Every error carries the exit code the CLI returns for it."""


class DrmError(Exception):
    exit_code = 1


class InvalidArgumentError(DrmError, ValueError):
    exit_code = 2


class ShapeMismatchError(InvalidArgumentError):
    def __init__(self, what, *shapes):
        self.shapes = shapes
        super().__init__(f"{what}: shape mismatch {' vs '.join(str(s) for s in shapes)}")


class UnmatchedFilesError(InvalidArgumentError):
    def __init__(self, names):
        self.names = sorted(names)
        super().__init__("unmatched filenames: " + ", ".join(self.names))


class ImageIOError(DrmError, OSError):
    exit_code = 3
    code = "io error"

    def __init__(self, path, detail=""):
        self.path = str(path)
        message = f"{self.code}: {self.path}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class UnreadableImageError(ImageIOError):
    code = "unreadable"


class UnsupportedFormatError(ImageIOError):
    code = "unsupported format"


class ZeroDimensionError(ImageIOError):
    code = "zero dimension"


class ImageWriteError(ImageIOError):
    code = "write failed"


class SolverError(DrmError):
    exit_code = 4


class ConvergenceError(SolverError):
    def __init__(self, residual, tolerance, iterations):
        self.residual = residual
        self.tolerance = tolerance
        self.iterations = iterations
        super().__init__(
            f"conjugate gradient did not converge in {iterations} iterations "
            f"(residual {residual:.3e} > {tolerance:.3e})"
        )


class OracleError(DrmError):
    pass
