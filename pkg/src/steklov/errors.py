class NumericalError(RuntimeError):
    """An iteration failed to converge or a factorization broke down."""


class PoleError(ValueError):
    """A spectral parameter sits (numerically) on a Dirichlet eigenvalue."""

    def __init__(self, message, n=None, dirichlet_eigenvalue=None):
        super().__init__(message)
        self.n = n
        self.dirichlet_eigenvalue = dirichlet_eigenvalue
