# semiflow: semigroup-accelerated fixed-point iterations for structured matrix equations
__version__ = "0.1.0"
