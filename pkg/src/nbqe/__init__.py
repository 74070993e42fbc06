"""Reference-free quality estimation for English-Hindi MT output.

Sixteen black-box source/target features feed a Gaussian naive Bayes
classifier over four quality grades (poor, average, good, excellent).
"""

from nbqe.errors import DataError, UsageError
from nbqe.grading import Grade

__version__ = "0.1.0"

__all__ = ["DataError", "Grade", "UsageError", "__version__"]
