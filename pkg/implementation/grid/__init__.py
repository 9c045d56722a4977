from .torus import *
from .spectral import *
