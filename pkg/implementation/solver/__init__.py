from .strip import *
from .operators import *
from .symbols import *
