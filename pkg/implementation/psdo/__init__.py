from .weights import *
from .quantize import *
from .kernel import *
