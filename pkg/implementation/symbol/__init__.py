from .table import *
from .construct import *
