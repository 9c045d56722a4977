from .errors import *
from .util import *
