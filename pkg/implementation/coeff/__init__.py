from .field import *
from .ellipticity import *
from .closure import *
from .families import *
