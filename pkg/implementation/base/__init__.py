from .base_report import *
from .base_ensemble import *
