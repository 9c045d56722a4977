from .ensembles import *
from .factorization import *
from .dn import *
from .domain import *
from .remainder import *
from .semigroup import *
from .phi import *
from .kernel import *
from .quadratic import *
from .oracle import *
from .suites import *
