from ._karnet import *  # noqa: F401,F403
from ._karnet import __doc__  # noqa: F401
