from polysound.utils.utils import *
from polysound.utils.module_handler import ModuleHandler
