__version__ = "0.1.0"
__author__  = 'acorp developers'
__credits__ = 'acorp developers'
