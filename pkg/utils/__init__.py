"""
Utility modules shared by the numerical core and the command line
"""
