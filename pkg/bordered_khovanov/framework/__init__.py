"""
Framework package for bordered_khovanov

Run configuration, verification reports and the suite machinery behind `verify`.
"""
