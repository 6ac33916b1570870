"""
Model module - Réaction f = f1 + f2, forçage h et fonctionnelle J_{0,q}
"""
