"""
Solver module - Résolvant, oracle de référence et schéma en temps
"""
