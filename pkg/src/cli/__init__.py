"""
CLI module - Configuration des exécutions et commandes
"""
