"""
Discretization module - Maillages, champs nodaux, p-Laplacien discret et profils
"""
