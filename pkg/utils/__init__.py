# Utilitaires du visualiseur de résultats
