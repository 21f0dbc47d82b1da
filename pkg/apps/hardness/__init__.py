# Hardness app: Steiner-hardness, baseline measures, correlations
