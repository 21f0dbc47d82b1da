# Steiner app: minimum-effort subgraphs
