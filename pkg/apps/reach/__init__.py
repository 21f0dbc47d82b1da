# Reach app: critical point search over a union-find set graph
