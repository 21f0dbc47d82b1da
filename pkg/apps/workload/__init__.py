# Workload app: hardness-unbiased query workloads
