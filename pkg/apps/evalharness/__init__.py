# Evaluation harness app: correlation experiments and workload reports
