# Graphs app: KGraph, approximate MRNG and HNSW-base indexes
