# Search app: greedy search, recall and query effort
