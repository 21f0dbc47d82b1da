# Dataset app: vector files, distances, exact ground truth
