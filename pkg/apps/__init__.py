# Graph ANN hardness toolkit apps
