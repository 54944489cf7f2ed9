# Command-line package
