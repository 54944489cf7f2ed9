# Optimistic online reservation package
