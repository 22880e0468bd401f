# Decoherence in a coined quantum walk on the line
# Simulation engines and CLI live in the walks app
