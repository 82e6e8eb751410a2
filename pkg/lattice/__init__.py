name = "lattice"
