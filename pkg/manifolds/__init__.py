name = "manifolds"
