name = "sums"
