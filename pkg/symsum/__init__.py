name = "symsum"
