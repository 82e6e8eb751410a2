name = "exceptional"
