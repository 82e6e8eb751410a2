name = "geography"
