name = "knef"
