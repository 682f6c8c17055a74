# Tests package for motivic-infogeo
