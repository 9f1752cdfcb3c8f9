"""Small helpers shared by services and the command line."""
