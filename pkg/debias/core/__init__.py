"""Settings, dependency getters and exceptions."""
