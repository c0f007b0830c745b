"""markov-decoherence source root."""
