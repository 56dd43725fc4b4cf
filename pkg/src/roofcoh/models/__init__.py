"""Pure and mixed states, coherence functionals, channels and parameters."""
