"""Birational projections of Segre products, their Galois descent over finite fields, and hyperplane sections."""
