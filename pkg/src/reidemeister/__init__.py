"""Reidemeister numbers and spectra of split metacyclic groups."""
