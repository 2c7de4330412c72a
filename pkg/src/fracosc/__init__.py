"""Fractional oscillations e_alpha, i_alpha and their numerical toolkit."""
