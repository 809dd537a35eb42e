"""Soft SPR distance and maximum agreement forests for rooted multifurcating trees."""
