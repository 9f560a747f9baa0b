"""k-color multi-robot motion planning with pumped configurations."""
