"""Normal forms, bases and dimension checks for free metabelian transposed
Poisson algebras and the metabelian F-manifold operad."""

__version__ = "0.1.0"
