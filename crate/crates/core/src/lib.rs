//! Toolkit for graph C*-algebras of quantum odd spheres and projective spaces:
//! K-theory of the vertex matrices, gauge-invariant ideal lattices and
//! quotients, a symbolic Cuntz-Krieger calculus with generator maps, a formal
//! KK-class rewriting engine, and truncated Hilbert-space representations.

pub mod graph;
pub mod graphfile;
pub mod catalog;
pub mod ideal;
pub mod kk;
pub mod ktheory;
pub mod numerics;
pub mod star;
