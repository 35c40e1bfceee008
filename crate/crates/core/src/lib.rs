//! Thermodynamic formalism and dimension theory for conformal graph directed
//! Markov systems on intervals.
//!
//! A [`GdmsSystem`] bundles a directed multigraph, one interval per vertex,
//! a contraction per edge (similarities or the continued-fraction maps
//! `x -> 1 / (e + x)`) and an incidence rule saying which edge may follow
//! which. On top of it the crate computes partition sums and pressure
//! brackets ([`thermo`]), Bowen dimension and the component theorems
//! ([`dimension`]), strongly connected structure ([`graph`]) and sampled
//! limit-set points ([`sampler`]). Systems are usually read from the text
//! format in [`specfile`].

pub mod dimension;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod maps;
pub mod sampler;
pub mod specfile;
pub mod system;
pub mod thermo;

pub use dimension::{
    bowen_dimension, classify_hausdorff_measure, component_dimensions, truncation_sweep, BowenOptions, ClassifyOptions,
    ComponentDimension, ComponentDimensions, DimensionEstimate, DimensionMethod, HMeasureVerdict,
    MeasureClassification, SweepEntry, TruncationSweep,
};
pub use error::{GdmsError, Result};
pub use graph::{
    enumerate_words, matrix_properties, scc_decompose, word_limit, ConnectingWord, EdgeGraph, EdgeRecord,
    IncidenceMatrix, IncidenceSpec, MatrixProperties, MultiGraph, SccReport, Verdict, Witness, Word,
};
pub use maps::{ContractionFamily, DerivativeNorm, Similarity, VertexSpace};
pub use sampler::{box_dimension, sample_points, BoxCount, LimitPointSample, SamplePoint, GENERATOR};
pub use specfile::{parse_spec, serialize, ParsedSpec};
pub use system::{Alphabet, GdmsSystem};
pub use thermo::{
    conformal_cylinder_measure, finiteness_parameters, partition_sum, partition_sum_with, pressure, pressure_curve,
    theta, CylinderMeasure, FinitenessReport, Fraction, PartitionSum, PressureEstimate, PressureMethod, PressureValue,
    SumMethod, ThetaWitness, WitnessSide,
};
