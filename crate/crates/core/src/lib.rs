//! Circuit-level model of piezo-optomechanical microwave-to-optical
//! transducers: device equivalent circuits, optomechanical loading, figures
//! of merit, matching-network design and a scenario-file command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit_model;
pub mod cli_io;
pub mod designer;
pub mod error;
pub mod figures;
pub mod optomech;

pub use circuit_model::{BvdParams, Environment, MatchingNetwork, MechanicalMode, Topology};
pub use designer::{design, evaluate, DesignMode, DesignRequest, DesignResult};
pub use error::{Error, Result};
pub use figures::{figures_of_merit, Direction, FiguresOfMerit, TransducerScenario};
pub use optomech::{KappaExtRule, OpticalSubsystem};
