//! Quantum data model: states, POVMs, measurement assemblages,
//! conditional-state assemblages, correlation tensors, Fourier/disjoint
//! bases, local-unitary transport and state factories.

mod assemblage;
mod basis;
mod povm;
mod state;

pub use assemblage::{assemblage_of, correlations_of, Assemblage, CorrelationTensor};
pub use basis::{fourier_basis, is_disjoint, Basis, DISJOINT_TOL};
pub use povm::{smear_parent_povm, MeasurementAssemblage, Povm, ResponseTable, PSD_TOL};
pub use state::{
    apply_local_unitary, maximally_entangled, product_state, product_vector, pure_from_schmidt,
    DensityMatrix,
};

pub(crate) use basis::max_cross_overlap;
