use num_traits::Float;
use std::fmt::Debug;

/// Real scalar accepted by the graph kernels.
pub trait Scalar: Float + Debug + Send + Sync + 'static {}

impl<T: Float + Debug + Send + Sync + 'static> Scalar for T {}
