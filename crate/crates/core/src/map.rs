use crate::error::Result;
use crate::linalg::SquareMatrix;

/// A black-box map on square matrices.
///
/// Verification and recovery only ever evaluate maps pointwise through this
/// trait. Plain closures `Fn(&SquareMatrix) -> SquareMatrix` implement it.
pub trait MatrixMap: Sync {
    fn eval(&self, a: &SquareMatrix) -> Result<SquareMatrix>;
}

impl<F> MatrixMap for F
where
    F: Fn(&SquareMatrix) -> SquareMatrix + Sync,
{
    fn eval(&self, a: &SquareMatrix) -> Result<SquareMatrix> {
        Ok(self(a))
    }
}

impl MatrixMap for Box<dyn MatrixMap + Send> {
    fn eval(&self, a: &SquareMatrix) -> Result<SquareMatrix> {
        self.as_ref().eval(a)
    }
}

/// Precomposes a map with transposition: `A ↦ map(Aᵗ)`.
pub struct Transposed<'a, M: ?Sized>(pub &'a M);

impl<M: MatrixMap + ?Sized> MatrixMap for Transposed<'_, M> {
    fn eval(&self, a: &SquareMatrix) -> Result<SquareMatrix> {
        self.0.eval(&a.transpose())
    }
}
