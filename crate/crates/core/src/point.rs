//! Real vectors with optional image geometry.

use crate::error::{ensure_same_len, invalid, Result};

/// Row-major image geometry attached to a flattened vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    pub height: usize,
    pub width: usize,
}

impl Shape {
    pub fn new(height: usize, width: usize) -> Self {
        Shape { height, width }
    }

    pub fn len(&self) -> usize {
        self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.height, self.width)
    }
}

/// A point of R^n, usually a flattened image.
///
/// Values built through [`Point::new`] are non-empty and finite. Arithmetic
/// helpers do not re-validate, so callers that iterate (the solver) check
/// [`Point::is_finite`] themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    values: Vec<f64>,
    shape: Option<Shape>,
}

impl Point {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate(&values)?;
        Ok(Point { values, shape: None })
    }

    pub fn image(shape: Shape, values: Vec<f64>) -> Result<Self> {
        validate(&values)?;
        if shape.len() != values.len() {
            return Err(invalid(format!(
                "shape {shape} does not match {} values",
                values.len()
            )));
        }
        Ok(Point {
            values,
            shape: Some(shape),
        })
    }

    /// Builds a point without validating finiteness.
    pub(crate) fn from_raw(values: Vec<f64>, shape: Option<Shape>) -> Self {
        debug_assert!(shape.is_none_or(|s| s.len() == values.len()));
        Point { values, shape }
    }

    pub fn zeros(n: usize) -> Self {
        Point::from_raw(vec![0.0; n], None)
    }

    pub fn zeros_image(shape: Shape) -> Self {
        Point::from_raw(vec![0.0; shape.len()], Some(shape))
    }

    /// Same geometry as `self`, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.values.len());
        Point::from_raw(values, self.shape)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn shape(&self) -> Option<Shape> {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Point) -> f64 {
        dot(&self.values, &other.values)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.values, &self.values)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, a: f64) -> Point {
        self.map(|v| a * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Point {
        Point::from_raw(self.values.iter().map(|&v| f(v)).collect(), self.shape)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Point) -> Point {
        debug_assert_eq!(self.len(), other.len());
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| x + a * y)
            .collect();
        Point::from_raw(values, self.shape.or(other.shape))
    }

    pub fn sub(&self, other: &Point) -> Point {
        self.axpy(-1.0, other)
    }

    pub fn add(&self, other: &Point) -> Point {
        self.axpy(1.0, other)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn check_same_len(&self, other: &Point, what: &str) -> Result<()> {
        ensure_same_len(self.len(), other.len(), what)
    }

    pub(crate) fn check_finite(&self, what: &str) -> Result<()> {
        if !self.is_finite() {
            return Err(invalid(format!("{what}: non-finite entry")));
        }
        Ok(())
    }
}

fn validate(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(invalid("point must have at least one entry"));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(invalid(format!("entry {i} is not finite")));
    }
    Ok(())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(Point::image(Shape::new(2, 2), vec![0.0; 3]).is_err());
    }

    #[test]
    fn axpy_keeps_shape() {
        let s = Shape::new(1, 2);
        let a = Point::image(s, vec![1.0, 2.0]).unwrap();
        let b = Point::new(vec![1.0, 1.0]).unwrap();
        let c = a.axpy(2.0, &b);
        assert_eq!(c.values(), &[3.0, 4.0]);
        assert_eq!(c.shape(), Some(s));
    }
}
