use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg::seeded_rng;
use crate::point::{Point, Shape};

const MASK_MAGIC: &[u8; 4] = b"CDPM";
const UNIT_MODULUS_TOL: f64 = 1e-12;

#[derive(Clone)]
enum Transform {
    /// Orthonormal 2-D DFT.
    Fft {
        row_fwd: Arc<dyn Fft<f64>>,
        row_inv: Arc<dyn Fft<f64>>,
        col_fwd: Arc<dyn Fft<f64>>,
        col_inv: Arc<dyn Fft<f64>>,
    },
    /// `F = I`. Test hook for closed-form gradients.
    Identity,
}

/// Coded diffraction operator `(Kx)_r = F(M_r ⊙ x)` for real images `x`.
///
/// Output is the concatenation over masks, each block row-major `H×W`.
#[derive(Clone)]
pub struct CdpOperator {
    shape: Shape,
    masks: Vec<Vec<Complex64>>,
    transform: Transform,
}

impl fmt::Debug for CdpOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CdpOperator")
            .field("shape", &self.shape)
            .field("masks", &self.masks.len())
            .field("fft", &matches!(self.transform, Transform::Fft { .. }))
            .finish()
    }
}

impl CdpOperator {
    /// Every mask must have `H·W` entries of modulus 1.
    pub fn new(shape: Shape, masks: Vec<Vec<Complex64>>) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::InvalidInput("empty image shape".into()));
        }
        if masks.is_empty() {
            return Err(Error::InvalidInput("at least one mask is required".into()));
        }
        for (r, m) in masks.iter().enumerate() {
            if m.len() != shape.len() {
                return Err(Error::InvalidInput(format!(
                    "mask {r} has {} entries, expected {}",
                    m.len(),
                    shape.len()
                )));
            }
            if let Some(i) = m
                .iter()
                .position(|c| !((c.norm() - 1.0).abs() <= UNIT_MODULUS_TOL))
            {
                return Err(Error::InvalidInput(format!(
                    "mask {r} entry {i} has modulus {}",
                    m[i].norm()
                )));
            }
        }
        let mut planner = FftPlanner::new();
        let transform = Transform::Fft {
            row_fwd: planner.plan_fft_forward(shape.width),
            row_inv: planner.plan_fft_inverse(shape.width),
            col_fwd: planner.plan_fft_forward(shape.height),
            col_inv: planner.plan_fft_inverse(shape.height),
        };
        Ok(CdpOperator {
            shape,
            masks,
            transform,
        })
    }

    /// `m` masks with entries drawn uniformly from `{1, −1, i, −i}`.
    pub fn random(shape: Shape, m: usize, seed: u64) -> Result<Self> {
        const UNITS: [Complex64; 4] = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ];
        let mut rng = seeded_rng(seed);
        let masks = (0..m)
            .map(|_| (0..shape.len()).map(|_| UNITS[rng.random_range(0..4)]).collect())
            .collect();
        CdpOperator::new(shape, masks)
    }

    /// Single all-ones mask with `F = I`, so `Kx = x`.
    pub fn identity_surrogate(shape: Shape) -> Self {
        CdpOperator {
            shape,
            masks: vec![vec![Complex64::new(1.0, 0.0); shape.len()]],
            transform: Transform::Identity,
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn num_masks(&self) -> usize {
        self.masks.len()
    }

    pub fn masks(&self) -> &[Vec<Complex64>] {
        &self.masks
    }

    /// Length of `Kx`.
    pub fn output_len(&self) -> usize {
        self.masks.len() * self.shape.len()
    }

    fn fft2(&self, buf: &mut [Complex64], inverse: bool) {
        let Transform::Fft {
            row_fwd,
            row_inv,
            col_fwd,
            col_inv,
        } = &self.transform
        else {
            return;
        };
        let (h, w) = (self.shape.height, self.shape.width);
        let (row, col) = if inverse { (row_inv, col_inv) } else { (row_fwd, col_fwd) };
        row.process(buf);
        let mut column = vec![Complex64::default(); h];
        for j in 0..w {
            for i in 0..h {
                column[i] = buf[i * w + j];
            }
            col.process(&mut column);
            for i in 0..h {
                buf[i * w + j] = column[i];
            }
        }
        let scale = 1.0 / (self.shape.len() as f64).sqrt();
        buf.iter_mut().for_each(|c| *c *= scale);
    }

    /// `Kx` for `x` with `H·W` entries.
    pub fn forward(&self, x: &Point) -> Result<Vec<Complex64>> {
        if x.len() != self.shape.len() {
            return Err(Error::InvalidInput(format!(
                "image has {} entries, operator expects {}",
                x.len(),
                self.shape
            )));
        }
        if let Some(s) = x.shape() {
            if s != self.shape {
                return Err(Error::InvalidInput(format!(
                    "image shape {s} does not match operator shape {}",
                    self.shape
                )));
            }
        }
        let n = self.shape.len();
        let mut out = Vec::with_capacity(self.output_len());
        for m in &self.masks {
            let start = out.len();
            out.extend(m.iter().zip(x.values()).map(|(c, &v)| c * v));
            self.fft2(&mut out[start..start + n], false);
        }
        Ok(out)
    }

    /// `Re Σ_r conj(M_r) ⊙ F⁻¹(z_r)`.
    pub fn adjoint(&self, z: &[Complex64]) -> Result<Point> {
        if z.len() != self.output_len() {
            return Err(Error::InvalidInput(format!(
                "adjoint input has {} entries, expected {}",
                z.len(),
                self.output_len()
            )));
        }
        let n = self.shape.len();
        let mut acc = vec![0.0; n];
        let mut buf = vec![Complex64::default(); n];
        for (r, m) in self.masks.iter().enumerate() {
            buf.copy_from_slice(&z[r * n..(r + 1) * n]);
            self.fft2(&mut buf, true);
            for ((a, c), b) in acc.iter_mut().zip(m).zip(&buf) {
                *a += (c.conj() * b).re;
            }
        }
        Ok(Point::from_raw(acc, Some(self.shape)))
    }

    /// `Re K_r† K_r x` for one mask.
    pub(crate) fn mask_normal(&self, r: usize, x: &[f64]) -> Vec<f64> {
        let n = self.shape.len();
        let m = &self.masks[r];
        let mut buf: Vec<Complex64> = m.iter().zip(x).map(|(c, &v)| c * v).collect();
        self.fft2(&mut buf, false);
        self.fft2(&mut buf, true);
        (0..n).map(|i| (m[i].conj() * buf[i]).re).collect()
    }

    pub fn write_masks(&self, mut w: impl Write) -> Result<()> {
        w.write_all(MASK_MAGIC)?;
        for v in [self.masks.len(), self.shape.height, self.shape.width] {
            let v = u32::try_from(v)
                .map_err(|_| Error::InvalidInput("mask dimensions exceed u32".into()))?;
            w.write_all(&v.to_le_bytes())?;
        }
        for m in &self.masks {
            for c in m {
                w.write_all(&c.re.to_le_bytes())?;
                w.write_all(&c.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_masks(mut r: impl Read, source_name: &str) -> Result<Self> {
        let perr = |message: String| Error::Parse {
            source_name: source_name.to_string(),
            line: None,
            message,
        };
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|e| perr(format!("truncated header: {e}")))?;
        if &magic != MASK_MAGIC {
            return Err(perr("bad magic, expected CDPM".into()));
        }
        let mut dims = [0usize; 3];
        for d in dims.iter_mut() {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)
                .map_err(|e| perr(format!("truncated header: {e}")))?;
            *d = u32::from_le_bytes(b) as usize;
        }
        let [m, h, w] = dims;
        let shape = Shape::new(h, w);
        let mut masks = Vec::with_capacity(m);
        let mut b = [0u8; 16];
        for k in 0..m {
            let mut mask = Vec::with_capacity(shape.len());
            for _ in 0..shape.len() {
                r.read_exact(&mut b)
                    .map_err(|e| perr(format!("truncated mask {k}: {e}")))?;
                let re = f64::from_le_bytes(b[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(b[8..].try_into().expect("8 bytes"));
                mask.push(Complex64::new(re, im));
            }
            masks.push(mask);
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(perr("trailing bytes after the last mask".into()));
        }
        CdpOperator::new(shape, masks)
    }

    pub fn save_masks(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(crate::error::create_file(path)?);
        self.write_masks(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load_masks(path: &Path) -> Result<Self> {
        let f = std::io::BufReader::new(crate::error::open_file(path)?);
        CdpOperator::read_masks(f, &path.display().to_string())
    }
}

pub fn cdp_forward(k: &CdpOperator, x: &Point) -> Result<Vec<Complex64>> {
    k.forward(x)
}

pub fn cdp_adjoint(k: &CdpOperator, z: &[Complex64]) -> Result<Point> {
    k.adjoint(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impulse_has_flat_spectrum() {
        let s = Shape::new(2, 2);
        let k = CdpOperator::new(s, vec![vec![Complex64::new(1.0, 0.0); 4]]).unwrap();
        let x = Point::image(s, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        for c in k.forward(&x).unwrap() {
            assert!((c - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn single_ones_mask_inverts() {
        let s = Shape::new(3, 5);
        let k = CdpOperator::new(s, vec![vec![Complex64::new(1.0, 0.0); 15]]).unwrap();
        let x = Point::image(s, (0..15).map(|i| (i as f64).sin()).collect()).unwrap();
        let back = k.adjoint(&k.forward(&x).unwrap()).unwrap();
        assert!(back.distance(&x) < 1e-13);
    }

    #[test]
    fn zero_maps_to_zero() {
        let s = Shape::new(4, 4);
        let k = CdpOperator::random(s, 3, 1).unwrap();
        assert!(k.forward(&Point::zeros_image(s)).unwrap().iter().all(|c| c.norm() == 0.0));
        assert_eq!(k.adjoint(&vec![Complex64::default(); 48]).unwrap().norm(), 0.0);
    }

    #[test]
    fn rejects_bad_masks_and_sizes() {
        let s = Shape::new(2, 2);
        assert!(CdpOperator::new(s, vec![vec![Complex64::new(0.5, 0.0); 4]]).is_err());
        assert!(CdpOperator::new(s, vec![vec![Complex64::new(1.0, 0.0); 3]]).is_err());
        let k = CdpOperator::random(s, 2, 0).unwrap();
        assert!(k.forward(&Point::zeros(3)).is_err());
        assert!(k.adjoint(&[Complex64::default(); 4]).is_err());
    }

    #[test]
    fn mask_file_roundtrip() {
        let k = CdpOperator::random(Shape::new(3, 4), 2, 9).unwrap();
        let mut bytes = Vec::new();
        k.write_masks(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 16 + 2 * 12 * 16);
        let back = CdpOperator::read_masks(bytes.as_slice(), "mem").unwrap();
        assert_eq!(back.masks(), k.masks());
        assert!(CdpOperator::read_masks(&bytes[..20], "mem").is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            CdpOperator::read_masks(bad.as_slice(), "mem"),
            Err(Error::Parse { .. })
        ));
    }
}
