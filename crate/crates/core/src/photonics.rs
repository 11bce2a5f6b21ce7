//! Nearest-neighbour interferometers built from alternating beamsplitter
//! layers, plus Haar-random unitaries.
//!
//! Layer `L0` couples the mode pairs `(0,1), (2,3), ...` and leaves a final
//! mode untouched when `m` is odd. Layer `L1` leaves mode 0 untouched,
//! couples `(1,2), (3,4), ...` and leaves a final mode untouched when `m` is
//! even. A depth-`D` circuit applies `L0` first and alternates, so its
//! unitary is `L_{D-1} ... L1 L0`.
//!
//! The structural zero pattern is propagated alongside the numeric product,
//! so a gate whose angle happens to make it diagonal still counts as
//! coupling its two modes.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Bandwidths, Matrix, StructuralMask};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamsplitterParams {
    pub theta: f64,
    pub phi_t: f64,
    pub phi_r: f64,
}

impl BeamsplitterParams {
    pub const IDENTITY: Self = Self {
        theta: 0.0,
        phi_t: 0.0,
        phi_r: 0.0,
    };

    pub fn new(theta: f64, phi_t: f64, phi_r: f64) -> Self {
        Self {
            theta,
            phi_t,
            phi_r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub parity: u8,
    pub gates: Vec<BeamsplitterParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub m: usize,
    pub depth: usize,
    pub layers: Vec<LayerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CircuitSpec {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit spec is always serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A composed circuit together with its structural zero pattern.
#[derive(Debug, Clone)]
pub struct CompiledCircuit<F: Real> {
    pub unitary: Matrix<Complex<F>>,
    pub mask: StructuralMask,
}

impl<F: Real> CompiledCircuit<F> {
    /// Structural bandwidths `(lower, upper)`.
    pub fn bandwidths(&self) -> Bandwidths {
        self.mask.bandwidths()
    }

    /// Largest number of structurally coupled modes in any row or column.
    pub fn structural_width(&self) -> usize {
        self.mask.max_line_support()
    }
}

/// Number of beamsplitters in a layer of the given parity on `m` modes.
pub fn gate_count(m: usize, parity: u8) -> usize {
    match parity {
        0 => m / 2,
        _ => m.saturating_sub(1) / 2,
    }
}

pub fn beamsplitter_matrix<F: Real>(p: &BeamsplitterParams) -> Matrix<Complex<F>> {
    let (theta, pt, pr) = (
        F::from_f64_lossy(p.theta),
        F::from_f64_lossy(p.phi_t),
        F::from_f64_lossy(p.phi_r),
    );
    let (s, c) = theta.sin_cos();
    let et = Complex::from_polar(F::one(), pt);
    let er = Complex::from_polar(F::one(), pr);
    Matrix::new(2, 2, vec![et * c, er * s, -(er.conj() * s), et.conj() * c])
        .expect("finite angles give finite entries")
}

fn check_layer(spec: &LayerSpec, m: usize) -> Result<()> {
    if spec.parity > 1 {
        return Err(Error::Layout(format!(
            "parity must be 0 or 1, got {}",
            spec.parity
        )));
    }
    let expected = gate_count(m, spec.parity);
    if spec.gates.len() != expected {
        return Err(Error::Layout(format!(
            "parity-{} layer on {m} modes needs {expected} gates, got {}",
            spec.parity,
            spec.gates.len()
        )));
    }
    if let Some(g) = spec
        .gates
        .iter()
        .find(|g| !(g.theta.is_finite() && g.phi_t.is_finite() && g.phi_r.is_finite()))
    {
        return Err(Error::Domain(format!(
            "non-finite beamsplitter angle {g:?}"
        )));
    }
    Ok(())
}

/// Block-diagonal unitary of one layer.
pub fn layer_unitary<F: Real>(spec: &LayerSpec, m: usize) -> Result<Matrix<Complex<F>>> {
    check_layer(spec, m)?;
    let mut u = Matrix::identity(m);
    let offset = spec.parity as usize;
    for (g, params) in spec.gates.iter().enumerate() {
        let b = beamsplitter_matrix::<F>(params);
        let top = offset + 2 * g;
        for i in 0..2 {
            for j in 0..2 {
                u.set(top + i, top + j, b.get(i, j));
            }
        }
    }
    Ok(u)
}

/// Structural pattern of one layer: full 2x2 blocks on the coupled pairs.
pub fn layer_mask(spec: &LayerSpec, m: usize) -> Result<StructuralMask> {
    check_layer(spec, m)?;
    let mut mask = StructuralMask::diagonal(m);
    let offset = spec.parity as usize;
    for g in 0..spec.gates.len() {
        let top = offset + 2 * g;
        mask.set(top, top + 1, true);
        mask.set(top + 1, top, true);
    }
    Ok(mask)
}

/// Multiplies the layers, latest leftmost, tracking the structural pattern.
pub fn compose_circuit<F: Real>(c: &CircuitSpec) -> Result<CompiledCircuit<F>> {
    if c.layers.len() != c.depth {
        return Err(Error::Layout(format!(
            "depth {} but {} layers",
            c.depth,
            c.layers.len()
        )));
    }
    let mut unitary = Matrix::identity(c.m);
    let mut mask = StructuralMask::diagonal(c.m);
    for (i, layer) in c.layers.iter().enumerate() {
        if layer.parity as usize != i % 2 {
            return Err(Error::Layout(format!(
                "layer {i} has parity {}, expected {}",
                layer.parity,
                i % 2
            )));
        }
        unitary = layer_unitary::<F>(layer, c.m)?.matmul(&unitary)?;
        mask = layer_mask(layer, c.m)?.compose(&mask);
    }
    Ok(CompiledCircuit { unitary, mask })
}

/// Random depth-`depth` circuit with every angle uniform in `[0, 2π)`.
pub fn random_shallow_circuit<R: Rng + ?Sized>(
    m: usize,
    depth: usize,
    rng: &mut R,
) -> Result<CircuitSpec> {
    if m < 2 {
        return Err(Error::Domain(format!("need at least 2 modes, got {m}")));
    }
    let two_pi = std::f64::consts::TAU;
    let layers = (0..depth)
        .map(|i| {
            let parity = (i % 2) as u8;
            let gates = (0..gate_count(m, parity))
                .map(|_| {
                    BeamsplitterParams::new(
                        rng.random::<f64>() * two_pi,
                        rng.random::<f64>() * two_pi,
                        rng.random::<f64>() * two_pi,
                    )
                })
                .collect();
            LayerSpec { parity, gates }
        })
        .collect();
    Ok(CircuitSpec {
        m,
        depth,
        layers,
        seed: None,
    })
}

/// Haar-distributed `m x m` unitary.
///
/// Columns of a complex Gaussian matrix are orthonormalised by Gram-Schmidt
/// (two passes). Normalising each column makes the diagonal of the implied
/// triangular factor real and positive, which is the phase convention that
/// yields the Haar measure.
pub fn haar_unitary<F: Real, R: Rng + ?Sized>(m: usize, rng: &mut R) -> Matrix<Complex<F>> {
    let half = F::from_f64_lossy(0.5).sqrt();
    let mut cols: Vec<Vec<Complex<F>>> = (0..m)
        .map(|_| {
            (0..m)
                .map(|_| Complex::new(F::sample_normal(rng) * half, F::sample_normal(rng) * half))
                .collect()
        })
        .collect();
    for j in 0..m {
        for _pass in 0..2 {
            for k in 0..j {
                let proj = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .fold(Complex::new(F::zero(), F::zero()), |a, (q, v)| {
                        a + q.conj() * v
                    });
                let qk = cols[k].clone();
                for (v, q) in cols[j].iter_mut().zip(&qk) {
                    *v -= q * proj;
                }
            }
        }
        let norm = cols[j]
            .iter()
            .fold(F::zero(), |a, v| a + v.norm_sqr())
            .sqrt();
        for v in &mut cols[j] {
            *v /= norm;
        }
    }
    let mut u = Matrix::zeros(m, m);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            u.set(i, j, *v);
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn beamsplitter_special_angles() {
        let id = beamsplitter_matrix::<f64>(&BeamsplitterParams::IDENTITY);
        assert!(id.max_abs_diff(&Matrix::identity(2)) < 1e-15);
        let swap = beamsplitter_matrix::<f64>(&BeamsplitterParams::new(FRAC_PI_2, 0.0, 0.0));
        let expected = Matrix::from_rows(vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        assert!(swap.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn beamsplitter_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = BeamsplitterParams::new(
                rng.random::<f64>() * 7.0,
                rng.random::<f64>() * 7.0,
                rng.random::<f64>() * 7.0,
            );
            assert!(beamsplitter_matrix::<f64>(&p).unitarity_defect() < 1e-14);
        }
    }

    #[test]
    fn layer_layouts() {
        let l = LayerSpec {
            parity: 0,
            gates: vec![BeamsplitterParams::IDENTITY; 2],
        };
        let u = layer_unitary::<f64>(&l, 4).unwrap();
        assert!(u.max_abs_diff(&Matrix::identity(4)) < 1e-15);

        let l1 = LayerSpec {
            parity: 1,
            gates: vec![BeamsplitterParams::new(0.3, 0.1, 0.2); 2],
        };
        let mask = layer_mask(&l1, 5).unwrap();
        assert!(mask.get(0, 0) && !mask.get(0, 1));
        assert!(mask.get(1, 2) && mask.get(2, 1) && mask.get(3, 4) && mask.get(4, 3));
        assert!(!mask.get(2, 3));

        let bad = LayerSpec {
            parity: 1,
            gates: vec![BeamsplitterParams::IDENTITY; 2],
        };
        assert!(matches!(
            layer_unitary::<f64>(&bad, 4),
            Err(Error::Layout(_))
        ));
        let bad_parity = LayerSpec {
            parity: 2,
            gates: vec![],
        };
        assert!(matches!(layer_mask(&bad_parity, 4), Err(Error::Layout(_))));
    }

    #[test]
    fn random_layer_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = random_shallow_circuit(6, 1, &mut rng).unwrap();
        assert!(
            layer_unitary::<f64>(&c.layers[0], 6)
                .unwrap()
                .unitarity_defect()
                < 1e-13
        );
    }

    #[test]
    fn composition() {
        let empty = CircuitSpec {
            m: 3,
            depth: 0,
            layers: vec![],
            seed: None,
        };
        let cc = compose_circuit::<f64>(&empty).unwrap();
        assert!(cc.unitary.max_abs_diff(&Matrix::identity(3)) == 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = random_shallow_circuit(6, 2, &mut rng).unwrap();
        let cc = compose_circuit::<f64>(&c).unwrap();
        assert!(cc.unitary.unitarity_defect() < 1e-13);
        assert!(cc.structural_width() <= 4);

        let c8 = random_shallow_circuit(8, 3, &mut rng).unwrap();
        assert!(compose_circuit::<f64>(&c8).unwrap().structural_width() <= 6);

        // depth = m is generically dense
        let dense = random_shallow_circuit(4, 4, &mut rng).unwrap();
        let cc = compose_circuit::<f64>(&dense).unwrap();
        assert!((0..4).all(|i| (0..4).all(|j| cc.mask.get(i, j))));
        assert!((0..4).all(|i| (0..4).all(|j| cc.unitary.get(i, j).norm() > 1e-12)));

        let mut wrong = c.clone();
        wrong.layers.swap(0, 1);
        assert!(matches!(
            compose_circuit::<f64>(&wrong),
            Err(Error::Layout(_))
        ));
    }

    #[test]
    fn structural_mask_survives_diagonal_gates() {
        let c = CircuitSpec {
            m: 4,
            depth: 1,
            layers: vec![LayerSpec {
                parity: 0,
                gates: vec![BeamsplitterParams::IDENTITY; 2],
            }],
            seed: None,
        };
        let cc = compose_circuit::<f64>(&c).unwrap();
        assert!(cc.mask.get(0, 1));
        assert_eq!(cc.unitary.get(0, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn random_circuit_is_seed_deterministic() {
        let a = random_shallow_circuit(7, 3, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let b = random_shallow_circuit(7, 3, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
        assert!(random_shallow_circuit(1, 1, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut c = random_shallow_circuit(5, 3, &mut ChaCha8Rng::seed_from_u64(77)).unwrap();
        c.seed = Some(77);
        let back = CircuitSpec::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(v["layers"][1]["parity"], 1);
        assert!(v["layers"][0]["gates"][0]["phi_t"].is_f64());
    }

    #[test]
    fn haar_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let u1 = haar_unitary::<f64, _>(1, &mut rng);
        assert!((u1.get(0, 0).norm() - 1.0).abs() < 1e-14);
        let u5 = haar_unitary::<f64, _>(5, &mut rng);
        assert!(u5.unitarity_defect() < 1e-12);
        let u3 = haar_unitary::<f32, _>(3, &mut rng);
        assert!(u3.unitarity_defect() < 1e-5);
    }

    #[test]
    fn haar_first_column_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let draws = 10_000;
        let xs: Vec<f64> = (0..draws)
            .map(|_| haar_unitary::<f64, _>(4, &mut rng).get(0, 0).norm_sqr())
            .collect();
        let mean = xs.iter().sum::<f64>() / draws as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws as f64 - 1.0);
        let se = (var / draws as f64).sqrt();
        assert!((mean - 0.25).abs() < 3.0 * se, "mean {mean}, se {se}");
    }
}
