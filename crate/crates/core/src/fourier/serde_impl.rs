//! JSON wire formats.
//!
//! `SpectralField`: `{"m", "d", "M", "real_tag", "coeffs": [[[ξ…], re, im], …]}`
//! with `[ξ…]` the flattened m·d frequency components.
//!
//! `KernelSpec`: `{"d", "modes": [[[λ…], [η…], [[re, im]…]], …]}` with one
//! `[re, im]` pair per space component. The explicit `"d"` keeps the zero
//! kernel (empty mode list) serializable.

use num_complex::Complex64;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{FreqVec, KernelMode, KernelSpec, SpectralField};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldRepr {
    m: usize,
    d: usize,
    #[serde(rename = "M")]
    cutoff: i64,
    real_tag: bool,
    coeffs: Vec<(Vec<i64>, f64, f64)>,
}

impl Serialize for SpectralField {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let coeffs = self
            .iter_nonzero()
            .map(|(freq, c)| (freq.components().to_vec(), c.re, c.im))
            .collect();
        FieldRepr {
            m: self.num_vars(),
            d: self.dim(),
            cutoff: self.cutoff(),
            real_tag: self.real_tag(),
            coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpectralField {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = FieldRepr::deserialize(deserializer)?;
        let entries: Result<Vec<_>, _> = repr
            .coeffs
            .into_iter()
            .map(|(data, re, im)| {
                FreqVec::new(repr.d, data).map(|f| {
                    if f.num_vars() == repr.m {
                        Ok((f, Complex64::new(re, im)))
                    } else {
                        Err(DeError::custom(format!(
                            "coefficient frequency has {} variables, field has {}",
                            f.num_vars(),
                            repr.m
                        )))
                    }
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| DeError::custom(e.to_string()))
            .and_then(|v| v.into_iter().collect());
        let entries = entries?;
        SpectralField::from_coeffs(repr.m, repr.d, repr.cutoff, repr.real_tag, entries)
            .map_err(|e| DeError::custom(e.to_string()))
    }
}

type ModeRepr = (Vec<i64>, Vec<i64>, Vec<(f64, f64)>);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelRepr {
    d: usize,
    modes: Vec<ModeRepr>,
}

impl Serialize for KernelSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let modes = self
            .modes()
            .iter()
            .map(|m| {
                (
                    m.lambda.clone(),
                    m.eta.clone(),
                    m.coeff.iter().map(|c| (c.re, c.im)).collect(),
                )
            })
            .collect();
        KernelRepr {
            d: self.dim(),
            modes,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KernelSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = KernelRepr::deserialize(deserializer)?;
        let modes = repr
            .modes
            .into_iter()
            .map(|(lambda, eta, coeff)| KernelMode {
                lambda,
                eta,
                coeff: coeff
                    .into_iter()
                    .map(|(re, im)| Complex64::new(re, im))
                    .collect(),
            })
            .collect();
        KernelSpec::new(repr.d, modes).map_err(|e| DeError::custom(e.to_string()))
    }
}
