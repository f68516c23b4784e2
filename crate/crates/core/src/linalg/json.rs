//! JSON encoding: a matrix is an array of rows, each row an array of
//! `[re, im]` pairs. A flat row-major array of `dim²` pairs is also accepted
//! on input. Vectors are a flat array of `[re, im]` pairs.

use serde::de::Error as _;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::{Matrix, Vector, C};
use crate::scalar::Real;

fn pair<T: Real>(z: &C<T>) -> [T; 2] {
    [z.re, z.im]
}

impl<T: Real> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.dim()))?;
        for i in 0..self.dim() {
            let row: Vec<[T; 2]> = self.row(i).iter().map(pair).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixRepr<T> {
    Rows(Vec<Vec<[T; 2]>>),
    Flat(Vec<[T; 2]>),
}

impl<'de, T: Real> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<C<T>>> = match MatrixRepr::<T>::deserialize(d)? {
            MatrixRepr::Rows(rows) => rows
                .into_iter()
                .map(|r| r.into_iter().map(|[re, im]| C::new(re, im)).collect())
                .collect(),
            MatrixRepr::Flat(flat) => {
                let n = (flat.len() as f64).sqrt().round() as usize;
                if n * n != flat.len() {
                    return Err(D::Error::custom(format!(
                        "flat matrix has {} entries, not a perfect square",
                        flat.len()
                    )));
                }
                flat.chunks(n.max(1))
                    .map(|r| r.iter().map(|&[re, im]| C::new(re, im)).collect())
                    .collect()
            }
        };
        Matrix::from_rows(rows).map_err(D::Error::custom)
    }
}

impl<T: Real> Serialize for Vector<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.dim()))?;
        for z in self.as_slice() {
            seq.serialize_element(&pair(z))?;
        }
        seq.end()
    }
}

impl<'de, T: Real> Deserialize<'de> for Vector<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<[T; 2]>::deserialize(d)?;
        if raw
            .iter()
            .any(|[re, im]| !(re.is_finite() && im.is_finite()))
        {
            return Err(D::Error::custom("non-finite vector entry"));
        }
        Ok(Vector::from_vec(
            raw.into_iter().map(|[re, im]| C::new(re, im)).collect(),
        ))
    }
}
