//! Lenient number fields: configs may give a number or a decimal string.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer};

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrStr {
    Num(f64),
    Str(String),
}

impl NumOrStr {
    fn value<E: serde::de::Error>(self) -> Result<f64, E> {
        match self {
            NumOrStr::Num(x) => Ok(x),
            NumOrStr::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| E::custom(format!("`{s}` is not a decimal number"))),
        }
    }
}

pub fn real<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    NumOrStr::deserialize(d)?.value()
}

pub fn reals<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    Vec::<NumOrStr>::deserialize(d)?
        .into_iter()
        .map(NumOrStr::value)
        .collect()
}

/// `[re, im]`.
pub fn complex<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    let v = Vec::<NumOrStr>::deserialize(d)?;
    if v.len() != 2 {
        return Err(D::Error::custom("a complex number is written [re, im]"));
    }
    let mut it = v.into_iter();
    let re = it.next().expect("length checked").value()?;
    let im = it.next().expect("length checked").value()?;
    Ok(Complex64::new(re, im))
}
