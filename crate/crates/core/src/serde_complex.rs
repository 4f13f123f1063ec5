//! Serde adapters rendering `Complex64` as an explicit `{"re": …, "im": …}`
//! object instead of num-complex's default `[re, im]` tuple. Field names in
//! the serialized form make eigenvalue tables self-describing and keep the
//! wire format independent of the num-complex representation.
//!
//! Usage: `#[serde(with = "crate::serde_complex")]` on a `Complex64` field,
//! `#[serde(with = "crate::serde_complex::vec")]` on a `Vec<Complex64>`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct Pair {
    re: f64,
    im: f64,
}

pub fn serialize<S: Serializer>(z: &Complex64, serializer: S) -> Result<S::Ok, S::Error> {
    Pair { re: z.re, im: z.im }.serialize(serializer)
}

pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Complex64, D::Error> {
    let pair = Pair::deserialize(deserializer)?;
    Ok(Complex64::new(pair.re, pair.im))
}

pub mod vec {
    use super::Pair;
    use num_complex::Complex64;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        values: &[Complex64],
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(values.len()))?;
        for z in values {
            seq.serialize_element(&Pair { re: z.re, im: z.im })?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<Pair>::deserialize(deserializer)?;
        Ok(pairs.into_iter().map(|p| Complex64::new(p.re, p.im)).collect())
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Holder {
        #[serde(with = "crate::serde_complex")]
        z: Complex64,
        #[serde(with = "crate::serde_complex::vec")]
        zs: Vec<Complex64>,
    }

    #[test]
    fn renders_named_fields_and_round_trips() {
        let holder = Holder {
            z: Complex64::new(1.5, -2.5),
            zs: vec![Complex64::new(0.1, 0.2), Complex64::new(-3.0, 4.0)],
        };
        let json = serde_json::to_string(&holder).unwrap();
        assert_eq!(
            json,
            r#"{"z":{"re":1.5,"im":-2.5},"zs":[{"re":0.1,"im":0.2},{"re":-3.0,"im":4.0}]}"#
        );
        let back: Holder = serde_json::from_str(&json).unwrap();
        assert_eq!(back, holder);
    }

    #[test]
    fn full_precision_survives() {
        let z = Complex64::new(4.0 / 27.0, f64::MIN_POSITIVE);
        let json = serde_json::to_string(&super::Pair { re: z.re, im: z.im }).unwrap();
        let back: super::Pair = serde_json::from_str(&json).unwrap();
        assert_eq!(back.re.to_bits(), z.re.to_bits());
        assert_eq!(back.im.to_bits(), z.im.to_bits());
    }
}
