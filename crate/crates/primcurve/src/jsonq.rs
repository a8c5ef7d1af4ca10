//! JSON encoding of exact rationals as `[numerator, denominator]` integer
//! pairs, with arbitrary-precision integer literals.

use crate::error::{Error, Result};
use crate::geom::{Pt, Q};
use num::bigint::BigInt;
use serde_json::{Number, Value};
use std::str::FromStr;

pub fn q_to_value(x: &Q) -> Value {
    let n = Number::from_str(&x.numer().to_string()).expect("integer literal");
    let d = Number::from_str(&x.denom().to_string()).expect("integer literal");
    Value::Array(vec![Value::Number(n), Value::Number(d)])
}

pub fn value_to_q(v: &Value) -> Result<Q> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("expected [num, den] pair, got {v}")))?;
    if arr.len() != 2 {
        return Err(Error::Parse(format!("expected [num, den] pair, got {v}")));
    }
    let int_of = |v: &Value| -> Result<BigInt> {
        let n = v
            .as_number()
            .ok_or_else(|| Error::Parse(format!("expected integer, got {v}")))?;
        BigInt::from_str(&n.to_string())
            .map_err(|_| Error::Parse(format!("expected integer, got {v}")))
    };
    let num = int_of(&arr[0])?;
    let den = int_of(&arr[1])?;
    if den == BigInt::from(0) {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(Q::new(num, den))
}

pub fn pt_to_value(p: &Pt) -> Value {
    Value::Array(vec![q_to_value(&p.x), q_to_value(&p.y)])
}

pub fn value_to_pt(v: &Value) -> Result<Pt> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("expected point [[xn,xd],[yn,yd]], got {v}")))?;
    if arr.len() != 2 {
        return Err(Error::Parse("point needs two coordinates".into()));
    }
    Ok(Pt::new(value_to_q(&arr[0])?, value_to_q(&arr[1])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::q;

    #[test]
    fn roundtrip() {
        let x = q(-22, 7);
        assert_eq!(value_to_q(&q_to_value(&x)).unwrap(), x);
    }

    #[test]
    fn big_integers_survive() {
        let big = Q::new(
            BigInt::from_str("123456789012345678901234567890").unwrap(),
            BigInt::from_str("987654321098765432109876543211").unwrap(),
        );
        assert_eq!(value_to_q(&q_to_value(&big)).unwrap(), big);
    }

    #[test]
    fn rejects_zero_denominator() {
        let v: Value = serde_json::from_str("[1, 0]").unwrap();
        assert!(value_to_q(&v).is_err());
    }
}
