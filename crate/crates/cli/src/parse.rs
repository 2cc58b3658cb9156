use std::str::FromStr;

use freewick::ncalg::{
    parse_complex, parse_poly, poly_from_json, Alphabet, CoeffAlgebra, GenKind, NcPoly, Word,
};
use freewick::{CMatrix, Error, Result, C64};

const WIDE: usize = 256;

/// Smallest alphabet holding the generators that occur.
fn tight(p: NcPoly) -> Result<NcPoly> {
    let gens = p.generators();
    let d = gens
        .iter()
        .filter(|g| g.kind == GenKind::Semicircular)
        .map(|g| g.index)
        .max()
        .unwrap_or(0);
    let q = gens
        .iter()
        .filter(|g| g.kind == GenKind::Deterministic)
        .map(|g| g.index)
        .max()
        .unwrap_or(0);
    p.with_alphabet(Alphabet::new(d, q))
}

pub fn poly(text: &str) -> Result<NcPoly> {
    tight(parse_poly(
        text,
        Alphabet::new(WIDE, WIDE),
        CoeffAlgebra::Scalar,
    )?)
}

pub fn poly_json_file(path: &str) -> Result<NcPoly> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))?;
    tight(poly_from_json(&text, Alphabet::new(WIDE, WIDE))?)
}

/// A single monomial with coefficient one.
pub fn word(text: &str) -> Result<Word> {
    let p = poly(text)?;
    let mut terms = p.terms();
    match (terms.next(), terms.next()) {
        (Some((w, a)), None)
            if p.algebra().dim() == 1 && (a[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-14 =>
        {
            Ok(w.clone())
        }
        _ => Err(Error::InvalidInput(format!("{text:?} is not a monomial"))),
    }
}

pub fn list<T: FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| Error::InvalidInput(format!("{s:?}: {e}")))
        })
        .collect()
}

fn json_entry(v: &serde_json::Value) -> Result<C64> {
    match v {
        serde_json::Value::Number(x) => Ok(C64::new(x.as_f64().unwrap_or(f64::NAN), 0.0)),
        serde_json::Value::Array(p) if p.len() == 2 => {
            let f = |v: &serde_json::Value| {
                v.as_f64()
                    .ok_or_else(|| Error::InvalidInput("bad matrix entry".into()))
            };
            Ok(C64::new(f(&p[0])?, f(&p[1])?))
        }
        _ => Err(Error::InvalidInput(format!("bad matrix entry {v}"))),
    }
}

/// `diag(a, b, ..)` or a JSON list of rows with real or `[re, im]` entries.
pub fn matrix(text: &str) -> Result<CMatrix> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix("diag(").and_then(|r| r.strip_suffix(')')) {
        let vals = inner
            .split(',')
            .map(|s| parse_complex(s.trim()))
            .collect::<Result<Vec<_>>>()?;
        let n = vals.len();
        return Ok(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                vals[i]
            } else {
                C64::new(0.0, 0.0)
            }
        }));
    }
    let rows: Vec<Vec<serde_json::Value>> = serde_json::from_str(t).map_err(|e| Error::Syntax {
        pos: e.column(),
        msg: e.to_string(),
    })?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(
            "matrix must be square and nonempty".into(),
        ));
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            m[(i, j)] = json_entry(v)?;
        }
    }
    Ok(m)
}

/// Real rows, with every standalone identifier `c` replaced by `c_value`.
pub fn real_rows(text: &str, c_value: Option<f64>) -> Result<Vec<Vec<f64>>> {
    let mut s = String::new();
    let chars: Vec<char> = text.chars().collect();
    for (i, &ch) in chars.iter().enumerate() {
        let alone = |k: Option<&char>| k.is_none_or(|c| !c.is_ascii_alphanumeric() && *c != '_');
        if ch == 'c'
            && alone(i.checked_sub(1).and_then(|k| chars.get(k)))
            && alone(chars.get(i + 1))
        {
            let v = c_value.ok_or_else(|| {
                Error::InvalidInput("covariance uses c but --c is not set".into())
            })?;
            s.push_str(&v.to_string());
        } else {
            s.push(ch);
        }
    }
    serde_json::from_str(&s).map_err(|e| Error::Syntax {
        pos: e.column(),
        msg: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers() {
        assert_eq!(word("X1X2X1").unwrap(), Word::from_x(&[1, 2, 1]));
        assert!(word("X1 + X2").is_err());
        assert!(word("2*X1").is_err());
        assert_eq!(poly("X2").unwrap().alphabet(), Alphabet::new(2, 0));
        assert_eq!(list::<usize>("2, 1").unwrap(), vec![2, 1]);
        let m = matrix("diag(1,-1)").unwrap();
        assert_eq!(m[(1, 1)], C64::new(-1.0, 0.0));
        let m = matrix("[[0,[1,2]],[[1,-2],0]]").unwrap();
        assert_eq!(m[(0, 1)], C64::new(1.0, 2.0));
        assert_eq!(
            real_rows("[[1,c],[c,1]]", Some(0.3)).unwrap(),
            vec![vec![1.0, 0.3], vec![0.3, 1.0]]
        );
        assert!(real_rows("[[1,c],[c,1]]", None).is_err());
    }
}
